#include "morphobpe/document.hpp"

#include <json.hpp>

#include "morphobpe/errors.hpp"
#include "morphobpe/utf8.hpp"

namespace morphobpe::pipeline {

using nlohmann::json;

namespace {

json parse_line(const std::string& line, std::size_t line_no, const char* what) {
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
        throw ParseError(std::string(what) + ": malformed JSON object at line " +
                         std::to_string(line_no));
    }
    return j;
}

std::string get_string(const json& j, const char* key, std::size_t line_no, bool required) {
    const auto it = j.find(key);
    if (it == j.end()) {
        if (required) {
            throw ParseError(std::string("document: missing field \"") + key + "\" at line " +
                             std::to_string(line_no));
        }
        return {};
    }
    if (!it->is_string()) {
        throw ParseError(std::string("document: field \"") + key + "\" must be a string at line " +
                         std::to_string(line_no));
    }
    return it->get<std::string>();
}

}  // namespace

Document parse_document(const std::string& json_line, std::size_t line_no) {
    const json j = parse_line(json_line, line_no, "document");
    Document doc;
    doc.id = get_string(j, "id", line_no, true);
    if (doc.id.empty()) {
        throw ParseError("document: empty id at line " + std::to_string(line_no));
    }
    doc.source = get_string(j, "source", line_no, false);
    doc.title = get_string(j, "title", line_no, false);
    doc.body = get_string(j, "body", line_no, false);
    if (const auto it = j.find("meta"); it != j.end()) {
        if (!it->is_object()) {
            throw ParseError("document: \"meta\" must be an object at line " +
                             std::to_string(line_no));
        }
        for (const auto& [k, v] : it->items()) {
            if (!v.is_string()) {
                throw ParseError("document: meta values must be strings at line " +
                                 std::to_string(line_no));
            }
            doc.meta[k] = v.get<std::string>();
        }
    }
    utf8::require_valid(doc.body, "document body");
    utf8::require_valid(doc.title, "document title");
    return doc;
}

std::string serialize_document(const Document& doc) {
    json j;
    j["id"] = doc.id;
    j["source"] = doc.source;
    j["title"] = doc.title;
    j["body"] = doc.body;
    j["meta"] = json::object();
    for (const auto& [k, v] : doc.meta) j["meta"][k] = v;
    return j.dump();
}

QnARecord parse_qna(const std::string& json_line, std::size_t line_no) {
    const json j = parse_line(json_line, line_no, "qna record");
    QnARecord rec;
    rec.question = get_string(j, "question", line_no, true);
    if (const auto it = j.find("answers"); it != j.end()) {
        if (!it->is_array()) {
            throw ParseError("qna record: \"answers\" must be an array at line " +
                             std::to_string(line_no));
        }
        for (const auto& a : *it) {
            if (!a.is_object()) {
                throw ParseError("qna record: answer must be an object at line " +
                                 std::to_string(line_no));
            }
            KinAnswer ans;
            ans.text = a.value("text", std::string{});
            ans.adopted = a.value("adopted", false);
            ans.expert = a.value("expert", false);
            ans.reputation = a.value("reputation", 0LL);
            if (ans.reputation < 0) {
                throw ParseError("qna record: negative reputation at line " +
                                 std::to_string(line_no));
            }
            rec.answers.push_back(std::move(ans));
        }
    }
    return rec;
}

std::string serialize_qna(const QnARecord& rec) {
    json j;
    j["question"] = rec.question;
    j["answers"] = json::array();
    for (const auto& a : rec.answers) {
        j["answers"].push_back({{"text", a.text},
                                {"adopted", a.adopted},
                                {"expert", a.expert},
                                {"reputation", a.reputation}});
    }
    return j.dump();
}

std::vector<Document> read_documents(std::istream& in) {
    std::vector<Document> docs;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        docs.push_back(parse_document(line, line_no));
    }
    return docs;
}

void write_documents(const std::vector<Document>& docs, std::ostream& out) {
    for (const auto& d : docs) out << serialize_document(d) << '\n';
}

}  // namespace morphobpe::pipeline
