#include "morphobpe/prompts.hpp"

#include <fstream>
#include <unordered_set>

#include <json.hpp>

#include "morphobpe/errors.hpp"

namespace morphobpe::prompts {

using nlohmann::json;

std::vector<ExampleSet> sample_example_sets(const std::vector<Example>& pool, std::size_t k,
                                            std::size_t num_sets, std::uint64_t seed,
                                            const std::string& task) {
    if (pool.size() < k) {
        throw InputError("sample_example_sets: pool of " + std::to_string(pool.size()) +
                         " is smaller than k=" + std::to_string(k));
    }
    std::vector<ExampleSet> sets;
    sets.reserve(num_sets);
    for (std::size_t s = 0; s < num_sets; ++s) {
        SplitMix64 rng(seed + s);
        ExampleSet set;
        set.task = task;
        set.set_index = static_cast<int>(s);
        for (const std::size_t idx : sample_indices(pool.size(), k, rng)) {
            set.examples.push_back(pool[idx]);
        }
        sets.push_back(std::move(set));
    }
    return sets;
}

std::string render_format(const std::string& format, const Example& fields, int index) {
    std::string out;
    out.reserve(format.size());
    std::size_t i = 0;
    while (i < format.size()) {
        const char c = format[i];
        if (c != '{') {
            out.push_back(c);
            ++i;
            continue;
        }
        const std::size_t close = format.find('}', i + 1);
        if (close == std::string::npos) {
            out.push_back(c);
            ++i;
            continue;
        }
        const std::string slot = format.substr(i + 1, close - i - 1);
        bool valid = !slot.empty();
        for (const char sc : slot) {
            if (!std::isalnum(static_cast<unsigned char>(sc)) && sc != '_') {
                valid = false;
                break;
            }
        }
        if (!valid) {  // not a slot; leave the brace alone
            out.push_back(c);
            ++i;
            continue;
        }
        const auto it = fields.find(slot);
        if (it != fields.end()) {
            out += it->second;
        } else if (slot == "index") {
            out += std::to_string(index);
        } else {
            throw InputError("prompt render: no value for slot \"" + slot + "\"");
        }
        i = close + 1;
    }
    return out;
}

std::string build_fewshot_prompt(const PromptTemplate& tmpl, const ExampleSet& set,
                                 const Example& query) {
    std::string body;
    for (std::size_t i = 0; i < set.examples.size(); ++i) {
        if (i > 0) body += tmpl.separator;
        body += render_format(tmpl.example_format, set.examples[i], static_cast<int>(i) + 1);
    }
    if (!set.examples.empty()) body += tmpl.separator;
    body += render_format(tmpl.query_format, query, static_cast<int>(set.examples.size()) + 1);
    return tmpl.header + body;
}

std::string build_qa_prompt(const std::string& passage, const std::vector<QaPair>& support_qas,
                            const std::string& test_question) {
    if (support_qas.size() != 4) {
        throw InputError("build_qa_prompt: exactly 4 support question-answer pairs required, got " +
                         std::to_string(support_qas.size()));
    }
    std::string out = passage;
    out += "\n";
    for (const auto& qa : support_qas) {
        out += "\n질문: " + qa.question + "\n답변: " + qa.answer + "\n";
    }
    out += "\n질문: " + test_question + "\n답변:";
    return out;
}

std::string build_augmentation_prompt(const std::vector<IntentClass>& source_classes,
                                      const std::string& target_intent, SplitMix64& rng) {
    constexpr std::size_t kClasses = 3;
    constexpr std::size_t kPerClass = 5;
    if (source_classes.size() < kClasses) {
        throw InputError("build_augmentation_prompt: need at least 3 source classes");
    }
    for (const auto& cls : source_classes) {
        if (cls.utterances.size() < kPerClass) {
            throw InputError("build_augmentation_prompt: class \"" + cls.name +
                             "\" has fewer than 5 example utterances");
        }
    }
    const auto picks = sample_indices(source_classes.size(), kClasses, rng);

    std::string out = "사용자 인텐트에 맞는 문장 5개를 만드시오.\n";
    for (const std::size_t idx : picks) {
        const IntentClass& cls = source_classes[idx];
        out += "\n@ 사용자인텐트 : " + cls.name + "\n예시 발화\n";
        for (std::size_t i = 0; i < kPerClass; ++i) {
            out += std::to_string(i + 1) + ". " + cls.utterances[i] + "\n";
        }
    }
    out += "\n@ 사용자인텐트 : " + target_intent + "\n예시 발화\n1.";
    return out;
}

void export_prompt_pack(const std::vector<PackEntry>& entries, std::ostream& out) {
    std::unordered_set<std::string> ids;
    for (const auto& e : entries) {
        if (!ids.insert(e.id).second) {
            throw InputError("prompt pack: duplicate id \"" + e.id + "\"");
        }
        json j;
        j["id"] = e.id;
        j["prompt"] = e.prompt;
        j["gold"] = e.gold;
        out << j.dump() << '\n';
    }
}

std::vector<PackEntry> load_prompt_pack(std::istream& in) {
    std::vector<PackEntry> entries;
    std::unordered_set<std::string> ids;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        json j = json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.is_object() || !j.contains("id") || !j.contains("prompt")) {
            throw ParseError("prompt pack: malformed entry at line " + std::to_string(line_no));
        }
        PackEntry e;
        e.id = j["id"].get<std::string>();
        e.prompt = j["prompt"].get<std::string>();
        e.gold = j.value("gold", std::string{});
        if (!ids.insert(e.id).second) {
            throw ParseError("prompt pack: duplicate id \"" + e.id + "\" at line " +
                             std::to_string(line_no));
        }
        entries.push_back(std::move(e));
    }
    return entries;
}

PromptTemplate parse_template(const std::string& json_text, const std::string& name) {
    json j = json::parse(json_text, nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
        throw ParseError(name + ": template must be a JSON object");
    }
    for (const char* key : {"header", "example_format", "separator", "query_format"}) {
        if (!j.contains(key) || !j[key].is_string()) {
            throw ParseError(name + ": template missing string field \"" + std::string(key) +
                             "\"");
        }
    }
    PromptTemplate tmpl;
    tmpl.header = j["header"].get<std::string>();
    tmpl.example_format = j["example_format"].get<std::string>();
    tmpl.separator = j["separator"].get<std::string>();
    tmpl.query_format = j["query_format"].get<std::string>();
    return tmpl;
}

PromptTemplate load_template(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open template file " + path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return parse_template(text, path);
}

Example parse_example(const std::string& json_line, std::size_t line_no) {
    json j = json::parse(json_line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
        throw ParseError("example: malformed JSON object at line " + std::to_string(line_no));
    }
    Example e;
    for (const auto& [k, v] : j.items()) {
        if (v.is_string()) {
            e[k] = v.get<std::string>();
        } else {
            e[k] = v.dump();
        }
    }
    return e;
}

std::string serialize_example(const Example& example) {
    json j = json::object();
    for (const auto& [k, v] : example) j[k] = v;
    return j.dump();
}

std::string serialize_example_set(const ExampleSet& set) {
    json j;
    j["task"] = set.task;
    j["set_index"] = set.set_index;
    j["examples"] = json::array();
    for (const auto& e : set.examples) {
        json je = json::object();
        for (const auto& [k, v] : e) je[k] = v;
        j["examples"].push_back(std::move(je));
    }
    return j.dump();
}

ExampleSet parse_example_set(const std::string& json_line, std::size_t line_no) {
    json j = json::parse(json_line, nullptr, false);
    if (j.is_discarded() || !j.is_object() || !j.contains("examples") ||
        !j["examples"].is_array()) {
        throw ParseError("example set: malformed JSON at line " + std::to_string(line_no));
    }
    ExampleSet set;
    set.task = j.value("task", std::string{});
    set.set_index = j.value("set_index", 0);
    for (const auto& je : j["examples"]) {
        if (!je.is_object()) {
            throw ParseError("example set: examples must be objects at line " +
                             std::to_string(line_no));
        }
        Example e;
        for (const auto& [k, v] : je.items()) {
            e[k] = v.is_string() ? v.get<std::string>() : v.dump();
        }
        set.examples.push_back(std::move(e));
    }
    return set;
}

}  // namespace morphobpe::prompts
