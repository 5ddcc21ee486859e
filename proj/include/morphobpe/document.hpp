#pragma once

#include <istream>
#include <map>
#include <ostream>
#include <string>
#include <vector>

namespace morphobpe::pipeline {

// One corpus record. Serialized as one JSON object per line:
// {"id": ..., "source": ..., "title": ..., "body": ..., "meta": {...}}.
struct Document {
    std::string id;
    std::string source;
    std::string title;
    std::string body;
    std::map<std::string, std::string> meta;

    bool operator==(const Document&) const = default;
};

struct KinAnswer {
    std::string text;
    bool adopted = false;
    bool expert = false;
    long long reputation = 0;

    bool operator==(const KinAnswer&) const = default;
};

struct QnARecord {
    std::string question;
    std::vector<KinAnswer> answers;

    bool operator==(const QnARecord&) const = default;
};

// line_no is used in diagnostics; pass 0 when unknown.
Document parse_document(const std::string& json_line, std::size_t line_no = 0);
std::string serialize_document(const Document& doc);

QnARecord parse_qna(const std::string& json_line, std::size_t line_no = 0);
std::string serialize_qna(const QnARecord& rec);

std::vector<Document> read_documents(std::istream& in);
void write_documents(const std::vector<Document>& docs, std::ostream& out);

}  // namespace morphobpe::pipeline
