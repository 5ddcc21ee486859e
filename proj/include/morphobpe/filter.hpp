#pragma once

#include <map>
#include <string>
#include <vector>

#include "morphobpe/document.hpp"

namespace morphobpe::pipeline {

const std::vector<std::string>& default_blocklist();

struct FilterConfig {
    long long min_length = 200;          // grapheme clusters
    double repetition_threshold = 0.30;  // top n-gram mass, n in 1..4
    double digit_threshold = 0.50;
    double special_threshold = 0.40;
    double blocklist_threshold = 0.02;
    std::vector<std::string> blocklist = default_blocklist();

    // Throws ConfigError when a threshold is out of range.
    void validate() const;
};

// Per-document decision with the first rule that rejected it ("pass"
// otherwise) and every computed ratio, whichever rule fired.
struct FilterVerdict {
    std::string doc_id;
    bool kept = true;
    std::string rule = "pass";
    std::map<std::string, double> metrics;
};

std::string serialize_verdict(const FilterVerdict& verdict);

// Total over valid documents: applies min_length, repetition, digit_ratio,
// special_ratio, blocklist in that order; the first failure wins.
FilterVerdict filter_document(const Document& doc, const FilterConfig& rules);

}  // namespace morphobpe::pipeline
