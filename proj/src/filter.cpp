#include "morphobpe/filter.hpp"

#include <algorithm>
#include <unordered_map>

#include <json.hpp>

#include "morphobpe/errors.hpp"
#include "morphobpe/hash.hpp"
#include "morphobpe/utf8.hpp"

namespace morphobpe::pipeline {

namespace {

void check_range(const char* name, double value, double lo, double hi) {
    if (!(value >= lo && value <= hi)) {
        throw ConfigError(std::string("filter config: ") + name + " must be in [" +
                          std::to_string(lo) + ", " + std::to_string(hi) + "], got " +
                          std::to_string(value));
    }
}

bool is_digit_scalar(char32_t cp) {
    return (cp >= '0' && cp <= '9') || (cp >= 0xFF10 && cp <= 0xFF19);  // incl. fullwidth
}

// Letters of the scripts this pipeline is meant for; everything else that
// is not a digit or whitespace counts as "special".
bool is_letter_scalar(char32_t cp) {
    if (cp < 0x80) return (cp >= 'a' && cp <= 'z') || (cp >= 'A' && cp <= 'Z');
    if (cp >= 0xAC00 && cp <= 0xD7A3) return true;   // Hangul syllables
    if (cp >= 0x1100 && cp <= 0x11FF) return true;   // Hangul jamo
    if (cp >= 0x3130 && cp <= 0x318F) return true;   // Hangul compat jamo
    if (cp >= 0x4E00 && cp <= 0x9FFF) return true;   // CJK ideographs
    if (cp >= 0x3040 && cp <= 0x30FF) return true;   // kana
    if (cp >= 0x00C0 && cp <= 0x024F) return true;   // Latin extended
    if (cp >= 0x0370 && cp <= 0x04FF) return true;   // Greek, Cyrillic
    return false;
}

// Highest share of the grapheme stream claimed by a single n-gram:
// top_count * n / total_graphemes.
double top_ngram_mass(const std::vector<std::uint64_t>& grapheme_hashes, std::size_t n) {
    const std::size_t total = grapheme_hashes.size();
    if (total < n) return 0.0;
    std::unordered_map<std::uint64_t, long long> counts;
    std::uint64_t rolling = 0;
    long long top = 0;
    for (std::size_t i = 0; i + n <= total; ++i) {
        rolling = 0xcbf29ce484222325ULL;
        for (std::size_t k = 0; k < n; ++k) {
            rolling = mix64(rolling ^ grapheme_hashes[i + k]);
        }
        top = std::max(top, ++counts[rolling]);
    }
    return static_cast<double>(top) * static_cast<double>(n) / static_cast<double>(total);
}

}  // namespace

void FilterConfig::validate() const {
    if (min_length < 0) throw ConfigError("filter config: min_length must be >= 0");
    check_range("repetition_threshold", repetition_threshold, 0.0, 1.0);
    check_range("digit_threshold", digit_threshold, 0.0, 1.0);
    check_range("special_threshold", special_threshold, 0.0, 1.0);
    check_range("blocklist_threshold", blocklist_threshold, 0.0, 1.0);
}

const std::vector<std::string>& default_blocklist() {
    // Starter profanity/slang list; curation runs are expected to supply
    // their own via config.
    static const std::vector<std::string> list = {
        "시발", "씨발", "씨빨", "병신", "개새끼", "새끼", "지랄", "좆", "썅", "꺼져",
    };
    return list;
}

FilterVerdict filter_document(const Document& doc, const FilterConfig& rules) {
    FilterVerdict verdict;
    verdict.doc_id = doc.id;

    const std::string& body = doc.body;
    const auto ranges = utf8::grapheme_ranges(body);
    const auto n_graphemes = static_cast<long long>(ranges.size());
    verdict.metrics["length"] = static_cast<double>(n_graphemes);

    std::vector<std::uint64_t> grapheme_hashes;
    grapheme_hashes.reserve(ranges.size());
    for (const auto& [b, e] : ranges) {
        grapheme_hashes.push_back(fnv1a64(std::string_view(body).substr(b, e - b)));
    }
    double repetition = 0.0;
    for (std::size_t n = 1; n <= 4; ++n) {
        const double mass = top_ngram_mass(grapheme_hashes, n);
        verdict.metrics["repetition_" + std::to_string(n)] = mass;
        repetition = std::max(repetition, mass);
    }
    verdict.metrics["repetition"] = repetition;

    long long digits = 0, specials = 0, scalars = 0;
    {
        std::size_t i = 0;
        while (i < body.size()) {
            const char32_t cp = utf8::decode_at(body, i);
            ++scalars;
            if (is_digit_scalar(cp)) {
                ++digits;
            } else if (!utf8::is_space(cp) && !is_letter_scalar(cp)) {
                ++specials;
            }
        }
    }
    const double digit_ratio =
        scalars > 0 ? static_cast<double>(digits) / static_cast<double>(scalars) : 0.0;
    const double special_ratio =
        scalars > 0 ? static_cast<double>(specials) / static_cast<double>(scalars) : 0.0;
    verdict.metrics["digit_ratio"] = digit_ratio;
    verdict.metrics["special_ratio"] = special_ratio;

    long long words = 0, blocked = 0;
    {
        std::size_t i = 0;
        while (i < body.size()) {
            std::size_t peek = i;
            if (utf8::is_space(utf8::decode_at(body, peek))) {
                i = peek;
                continue;
            }
            const std::size_t start = i;
            while (i < body.size()) {
                peek = i;
                if (utf8::is_space(utf8::decode_at(body, peek))) break;
                i = peek;
            }
            const std::string_view word = std::string_view(body).substr(start, i - start);
            ++words;
            for (const auto& term : rules.blocklist) {
                if (!term.empty() && word.find(term) != std::string_view::npos) {
                    ++blocked;
                    break;
                }
            }
        }
    }
    const double blocklist_ratio =
        words > 0 ? static_cast<double>(blocked) / static_cast<double>(words) : 0.0;
    verdict.metrics["blocklist_ratio"] = blocklist_ratio;

    // First failure wins; the metrics above are reported regardless.
    if (n_graphemes < rules.min_length) {
        verdict.kept = false;
        verdict.rule = "min_length";
    } else if (repetition > rules.repetition_threshold) {
        verdict.kept = false;
        verdict.rule = "repetition";
    } else if (digit_ratio > rules.digit_threshold) {
        verdict.kept = false;
        verdict.rule = "digit_ratio";
    } else if (special_ratio > rules.special_threshold) {
        verdict.kept = false;
        verdict.rule = "special_ratio";
    } else if (blocklist_ratio > rules.blocklist_threshold) {
        verdict.kept = false;
        verdict.rule = "blocklist";
    }
    return verdict;
}

std::string serialize_verdict(const FilterVerdict& verdict) {
    nlohmann::json j;
    j["doc_id"] = verdict.doc_id;
    j["kept"] = verdict.kept;
    j["rule"] = verdict.rule;
    j["metrics"] = nlohmann::json::object();
    for (const auto& [k, v] : verdict.metrics) j["metrics"][k] = v;
    return j.dump();
}

}  // namespace morphobpe::pipeline
