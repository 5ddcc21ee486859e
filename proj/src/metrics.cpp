#include "morphobpe/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <set>
#include <unordered_map>

#include "morphobpe/errors.hpp"
#include "morphobpe/lineproc.hpp"
#include "morphobpe/utf8.hpp"

namespace morphobpe::metrics {

BleuStats& BleuStats::operator+=(const BleuStats& other) {
    for (std::size_t n = 0; n < 4; ++n) {
        matches[n] += other.matches[n];
        totals[n] += other.totals[n];
    }
    hyp_len += other.hyp_len;
    ref_len += other.ref_len;
    return *this;
}

namespace {

std::vector<std::string> whitespace_tokens(std::string_view s) {
    std::vector<std::string> tokens;
    std::size_t i = 0;
    while (i < s.size()) {
        std::size_t peek = i;
        if (utf8::is_space(utf8::decode_at(s, peek))) {
            i = peek;
            continue;
        }
        const std::size_t start = i;
        while (i < s.size()) {
            peek = i;
            if (utf8::is_space(utf8::decode_at(s, peek))) break;
            i = peek;
        }
        tokens.emplace_back(s.substr(start, i - start));
    }
    return tokens;
}

// n-gram key: tokens joined with an unlikely separator byte.
std::string ngram_key(const std::vector<std::string>& tokens, std::size_t start, std::size_t n) {
    std::string key;
    for (std::size_t i = 0; i < n; ++i) {
        if (i > 0) key.push_back('\x1f');
        key += tokens[start + i];
    }
    return key;
}

}  // namespace

Pretokenizer make_pretokenizer(const std::string& spec) {
    if (spec == "whitespace") {
        return [](std::string_view s) { return whitespace_tokens(s); };
    }
    if (spec == "identity") {
        // The line is one token; useful when inputs are pre-tokenized ids.
        return [](std::string_view s) {
            std::vector<std::string> out;
            if (!s.empty()) out.emplace_back(s);
            return out;
        };
    }
    if (spec.rfind("cmd:", 0) == 0) {
        const std::string command = spec.substr(4);
        if (command.empty()) throw ConfigError("pretokenizer: empty command after \"cmd:\"");
        auto proc = std::make_shared<LineProcess>(command);
        return [proc](std::string_view s) {
            const auto reply = proc->exchange(std::string(s));
            if (!reply) {
                throw InputError("pretokenizer command stopped responding");
            }
            return whitespace_tokens(*reply);
        };
    }
    throw ConfigError("pretokenizer must be \"whitespace\", \"identity\", or \"cmd:<command>\"");
}

BleuStats sentence_bleu_stats(const std::vector<std::string>& hyp_tokens,
                              const std::vector<std::string>& ref_tokens) {
    BleuStats stats;
    stats.hyp_len = static_cast<long long>(hyp_tokens.size());
    stats.ref_len = static_cast<long long>(ref_tokens.size());
    for (std::size_t n = 1; n <= 4; ++n) {
        if (hyp_tokens.size() < n) break;
        std::unordered_map<std::string, long long> ref_counts;
        if (ref_tokens.size() >= n) {
            for (std::size_t i = 0; i + n <= ref_tokens.size(); ++i) {
                ++ref_counts[ngram_key(ref_tokens, i, n)];
            }
        }
        std::unordered_map<std::string, long long> hyp_counts;
        for (std::size_t i = 0; i + n <= hyp_tokens.size(); ++i) {
            ++hyp_counts[ngram_key(hyp_tokens, i, n)];
        }
        long long total = 0, matched = 0;
        for (const auto& [gram, count] : hyp_counts) {
            total += count;
            const auto it = ref_counts.find(gram);
            if (it != ref_counts.end()) matched += std::min(count, it->second);
        }
        stats.totals[n - 1] += total;
        stats.matches[n - 1] += matched;
    }
    return stats;
}

double bleu_from_stats(const BleuStats& stats, const Smoothing& smoothing) {
    if (stats.hyp_len == 0) return 0.0;
    double log_sum = 0.0;
    for (std::size_t n = 0; n < 4; ++n) {
        double num = static_cast<double>(stats.matches[n]);
        double den = static_cast<double>(stats.totals[n]);
        if (smoothing.kind == Smoothing::Kind::AddK) {
            num += smoothing.k;
            den += smoothing.k;
        }
        if (num <= 0.0 || den <= 0.0) return 0.0;
        log_sum += 0.25 * std::log(num / den);
    }
    const double ratio = static_cast<double>(stats.ref_len) / static_cast<double>(stats.hyp_len);
    const double bp = std::min(1.0, std::exp(1.0 - ratio));
    return bp * std::exp(log_sum) * 100.0;
}

double corpus_bleu(const std::vector<std::pair<std::string, std::string>>& pairs,
                   const Pretokenizer& pretokenizer, const Smoothing& smoothing) {
    if (pairs.empty()) throw InputError("corpus_bleu: need at least one hypothesis/reference pair");
    BleuStats stats;
    for (const auto& [hyp, ref] : pairs) {
        stats += sentence_bleu_stats(pretokenizer(hyp), pretokenizer(ref));
    }
    return bleu_from_stats(stats, smoothing);
}

std::string normalize_answer(std::string_view text) {
    std::string out;
    bool pending_space = false;
    std::size_t i = 0;
    while (i < text.size()) {
        const std::size_t start = i;
        char32_t cp = utf8::decode_at(text, i);
        if (utf8::is_space(cp)) {
            pending_space = true;
            continue;
        }
        if (cp < 0x80) {
            const char c = static_cast<char>(cp);
            if (std::ispunct(static_cast<unsigned char>(c))) continue;  // strip punctuation
            if (c >= 'A' && c <= 'Z') cp = static_cast<char32_t>(c - 'A' + 'a');
            if (pending_space && !out.empty()) out.push_back(' ');
            pending_space = false;
            out.push_back(static_cast<char>(cp));
        } else {
            if (pending_space && !out.empty()) out.push_back(' ');
            pending_space = false;
            out.append(text.substr(start, i - start));
        }
    }
    return out;
}

namespace {

double token_f1(const std::vector<std::string>& pred, const std::vector<std::string>& gold) {
    if (pred.empty() && gold.empty()) return 1.0;
    if (pred.empty() || gold.empty()) return 0.0;
    std::map<std::string, long long> gold_counts;
    for (const auto& t : gold) ++gold_counts[t];
    long long common = 0;
    for (const auto& t : pred) {
        const auto it = gold_counts.find(t);
        if (it != gold_counts.end() && it->second > 0) {
            --it->second;
            ++common;
        }
    }
    if (common == 0) return 0.0;
    const double precision = static_cast<double>(common) / static_cast<double>(pred.size());
    const double recall = static_cast<double>(common) / static_cast<double>(gold.size());
    return 2.0 * precision * recall / (precision + recall);
}

}  // namespace

QaScore qa_em_f1(const std::vector<std::string>& predictions,
                 const std::vector<std::vector<std::string>>& golds) {
    if (predictions.size() != golds.size()) {
        throw InputError("qa_em_f1: predictions and golds must have equal length");
    }
    if (predictions.empty()) throw InputError("qa_em_f1: need at least one example");
    double em_sum = 0.0, f1_sum = 0.0;
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        if (golds[i].empty()) {
            throw InputError("qa_em_f1: gold list at index " + std::to_string(i) + " is empty");
        }
        const std::string pred_norm = normalize_answer(predictions[i]);
        const auto pred_tokens = whitespace_tokens(pred_norm);
        bool em = false;
        double best_f1 = 0.0;
        for (const auto& gold : golds[i]) {
            const std::string gold_norm = normalize_answer(gold);
            if (pred_norm == gold_norm) em = true;
            best_f1 = std::max(best_f1, token_f1(pred_tokens, whitespace_tokens(gold_norm)));
        }
        em_sum += em ? 1.0 : 0.0;
        f1_sum += best_f1;
    }
    const double n = static_cast<double>(predictions.size());
    return {em_sum / n, f1_sum / n};
}

ClassificationScores classification_scores(const std::vector<std::string>& preds,
                                           const std::vector<std::string>& golds) {
    if (preds.size() != golds.size()) {
        throw InputError("classification_scores: preds and golds must have equal length");
    }
    if (preds.empty()) throw InputError("classification_scores: need at least one example");

    std::set<std::string> labels(golds.begin(), golds.end());
    labels.insert(preds.begin(), preds.end());

    long long correct = 0;
    for (std::size_t i = 0; i < preds.size(); ++i) {
        if (preds[i] == golds[i]) ++correct;
    }

    double f1_sum = 0.0;
    for (const auto& label : labels) {
        long long tp = 0, fp = 0, fn = 0;
        for (std::size_t i = 0; i < preds.size(); ++i) {
            const bool p = preds[i] == label;
            const bool g = golds[i] == label;
            if (p && g) ++tp;
            else if (p) ++fp;
            else if (g) ++fn;
        }
        const long long denom = 2 * tp + fp + fn;
        f1_sum += denom > 0 ? 2.0 * static_cast<double>(tp) / static_cast<double>(denom) : 0.0;
    }

    return {static_cast<double>(correct) / static_cast<double>(preds.size()),
            f1_sum / static_cast<double>(labels.size())};
}

StsResult sts_binarized_f1(const std::vector<double>& pred_scores,
                           const std::vector<double>& gold_scores, double threshold) {
    if (pred_scores.size() != gold_scores.size()) {
        throw InputError("sts_binarized_f1: preds and golds must have equal length");
    }
    if (pred_scores.empty()) throw InputError("sts_binarized_f1: need at least one example");
    for (const auto& list : {pred_scores, gold_scores}) {
        for (const double s : list) {
            if (!(s >= 0.0 && s <= 5.0)) {
                throw InputError("sts_binarized_f1: scores must lie in [0, 5]");
            }
        }
    }
    long long tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < pred_scores.size(); ++i) {
        const bool p = pred_scores[i] >= threshold;
        const bool g = gold_scores[i] >= threshold;
        if (p && g) ++tp;
        else if (p) ++fp;
        else if (g) ++fn;
    }
    StsResult result;
    const long long denom = 2 * tp + fp + fn;
    result.f1 = denom > 0 ? 2.0 * static_cast<double>(tp) / static_cast<double>(denom) : 0.0;
    result.degenerate = (tp + fn == 0) || (tp + fp == 0);
    return result;
}

}  // namespace morphobpe::metrics
