#pragma once

#include <array>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace morphobpe::metrics {

// Corpus-level BLEU-4 sufficient statistics; additive across sentence
// pairs, so chunked accumulation equals a single pass exactly.
struct BleuStats {
    std::array<long long, 4> matches{};  // clipped n-gram matches
    std::array<long long, 4> totals{};   // hypothesis n-gram counts
    long long hyp_len = 0;
    long long ref_len = 0;

    BleuStats& operator+=(const BleuStats& other);
    friend BleuStats operator+(BleuStats a, const BleuStats& b) { return a += b; }
};

struct Smoothing {
    enum class Kind { None, AddK };
    Kind kind = Kind::None;
    double k = 1.0;

    static Smoothing none() { return {}; }
    static Smoothing add_k(double k) { return {Kind::AddK, k}; }
};

using Pretokenizer = std::function<std::vector<std::string>(std::string_view)>;

// "whitespace", "identity", or "cmd:<command>" (line protocol: one
// sentence in, one space-separated token line out).
Pretokenizer make_pretokenizer(const std::string& spec);

BleuStats sentence_bleu_stats(const std::vector<std::string>& hyp_tokens,
                              const std::vector<std::string>& ref_tokens);

// BP * exp(mean log p_n) * 100; with no smoothing, a zero p_n zeroes the
// score.
double bleu_from_stats(const BleuStats& stats, const Smoothing& smoothing);

double corpus_bleu(const std::vector<std::pair<std::string, std::string>>& pairs,
                   const Pretokenizer& pretokenizer, const Smoothing& smoothing);

struct QaScore {
    double exact_match = 0.0;
    double f1 = 0.0;
};

// SQuAD-style normalization (lowercase, strip punctuation, collapse
// whitespace) applied language-agnostically; F1 is max-over-golds token
// overlap on whitespace tokens.
QaScore qa_em_f1(const std::vector<std::string>& predictions,
                 const std::vector<std::vector<std::string>>& golds);

std::string normalize_answer(std::string_view text);

struct ClassificationScores {
    double accuracy = 0.0;
    double macro_f1 = 0.0;
};

ClassificationScores classification_scores(const std::vector<std::string>& preds,
                                           const std::vector<std::string>& golds);

struct StsResult {
    double f1 = 0.0;
    bool degenerate = false;  // no positives on either side
};

// Binarize both sides at threshold (>= is positive), return positive-class F1.
StsResult sts_binarized_f1(const std::vector<double>& pred_scores,
                           const std::vector<double>& gold_scores, double threshold = 3.0);

}  // namespace morphobpe::metrics
