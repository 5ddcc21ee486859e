#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "morphobpe/document.hpp"
#include "morphobpe/segmentation.hpp"

namespace morphobpe::bpe {

// morpheme_byte and byte operate on raw bytes, so nothing is ever
// out-of-vocabulary; char operates on Unicode scalars and can emit UNK.
enum class TokenizerMode { MorphemeByte, Byte, Char };

const char* to_string(TokenizerMode mode);
std::optional<TokenizerMode> mode_from_string(std::string_view name);

struct Vocabulary {
    TokenizerMode mode = TokenizerMode::Byte;
    std::vector<std::pair<std::string, std::string>> merges;
    std::vector<std::string> id_to_token;
    std::unordered_map<std::string, int> token_to_id;
    std::map<std::string, int> specials;   // char mode reserves "unk" at id 0
    std::vector<std::string> alphabet;

    int size() const { return static_cast<int>(id_to_token.size()); }
    std::optional<int> unk_id() const;

    bool operator==(const Vocabulary& other) const {
        return mode == other.mode && merges == other.merges &&
               id_to_token == other.id_to_token && specials == other.specials &&
               alphabet == other.alphabet;
    }
};

struct TrainOptions {
    TokenizerMode mode = TokenizerMode::Byte;
    int vocab_size = 32000;
    long long min_frequency = 2;
};

// Greedy BPE on pre-split documents. Merges are counted and applied
// within segments only. Tie-break on equal pair count: byte-wise smaller
// left token, then smaller right token, so training is deterministic for
// a fixed corpus order. analyzer is required exactly for morpheme_byte.
Vocabulary train(const std::vector<pipeline::Document>& corpus, const TrainOptions& opts,
                 const seg::MorphemeAnalyzer* analyzer);

// Same trainer, entered below the pre-split step. Each string is one
// segment; merges never cross entries.
Vocabulary train_from_segments(const std::vector<std::string>& segments,
                               const TrainOptions& opts);

// Caches the merge-rank table; encode applies the lowest-ranked applicable
// merge within each segment until none applies.
class Encoder {
public:
    explicit Encoder(const Vocabulary& vocab, const seg::MorphemeAnalyzer* analyzer = nullptr);

    std::vector<int> encode(std::string_view text) const;

    // Token ids for one already-isolated segment.
    std::vector<int> encode_segment(std::string_view segment) const;

private:
    const Vocabulary& vocab_;
    const seg::MorphemeAnalyzer* analyzer_;
    struct PairHash {
        std::size_t operator()(const std::pair<std::string, std::string>& p) const;
    };
    std::unordered_map<std::pair<std::string, std::string>, int, PairHash> rank_;
};

std::vector<int> encode(std::string_view text, const Vocabulary& vocab,
                        const seg::MorphemeAnalyzer* analyzer = nullptr);

struct DecodeResult {
    std::string text;
    bool lossy = false;  // byte modes: ids stopped mid-character
};

// Concatenates token byte strings. Byte modes reproduce encoded input
// exactly; char mode renders UNK as U+FFFD.
DecodeResult decode(const std::vector<int>& ids, const Vocabulary& vocab);

struct TokenizationReport {
    long long token_count = 0;
    long long char_count = 0;
    long long oov_count = 0;

    double fertility() const {
        return char_count > 0 ? static_cast<double>(token_count) / static_cast<double>(char_count)
                              : 0.0;
    }
};

// Aggregated fertility/OOV statistics per mode over an evaluation stream.
std::map<TokenizerMode, TokenizationReport> compare_modes(
    const std::vector<pipeline::Document>& eval_docs,
    const std::map<TokenizerMode, const Vocabulary*>& vocabs,
    const seg::MorphemeAnalyzer* analyzer);

// Vocab file: versioned JSON {version, mode, alphabet, merges, tokens,
// specials}. Token bytes that are not printable ASCII or valid UTF-8 are
// written as \xHH escapes so the file stays human-diffable.
void save(const Vocabulary& vocab, std::ostream& out);
void save(const Vocabulary& vocab, const std::string& path);
Vocabulary load(std::istream& in, const std::string& name = "<stream>");
Vocabulary load(const std::string& path);

std::string escape_token(std::string_view raw);
std::string unescape_token(std::string_view escaped, const std::string& diag);

// The segment byte strings encode() would operate on, in order.
std::vector<std::string> presplit_for_mode(std::string_view text, TokenizerMode mode,
                                           const seg::MorphemeAnalyzer* analyzer);

}  // namespace morphobpe::bpe
