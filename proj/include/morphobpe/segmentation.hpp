#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace morphobpe::seg {

enum class SegmentKind { KoreanMorpheme, ForeignWord, Whitespace, Other };

const char* to_string(SegmentKind kind);

// A byte span of the pre-split. Concatenating the segments of a pre-split,
// in order, reproduces the input byte-exactly; BPE merges never cross a
// segment boundary.
struct Segment {
    std::string bytes;
    SegmentKind kind = SegmentKind::Other;

    bool operator==(const Segment&) const = default;
};

// Splits one word into morphemes whose concatenation equals the word.
// Implementations never split inside a non-Hangul run. Instances are
// immutable after construction and callable from many threads.
class MorphemeAnalyzer {
public:
    virtual ~MorphemeAnalyzer() = default;
    virtual std::vector<std::string> segment_word(const std::string& word) const = 0;
};

// Pre-splits text by whitespace and, for Hangul runs, by morpheme
// boundaries from the analyzer. A single ASCII space directly before a
// word is detached from its whitespace run and carried as the word's
// leading byte, so frequent " 단어" patterns stay mergeable while the
// partition stays lossless. Throws DecodingError on invalid UTF-8.
std::vector<Segment> presplit(std::string_view text, const MorphemeAnalyzer& analyzer);

// Whitespace-only pre-split used by the plain byte / char tokenizer
// modes. attach_space selects the word-initial space convention above.
std::vector<Segment> presplit_whitespace(std::string_view text, bool attach_space);

// Longest-suffix-match analyzer over a bundled particle/ending list.
// One split at most: word -> [stem, suffix]. A candidate suffix is taken
// only when the stem is itself stable under re-analysis, which keeps
// presplit idempotent on its own output segments. Pair particles whose
// written form depends on the final consonant of the preceding syllable
// (은/는, 이/가, 을/를, 과/와, 으로/로) are matched only where that
// constraint holds.
class SuffixAnalyzer : public MorphemeAnalyzer {
public:
    explicit SuffixAnalyzer(std::vector<std::string> suffixes);

    std::vector<std::string> segment_word(const std::string& word) const override;

    const std::vector<std::string>& suffixes() const { return suffixes_; }

private:
    bool splits(const std::string& word) const;

    std::vector<std::string> suffixes_;  // by byte length desc, then bytes asc
};

// The bundled suffix inventory (josa and verbal endings).
const std::vector<std::string>& default_suffix_list();

std::shared_ptr<const MorphemeAnalyzer> default_analyzer();

// Loads a suffix list: UTF-8, one suffix per line, '#' starts a comment.
std::shared_ptr<const MorphemeAnalyzer> suffix_analyzer_from_file(const std::string& path);

// Adapter around an external analyzer process speaking a line protocol:
// one word per input line, space-separated morphemes per output line.
// If the tool's output does not concatenate back to the word, the word is
// kept unsplit and a warning counter is bumped. Access to the child
// process is serialized; spawn failure throws ConfigError.
class ExternalAnalyzer : public MorphemeAnalyzer {
public:
    explicit ExternalAnalyzer(const std::string& command);
    ~ExternalAnalyzer() override;

    ExternalAnalyzer(const ExternalAnalyzer&) = delete;
    ExternalAnalyzer& operator=(const ExternalAnalyzer&) = delete;

    std::vector<std::string> segment_word(const std::string& word) const override;

    std::uint64_t fallback_count() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

std::shared_ptr<const MorphemeAnalyzer> external_analyzer(const std::string& command);

}  // namespace morphobpe::seg
