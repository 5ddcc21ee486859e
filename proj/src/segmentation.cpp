#include "morphobpe/segmentation.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <unordered_map>
#include <unordered_set>

#include "morphobpe/errors.hpp"
#include "morphobpe/lineproc.hpp"
#include "morphobpe/utf8.hpp"

namespace morphobpe::seg {

const char* to_string(SegmentKind kind) {
    switch (kind) {
        case SegmentKind::KoreanMorpheme: return "korean_morpheme";
        case SegmentKind::ForeignWord: return "foreign_word";
        case SegmentKind::Whitespace: return "whitespace";
        case SegmentKind::Other: return "other";
    }
    return "other";
}

namespace {

struct Run {
    std::string bytes;
    bool is_ws = false;
    bool leading_space = false;  // non-ws runs only; the space is already in bytes
};

// Steps 1-2 of the pre-split: maximal whitespace/non-whitespace runs, then
// a single ASCII space directly before a word moves onto that word.
std::vector<Run> split_runs(std::string_view text, bool attach_space) {
    std::vector<Run> runs;
    std::size_t i = 0;
    while (i < text.size()) {
        const std::size_t start = i;
        std::size_t peek = i;
        const bool ws = utf8::is_space(utf8::decode_at(text, peek));
        i = peek;
        while (i < text.size()) {
            peek = i;
            if (utf8::is_space(utf8::decode_at(text, peek)) != ws) break;
            i = peek;
        }
        runs.push_back({std::string(text.substr(start, i - start)), ws, false});
    }
    if (!attach_space) return runs;
    std::vector<Run> out;
    out.reserve(runs.size());
    for (std::size_t r = 0; r < runs.size(); ++r) {
        Run run = std::move(runs[r]);
        if (!run.is_ws && !out.empty() && out.back().is_ws && out.back().bytes.back() == ' ') {
            out.back().bytes.pop_back();
            run.bytes.insert(run.bytes.begin(), ' ');
            run.leading_space = true;
            if (out.back().bytes.empty()) out.pop_back();
        }
        out.push_back(std::move(run));
    }
    return out;
}

bool all_hangul(std::string_view word) {
    std::size_t i = 0;
    while (i < word.size()) {
        if (!utf8::is_hangul_syllable(utf8::decode_at(word, i))) return false;
    }
    return true;
}

// Non-Hangul sub-runs that are pure ASCII punctuation/symbols rank as
// Other; anything with letters, digits, or non-ASCII content is a word.
SegmentKind classify_foreign(std::string_view bytes) {
    bool wordish = false;
    for (const char c : bytes) {
        const unsigned char b = static_cast<unsigned char>(c);
        if (b >= 0x80 || std::isalnum(b)) {
            wordish = true;
            break;
        }
    }
    return wordish ? SegmentKind::ForeignWord : SegmentKind::Other;
}

SegmentKind classify_run(std::string_view content) {
    std::size_t i = 0;
    while (i < content.size()) {
        if (utf8::is_hangul_syllable(utf8::decode_at(content, i))) {
            return SegmentKind::KoreanMorpheme;
        }
    }
    return classify_foreign(content);
}

// Splits a non-whitespace run into maximal Hangul / non-Hangul sub-runs,
// feeding Hangul sub-runs through the analyzer.
void emit_word_segments(const Run& run, const MorphemeAnalyzer& analyzer,
                        std::vector<Segment>& out) {
    const std::string_view content =
        std::string_view(run.bytes).substr(run.leading_space ? 1 : 0);
    std::vector<Segment> pieces;
    std::size_t i = 0;
    while (i < content.size()) {
        const std::size_t start = i;
        std::size_t peek = i;
        const bool hangul = utf8::is_hangul_syllable(utf8::decode_at(content, peek));
        i = peek;
        while (i < content.size()) {
            peek = i;
            if (utf8::is_hangul_syllable(utf8::decode_at(content, peek)) != hangul) break;
            i = peek;
        }
        const std::string sub(content.substr(start, i - start));
        if (!hangul) {
            pieces.push_back({sub, classify_foreign(sub)});
            continue;
        }
        std::vector<std::string> morphemes = analyzer.segment_word(sub);
        std::string concat;
        for (const auto& m : morphemes) concat += m;
        if (morphemes.empty() || concat != sub) {
            morphemes = {sub};  // analyzer broke the partition contract
        }
        for (auto& m : morphemes) {
            pieces.push_back({std::move(m), SegmentKind::KoreanMorpheme});
        }
    }
    if (run.leading_space && !pieces.empty()) {
        pieces.front().bytes.insert(pieces.front().bytes.begin(), ' ');
    }
    for (auto& p : pieces) out.push_back(std::move(p));
}

}  // namespace

std::vector<Segment> presplit(std::string_view text, const MorphemeAnalyzer& analyzer) {
    utf8::require_valid(text, "presplit input");
    std::vector<Segment> out;
    for (const Run& run : split_runs(text, /*attach_space=*/true)) {
        if (run.is_ws) {
            out.push_back({run.bytes, SegmentKind::Whitespace});
        } else {
            emit_word_segments(run, analyzer, out);
        }
    }
    return out;
}

std::vector<Segment> presplit_whitespace(std::string_view text, bool attach_space) {
    utf8::require_valid(text, "presplit input");
    std::vector<Segment> out;
    for (const Run& run : split_runs(text, attach_space)) {
        if (run.is_ws) {
            out.push_back({run.bytes, SegmentKind::Whitespace});
        } else {
            const std::string_view content =
                std::string_view(run.bytes).substr(run.leading_space ? 1 : 0);
            out.push_back({run.bytes, classify_run(content)});
        }
    }
    return out;
}

namespace {

// Written form of the pair particles depends on whether the preceding
// syllable has a final consonant (batchim).
enum class Phonology { Any, AfterFinal, AfterVowel, AfterVowelOrRieul, AfterFinalNotRieul };

const std::unordered_map<std::string, Phonology>& phonology_table() {
    static const std::unordered_map<std::string, Phonology> table = {
        {"은", Phonology::AfterFinal},   {"는", Phonology::AfterVowel},
        {"이", Phonology::AfterFinal},   {"가", Phonology::AfterVowel},
        {"을", Phonology::AfterFinal},   {"를", Phonology::AfterVowel},
        {"과", Phonology::AfterFinal},   {"와", Phonology::AfterVowel},
        {"아", Phonology::AfterFinal},   {"야", Phonology::AfterVowel},
        {"이나", Phonology::AfterFinal}, {"나", Phonology::AfterVowel},
        {"이랑", Phonology::AfterFinal}, {"랑", Phonology::AfterVowel},
        {"이라도", Phonology::AfterFinal}, {"라도", Phonology::AfterVowel},
        {"이며", Phonology::AfterFinal}, {"며", Phonology::AfterVowel},
        {"으로", Phonology::AfterFinalNotRieul}, {"로", Phonology::AfterVowelOrRieul},
        {"으로서", Phonology::AfterFinalNotRieul}, {"로서", Phonology::AfterVowelOrRieul},
        {"으로써", Phonology::AfterFinalNotRieul}, {"로써", Phonology::AfterVowelOrRieul},
        {"요", Phonology::AfterVowel},
    };
    return table;
}

// Jongseong index of a Hangul syllable; 0 = open syllable, 8 = final rieul.
inline int jongseong(char32_t cp) { return static_cast<int>((cp - 0xAC00) % 28); }

bool phonology_ok(const std::string& suffix, char32_t prev_syllable) {
    const auto it = phonology_table().find(suffix);
    const Phonology p = it == phonology_table().end() ? Phonology::Any : it->second;
    const int jong = jongseong(prev_syllable);
    switch (p) {
        case Phonology::Any: return true;
        case Phonology::AfterFinal: return jong != 0;
        case Phonology::AfterVowel: return jong == 0;
        case Phonology::AfterVowelOrRieul: return jong == 0 || jong == 8;
        case Phonology::AfterFinalNotRieul: return jong != 0 && jong != 8;
    }
    return true;
}

char32_t last_scalar(std::string_view s) {
    char32_t cp = 0;
    std::size_t i = 0;
    while (i < s.size()) cp = utf8::decode_at(s, i);
    return cp;
}

}  // namespace

SuffixAnalyzer::SuffixAnalyzer(std::vector<std::string> suffixes) {
    std::unordered_set<std::string> seen;
    for (auto& s : suffixes) {
        if (s.empty() || !all_hangul(s)) {
            throw ConfigError("suffix list: entries must be non-empty Hangul: \"" + s + "\"");
        }
        if (seen.insert(s).second) suffixes_.push_back(std::move(s));
    }
    std::sort(suffixes_.begin(), suffixes_.end(), [](const auto& a, const auto& b) {
        if (a.size() != b.size()) return a.size() > b.size();
        return a < b;
    });
}

bool SuffixAnalyzer::splits(const std::string& word) const {
    return segment_word(word).size() > 1;
}

std::vector<std::string> SuffixAnalyzer::segment_word(const std::string& word) const {
    if (word.empty() || !all_hangul(word)) return {word};
    for (const auto& s : suffixes_) {
        if (s == word) return {word};  // a bare particle/ending stays whole
    }
    for (const auto& s : suffixes_) {
        if (s.size() >= word.size()) continue;
        if (word.compare(word.size() - s.size(), s.size(), s) != 0) continue;
        const std::string stem = word.substr(0, word.size() - s.size());
        if (!phonology_ok(s, last_scalar(stem))) continue;
        if (splits(stem)) continue;  // keep re-analysis of the stem stable
        return {stem, s};
    }
    return {word};
}

const std::vector<std::string>& default_suffix_list() {
    // Josa and common verbal/sentence endings, one split per word at most.
    static const std::vector<std::string> list = {
        // case and topic particles
        "은", "는", "이", "가", "을", "를", "의", "도", "만",
        "과", "와", "나", "이나", "랑", "이랑", "며", "이며",
        "라도", "이라도", "로", "으로", "로서", "으로서", "로써", "으로써",
        "에", "에서", "에게", "에게서", "께", "께서", "한테", "한테서",
        "에는", "에도", "에서는", "에서도",
        "부터", "까지", "마다", "처럼", "보다", "조차", "마저", "밖에",
        "부터는", "까지는", "아", "야",
        // sentence and connective endings
        "다", "요", "고", "자",
        "니다", "습니다", "입니다", "합니다", "됩니다",
        "습니까", "합니까", "입니까",
        "는다", "었다", "았다", "했다", "였다", "이다",
        "하다", "하고", "해서", "하는", "하면", "하여",
        "네요", "세요", "어요", "아요", "해요", "지요", "죠",
        "군요", "구나", "거든요", "더라", "습니다만",
    };
    return list;
}

std::shared_ptr<const MorphemeAnalyzer> default_analyzer() {
    static const std::shared_ptr<const MorphemeAnalyzer> instance =
        std::make_shared<SuffixAnalyzer>(default_suffix_list());
    return instance;
}

std::shared_ptr<const MorphemeAnalyzer> suffix_analyzer_from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("suffix list: cannot open " + path);
    std::vector<std::string> suffixes;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        while (!line.empty() && (line.back() == ' ' || line.back() == '\t' || line.back() == '\r')) {
            line.pop_back();
        }
        std::size_t start = 0;
        while (start < line.size() && (line[start] == ' ' || line[start] == '\t')) ++start;
        line.erase(0, start);
        if (line.empty()) continue;
        if (!utf8::is_valid(line)) {
            throw ConfigError("suffix list: invalid UTF-8 at " + path + ":" +
                              std::to_string(line_no));
        }
        suffixes.push_back(line);
    }
    return std::make_shared<SuffixAnalyzer>(std::move(suffixes));
}

struct ExternalAnalyzer::Impl {
    explicit Impl(const std::string& cmd) : proc(cmd) {}
    mutable LineProcess proc;
    mutable std::atomic<std::uint64_t> fallbacks{0};
};

ExternalAnalyzer::ExternalAnalyzer(const std::string& command)
    : impl_(std::make_unique<Impl>(command)) {}

ExternalAnalyzer::~ExternalAnalyzer() = default;

std::vector<std::string> ExternalAnalyzer::segment_word(const std::string& word) const {
    if (word.empty()) return {word};
    // The analyzer contract leaves non-Korean runs alone; don't bother the child.
    if (!all_hangul(word)) return {word};
    const auto reply = impl_->proc.exchange(word);
    if (!reply) {
        impl_->fallbacks.fetch_add(1, std::memory_order_relaxed);
        return {word};
    }
    std::vector<std::string> morphemes;
    std::string concat;
    std::size_t i = 0;
    while (i < reply->size()) {
        const std::size_t sp = reply->find(' ', i);
        const std::size_t end = sp == std::string::npos ? reply->size() : sp;
        if (end > i) {
            morphemes.push_back(reply->substr(i, end - i));
            concat += morphemes.back();
        }
        i = end + 1;
    }
    if (morphemes.empty() || concat != word) {
        impl_->fallbacks.fetch_add(1, std::memory_order_relaxed);
        return {word};
    }
    return morphemes;
}

std::uint64_t ExternalAnalyzer::fallback_count() const {
    return impl_->fallbacks.load(std::memory_order_relaxed);
}

std::shared_ptr<const MorphemeAnalyzer> external_analyzer(const std::string& command) {
    return std::make_shared<ExternalAnalyzer>(command);
}

}  // namespace morphobpe::seg
