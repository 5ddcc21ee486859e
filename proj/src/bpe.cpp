#include "morphobpe/bpe.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <unordered_set>

#include <json.hpp>

#include "morphobpe/errors.hpp"
#include "morphobpe/hash.hpp"
#include "morphobpe/utf8.hpp"

namespace morphobpe::bpe {

using nlohmann::json;

const char* to_string(TokenizerMode mode) {
    switch (mode) {
        case TokenizerMode::MorphemeByte: return "morpheme_byte";
        case TokenizerMode::Byte: return "byte";
        case TokenizerMode::Char: return "char";
    }
    return "byte";
}

std::optional<TokenizerMode> mode_from_string(std::string_view name) {
    if (name == "morpheme_byte") return TokenizerMode::MorphemeByte;
    if (name == "byte") return TokenizerMode::Byte;
    if (name == "char") return TokenizerMode::Char;
    return std::nullopt;
}

std::optional<int> Vocabulary::unk_id() const {
    const auto it = specials.find("unk");
    if (it == specials.end()) return std::nullopt;
    return it->second;
}

std::vector<std::string> presplit_for_mode(std::string_view text, TokenizerMode mode,
                                           const seg::MorphemeAnalyzer* analyzer) {
    if (mode == TokenizerMode::MorphemeByte && analyzer == nullptr) {
        throw ConfigError("morpheme_byte mode requires a morpheme analyzer");
    }
    if (mode != TokenizerMode::MorphemeByte && analyzer != nullptr) {
        throw ConfigError("analyzer given for a mode that does not use one");
    }
    std::vector<seg::Segment> segs;
    switch (mode) {
        case TokenizerMode::MorphemeByte: segs = seg::presplit(text, *analyzer); break;
        case TokenizerMode::Byte: segs = seg::presplit_whitespace(text, true); break;
        case TokenizerMode::Char: segs = seg::presplit_whitespace(text, false); break;
    }
    std::vector<std::string> out;
    out.reserve(segs.size());
    for (auto& s : segs) out.push_back(std::move(s.bytes));
    return out;
}

namespace {

// Initial symbol sequence of one segment: single bytes in the byte modes,
// single scalars in char mode.
std::vector<std::string> atomize(std::string_view segment, TokenizerMode mode) {
    std::vector<std::string> syms;
    if (mode == TokenizerMode::Char) {
        std::size_t i = 0;
        while (i < segment.size()) {
            const std::size_t start = i;
            utf8::decode_at(segment, i);
            syms.emplace_back(segment.substr(start, i - start));
        }
    } else {
        syms.reserve(segment.size());
        for (const char c : segment) syms.emplace_back(1, c);
    }
    return syms;
}

struct IntPairHash {
    std::size_t operator()(const std::pair<int, int>& p) const {
        return static_cast<std::size_t>(
            mix64((static_cast<std::uint64_t>(static_cast<std::uint32_t>(p.first)) << 32) |
                  static_cast<std::uint32_t>(p.second)));
    }
};

struct Trainer {
    TokenizerMode mode;
    std::vector<std::string> sym_str;
    std::unordered_map<std::string, int> sym_id;

    struct Item {
        std::vector<int> syms;
        long long count = 0;
    };
    std::vector<Item> items;

    std::unordered_map<std::pair<int, int>, long long, IntPairHash> pair_counts;
    std::unordered_map<std::pair<int, int>, std::unordered_set<std::size_t>, IntPairHash>
        pair_items;

    int intern(const std::string& s) {
        const auto it = sym_id.find(s);
        if (it != sym_id.end()) return it->second;
        const int id = static_cast<int>(sym_str.size());
        sym_str.push_back(s);
        sym_id.emplace(s, id);
        return id;
    }

    void add_pairs(std::size_t idx, long long sign) {
        const Item& item = items[idx];
        for (std::size_t i = 0; i + 1 < item.syms.size(); ++i) {
            const std::pair<int, int> p{item.syms[i], item.syms[i + 1]};
            auto it = pair_counts.find(p);
            if (it == pair_counts.end()) {
                it = pair_counts.emplace(p, 0).first;
            }
            it->second += sign * item.count;
            if (it->second <= 0) {
                pair_counts.erase(it);
            } else if (sign > 0) {
                pair_items[p].insert(idx);
            }
        }
    }

    // Left-to-right, non-overlapping replacement of (a, b) by m.
    static std::vector<int> apply_merge(const std::vector<int>& syms, int a, int b, int m) {
        std::vector<int> out;
        out.reserve(syms.size());
        std::size_t i = 0;
        while (i < syms.size()) {
            if (i + 1 < syms.size() && syms[i] == a && syms[i + 1] == b) {
                out.push_back(m);
                i += 2;
            } else {
                out.push_back(syms[i]);
                ++i;
            }
        }
        return out;
    }

    // Highest count wins; ties fall to the byte-wise smaller left token,
    // then the smaller right token.
    bool better(const std::pair<int, int>& a, long long ca, const std::pair<int, int>& b,
                long long cb) const {
        if (ca != cb) return ca > cb;
        const std::string& al = sym_str[a.first];
        const std::string& bl = sym_str[b.first];
        if (al != bl) return al < bl;
        return sym_str[a.second] < sym_str[b.second];
    }
};

}  // namespace

Vocabulary train_from_segments(const std::vector<std::string>& segments,
                               const TrainOptions& opts) {
    if (segments.empty()) {
        throw TrainingError("empty corpus: nothing to train on");
    }

    Vocabulary vocab;
    vocab.mode = opts.mode;

    Trainer tr;
    tr.mode = opts.mode;

    // Alphabet and specials define the id floor.
    if (opts.mode == TokenizerMode::Char) {
        vocab.specials["unk"] = 0;
        std::unordered_set<std::string> seen;
        std::vector<std::string> chars;
        for (const auto& segment : segments) {
            for (auto& c : atomize(segment, opts.mode)) {
                if (seen.insert(c).second) chars.push_back(std::move(c));
            }
        }
        std::sort(chars.begin(), chars.end());
        vocab.alphabet = std::move(chars);
    } else {
        vocab.alphabet.reserve(256);
        for (int b = 0; b < 256; ++b) {
            vocab.alphabet.emplace_back(1, static_cast<char>(static_cast<unsigned char>(b)));
        }
    }

    const int floor_size =
        static_cast<int>(vocab.alphabet.size()) + static_cast<int>(vocab.specials.size());
    if (opts.vocab_size <= floor_size) {
        throw ConfigError("vocab_size " + std::to_string(opts.vocab_size) +
                          " must exceed alphabet+specials size " + std::to_string(floor_size));
    }

    for (const auto& [name, id] : vocab.specials) {
        vocab.id_to_token.push_back("<" + name + ">");
        vocab.token_to_id.emplace(vocab.id_to_token.back(), id);
    }
    for (const auto& a : vocab.alphabet) {
        vocab.token_to_id.emplace(a, static_cast<int>(vocab.id_to_token.size()));
        vocab.id_to_token.push_back(a);
    }

    // Aggregate identical segments; only counts matter to the statistics.
    {
        std::unordered_map<std::string, std::size_t> index;
        for (const auto& segment : segments) {
            if (segment.empty()) continue;
            if (opts.mode == TokenizerMode::Char) {
                utf8::require_valid(segment, "training segment");
            }
            const auto it = index.find(segment);
            if (it != index.end()) {
                tr.items[it->second].count += 1;
                continue;
            }
            Trainer::Item item;
            for (const auto& s : atomize(segment, opts.mode)) item.syms.push_back(tr.intern(s));
            item.count = 1;
            index.emplace(segment, tr.items.size());
            tr.items.push_back(std::move(item));
        }
    }
    if (tr.items.empty()) {
        throw TrainingError("empty corpus: nothing to train on");
    }

    for (std::size_t i = 0; i < tr.items.size(); ++i) tr.add_pairs(i, +1);

    while (vocab.size() < opts.vocab_size) {
        bool have = false;
        std::pair<int, int> best{0, 0};
        long long best_count = 0;
        for (const auto& [p, c] : tr.pair_counts) {
            if (!have || tr.better(p, c, best, best_count)) {
                have = true;
                best = p;
                best_count = c;
            }
        }
        if (!have || best_count < opts.min_frequency) break;

        const std::string& left = tr.sym_str[best.first];
        const std::string& right = tr.sym_str[best.second];
        const std::string merged_str = left + right;
        vocab.merges.emplace_back(left, right);
        if (!vocab.token_to_id.contains(merged_str)) {
            vocab.token_to_id.emplace(merged_str, static_cast<int>(vocab.id_to_token.size()));
            vocab.id_to_token.push_back(merged_str);
        }

        const int merged_sym = tr.intern(merged_str);
        // pair_items may hold stale indices; rewriting an item without the
        // pair is a no-op either way.
        const auto it = tr.pair_items.find(best);
        if (it != tr.pair_items.end()) {
            const std::vector<std::size_t> touched(it->second.begin(), it->second.end());
            tr.pair_items.erase(it);
            for (const std::size_t idx : touched) {
                tr.add_pairs(idx, -1);
                tr.items[idx].syms =
                    Trainer::apply_merge(tr.items[idx].syms, best.first, best.second, merged_sym);
                tr.add_pairs(idx, +1);
            }
        }
        tr.pair_counts.erase(best);
    }

    return vocab;
}

Vocabulary train(const std::vector<pipeline::Document>& corpus, const TrainOptions& opts,
                 const seg::MorphemeAnalyzer* analyzer) {
    if (corpus.empty()) {
        throw TrainingError("empty corpus: nothing to train on");
    }
    std::vector<std::string> segments;
    for (const auto& doc : corpus) {
        auto segs = presplit_for_mode(doc.body, opts.mode, analyzer);
        segments.insert(segments.end(), std::make_move_iterator(segs.begin()),
                        std::make_move_iterator(segs.end()));
    }
    return train_from_segments(segments, opts);
}

std::size_t Encoder::PairHash::operator()(const std::pair<std::string, std::string>& p) const {
    return static_cast<std::size_t>(fnv1a64(p.second, fnv1a64(p.first) ^ 0x9E3779B97F4A7C15ULL));
}

Encoder::Encoder(const Vocabulary& vocab, const seg::MorphemeAnalyzer* analyzer)
    : vocab_(vocab), analyzer_(analyzer) {
    if (vocab_.mode == TokenizerMode::MorphemeByte && analyzer_ == nullptr) {
        throw ConfigError("morpheme_byte vocabulary requires a morpheme analyzer");
    }
    if (vocab_.mode != TokenizerMode::MorphemeByte && analyzer_ != nullptr) {
        throw ConfigError("analyzer given for a mode that does not use one");
    }
    rank_.reserve(vocab_.merges.size());
    for (std::size_t r = 0; r < vocab_.merges.size(); ++r) {
        rank_.emplace(vocab_.merges[r], static_cast<int>(r));
    }
}

std::vector<int> Encoder::encode_segment(std::string_view segment) const {
    std::vector<std::string> syms = atomize(segment, vocab_.mode);
    while (syms.size() > 1) {
        int best_rank = std::numeric_limits<int>::max();
        for (std::size_t i = 0; i + 1 < syms.size(); ++i) {
            const auto it = rank_.find({syms[i], syms[i + 1]});
            if (it != rank_.end() && it->second < best_rank) best_rank = it->second;
        }
        if (best_rank == std::numeric_limits<int>::max()) break;
        const auto& [left, right] = vocab_.merges[static_cast<std::size_t>(best_rank)];
        std::vector<std::string> next;
        next.reserve(syms.size());
        std::size_t i = 0;
        while (i < syms.size()) {
            if (i + 1 < syms.size() && syms[i] == left && syms[i + 1] == right) {
                next.push_back(left + right);
                i += 2;
            } else {
                next.push_back(std::move(syms[i]));
                ++i;
            }
        }
        syms = std::move(next);
    }

    std::vector<int> ids;
    ids.reserve(syms.size());
    const auto unk = vocab_.unk_id();
    for (const auto& s : syms) {
        const auto it = vocab_.token_to_id.find(s);
        if (it != vocab_.token_to_id.end()) {
            ids.push_back(it->second);
        } else if (vocab_.mode == TokenizerMode::Char && unk) {
            ids.push_back(*unk);
        } else {
            // Byte-mode alphabets are total; a miss means a broken vocabulary.
            throw InputError("vocabulary has no token for a base symbol");
        }
    }
    return ids;
}

std::vector<int> Encoder::encode(std::string_view text) const {
    std::vector<int> ids;
    for (const auto& segment : presplit_for_mode(text, vocab_.mode, analyzer_)) {
        auto part = encode_segment(segment);
        ids.insert(ids.end(), part.begin(), part.end());
    }
    return ids;
}

std::vector<int> encode(std::string_view text, const Vocabulary& vocab,
                        const seg::MorphemeAnalyzer* analyzer) {
    return Encoder(vocab, analyzer).encode(text);
}

DecodeResult decode(const std::vector<int>& ids, const Vocabulary& vocab) {
    DecodeResult result;
    const auto unk = vocab.unk_id();
    for (const int id : ids) {
        if (id < 0 || id >= vocab.size()) {
            throw InputError("token id " + std::to_string(id) + " out of range [0, " +
                             std::to_string(vocab.size()) + ")");
        }
        if (vocab.mode == TokenizerMode::Char && unk && id == *unk) {
            result.text += "\xEF\xBF\xBD";  // U+FFFD
            continue;
        }
        result.text += vocab.id_to_token[static_cast<std::size_t>(id)];
    }
    if (vocab.mode != TokenizerMode::Char && !utf8::is_valid(result.text)) {
        result.lossy = true;
    }
    return result;
}

std::map<TokenizerMode, TokenizationReport> compare_modes(
    const std::vector<pipeline::Document>& eval_docs,
    const std::map<TokenizerMode, const Vocabulary*>& vocabs,
    const seg::MorphemeAnalyzer* analyzer) {
    std::map<TokenizerMode, TokenizationReport> reports;
    for (const auto& [mode, vocab] : vocabs) {
        if (vocab == nullptr || vocab->mode != mode) {
            throw ConfigError(std::string("vocabulary does not match requested mode ") +
                              to_string(mode));
        }
        const Encoder enc(*vocab,
                          mode == TokenizerMode::MorphemeByte ? analyzer : nullptr);
        const auto unk = vocab->unk_id();
        TokenizationReport report;
        for (const auto& doc : eval_docs) {
            const auto ids = enc.encode(doc.body);
            report.token_count += static_cast<long long>(ids.size());
            report.char_count += static_cast<long long>(utf8::scalar_count(doc.body));
            if (unk) {
                report.oov_count += std::count(ids.begin(), ids.end(), *unk);
            }
        }
        reports.emplace(mode, report);
    }
    return reports;
}

std::string escape_token(std::string_view raw) {
    static const char* hex = "0123456789abcdef";
    std::string out;
    std::size_t i = 0;
    while (i < raw.size()) {
        const unsigned char b = static_cast<unsigned char>(raw[i]);
        if (b == '\\') {
            out += "\\x5c";
            ++i;
            continue;
        }
        if (b >= 0x20 && b <= 0x7E) {
            out.push_back(static_cast<char>(b));
            ++i;
            continue;
        }
        if (b >= 0x80) {
            const std::size_t len = utf8::sequence_length_at(raw, i);
            if (len > 0) {
                out.append(raw.substr(i, len));
                i += len;
                continue;
            }
        }
        out += "\\x";
        out.push_back(hex[b >> 4]);
        out.push_back(hex[b & 0xF]);
        ++i;
    }
    return out;
}

std::string unescape_token(std::string_view escaped, const std::string& diag) {
    std::string out;
    std::size_t i = 0;
    while (i < escaped.size()) {
        if (escaped[i] != '\\') {
            out.push_back(escaped[i]);
            ++i;
            continue;
        }
        if (i + 3 >= escaped.size() || escaped[i + 1] != 'x') {
            throw ParseError(diag + ": bad token escape in \"" + std::string(escaped) + "\"");
        }
        auto nibble = [&](char c) -> int {
            if (c >= '0' && c <= '9') return c - '0';
            if (c >= 'a' && c <= 'f') return c - 'a' + 10;
            if (c >= 'A' && c <= 'F') return c - 'A' + 10;
            return -1;
        };
        const int hi = nibble(escaped[i + 2]);
        const int lo = nibble(escaped[i + 3]);
        if (hi < 0 || lo < 0) {
            throw ParseError(diag + ": bad token escape in \"" + std::string(escaped) + "\"");
        }
        out.push_back(static_cast<char>((hi << 4) | lo));
        i += 4;
    }
    return out;
}

void save(const Vocabulary& vocab, std::ostream& out) {
    json j;
    j["version"] = 1;
    j["mode"] = to_string(vocab.mode);
    json alphabet = json::array();
    for (const auto& a : vocab.alphabet) alphabet.push_back(escape_token(a));
    j["alphabet"] = std::move(alphabet);
    json merges = json::array();
    for (const auto& [l, r] : vocab.merges) {
        merges.push_back(json::array({escape_token(l), escape_token(r)}));
    }
    j["merges"] = std::move(merges);
    json tokens = json::object();
    for (int id = 0; id < vocab.size(); ++id) {
        tokens[escape_token(vocab.id_to_token[static_cast<std::size_t>(id)])] = id;
    }
    j["tokens"] = std::move(tokens);
    j["specials"] = json::object();
    for (const auto& [name, id] : vocab.specials) j["specials"][name] = id;
    out << j.dump(2) << '\n';
}

void save(const Vocabulary& vocab, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot write vocab file " + path);
    save(vocab, out);
}

Vocabulary load(std::istream& in, const std::string& name) {
    json j = json::parse(in, nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
        throw ParseError(name + ": not a JSON object");
    }
    if (!j.contains("version") || !j["version"].is_number_integer() || j["version"] != 1) {
        throw ParseError(name + ": missing or unsupported \"version\" (expected 1)");
    }
    for (const char* key : {"mode", "alphabet", "merges", "tokens", "specials"}) {
        if (!j.contains(key)) throw ParseError(name + ": missing field \"" + key + "\"");
    }
    Vocabulary vocab;
    const auto mode = mode_from_string(j["mode"].get_ref<const std::string&>());
    if (!mode) throw ParseError(name + ": unknown mode \"" + j["mode"].get<std::string>() + "\"");
    vocab.mode = *mode;

    if (!j["tokens"].is_object() || j["tokens"].empty()) {
        throw ParseError(name + ": \"tokens\" must be a non-empty object");
    }
    const std::size_t n_tokens = j["tokens"].size();
    vocab.id_to_token.assign(n_tokens, {});
    std::vector<bool> seen(n_tokens, false);
    for (const auto& [escaped, idj] : j["tokens"].items()) {
        if (!idj.is_number_integer()) {
            throw ParseError(name + ": token id for \"" + escaped + "\" must be an integer");
        }
        const long long id = idj.get<long long>();
        if (id < 0 || id >= static_cast<long long>(n_tokens)) {
            throw ParseError(name + ": token ids must be dense in [0, " +
                             std::to_string(n_tokens) + "); got " + std::to_string(id));
        }
        if (seen[static_cast<std::size_t>(id)]) {
            throw ParseError(name + ": duplicate token id " + std::to_string(id));
        }
        seen[static_cast<std::size_t>(id)] = true;
        vocab.id_to_token[static_cast<std::size_t>(id)] = unescape_token(escaped, name);
    }
    for (std::size_t id = 0; id < n_tokens; ++id) {
        vocab.token_to_id.emplace(vocab.id_to_token[id], static_cast<int>(id));
    }
    if (vocab.token_to_id.size() != n_tokens) {
        throw ParseError(name + ": duplicate token strings after unescaping");
    }

    if (!j["alphabet"].is_array()) throw ParseError(name + ": \"alphabet\" must be an array");
    for (const auto& a : j["alphabet"]) {
        if (!a.is_string()) throw ParseError(name + ": alphabet entries must be strings");
        vocab.alphabet.push_back(unescape_token(a.get_ref<const std::string&>(), name));
        if (!vocab.token_to_id.contains(vocab.alphabet.back())) {
            throw ParseError(name + ": alphabet symbol missing from token table");
        }
    }
    if (vocab.mode != TokenizerMode::Char && vocab.alphabet.size() != 256) {
        throw ParseError(name + ": byte-mode alphabet must list all 256 byte values");
    }

    if (!j["merges"].is_array()) throw ParseError(name + ": \"merges\" must be an array");
    std::size_t merge_no = 0;
    for (const auto& m : j["merges"]) {
        ++merge_no;
        if (!m.is_array() || m.size() != 2 || !m[0].is_string() || !m[1].is_string()) {
            throw ParseError(name + ": merge #" + std::to_string(merge_no) +
                             " must be a [left, right] string pair");
        }
        std::string l = unescape_token(m[0].get_ref<const std::string&>(), name);
        std::string r = unescape_token(m[1].get_ref<const std::string&>(), name);
        if (!vocab.token_to_id.contains(l + r)) {
            throw ParseError(name + ": merge #" + std::to_string(merge_no) +
                             " output token missing from token table");
        }
        vocab.merges.emplace_back(std::move(l), std::move(r));
    }

    if (!j["specials"].is_object()) throw ParseError(name + ": \"specials\" must be an object");
    for (const auto& [sname, idj] : j["specials"].items()) {
        if (!idj.is_number_integer()) {
            throw ParseError(name + ": special \"" + sname + "\" id must be an integer");
        }
        const long long id = idj.get<long long>();
        if (id < 0 || id >= static_cast<long long>(n_tokens)) {
            throw ParseError(name + ": special \"" + sname + "\" id out of range");
        }
        vocab.specials[sname] = static_cast<int>(id);
    }
    if (vocab.mode == TokenizerMode::Char) {
        const auto it = vocab.specials.find("unk");
        if (it == vocab.specials.end() || it->second != 0) {
            throw ParseError(name + ": char mode requires the \"unk\" special at id 0");
        }
    }
    return vocab;
}

Vocabulary load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open vocab file " + path);
    return load(in, path);
}

}  // namespace morphobpe::bpe
