#include "morphobpe/utf8.hpp"

#include "morphobpe/errors.hpp"

namespace morphobpe::utf8 {

namespace {

// Length implied by a lead byte, 0 for invalid leads.
inline int seq_len(unsigned char b) {
    if (b < 0x80) return 1;
    if (b < 0xC2) return 0;  // continuation or overlong lead
    if (b < 0xE0) return 2;
    if (b < 0xF0) return 3;
    if (b < 0xF5) return 4;
    return 0;
}

inline bool is_cont(unsigned char b) { return (b & 0xC0) == 0x80; }

}  // namespace

std::size_t sequence_length_at(std::string_view s, std::size_t i) {
    const std::size_t n = s.size();
    if (i >= n) return 0;
    const unsigned char b0 = static_cast<unsigned char>(s[i]);
    const int len = seq_len(b0);
    if (len == 0) return 0;
    if (len == 1) return 1;
    if (i + len > n) return 0;
    for (int k = 1; k < len; ++k) {
        if (!is_cont(static_cast<unsigned char>(s[i + k]))) return 0;
    }
    const unsigned char b1 = static_cast<unsigned char>(s[i + 1]);
    // Reject overlong forms, surrogates, and > U+10FFFF.
    if (len == 3) {
        if (b0 == 0xE0 && b1 < 0xA0) return 0;
        if (b0 == 0xED && b1 > 0x9F) return 0;
    } else if (len == 4) {
        if (b0 == 0xF0 && b1 < 0x90) return 0;
        if (b0 == 0xF4 && b1 > 0x8F) return 0;
    }
    return static_cast<std::size_t>(len);
}

std::size_t find_invalid(std::string_view s) {
    std::size_t i = 0;
    while (i < s.size()) {
        const std::size_t len = sequence_length_at(s, i);
        if (len == 0) return i;
        i += len;
    }
    return std::string_view::npos;
}

bool is_valid(std::string_view s) { return find_invalid(s) == std::string_view::npos; }

void require_valid(std::string_view s, const char* what) {
    const std::size_t pos = find_invalid(s);
    if (pos != std::string_view::npos) {
        throw DecodingError(std::string(what) + ": invalid UTF-8 at byte offset " +
                            std::to_string(pos));
    }
}

char32_t decode_at(std::string_view s, std::size_t& i) {
    const unsigned char b0 = static_cast<unsigned char>(s[i]);
    const int len = seq_len(b0);
    char32_t cp = 0;
    switch (len) {
        case 1: cp = b0; break;
        case 2: cp = b0 & 0x1F; break;
        case 3: cp = b0 & 0x0F; break;
        default: cp = b0 & 0x07; break;
    }
    for (int k = 1; k < len; ++k) {
        cp = (cp << 6) | (static_cast<unsigned char>(s[i + k]) & 0x3F);
    }
    i += len > 0 ? len : 1;
    return cp;
}

std::string encode(char32_t cp) {
    std::string out;
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
    return out;
}

std::size_t scalar_count(std::string_view s) {
    std::size_t i = 0, n = 0;
    while (i < s.size()) {
        decode_at(s, i);
        ++n;
    }
    return n;
}

std::vector<char32_t> scalars(std::string_view s) {
    std::vector<char32_t> out;
    std::size_t i = 0;
    while (i < s.size()) out.push_back(decode_at(s, i));
    return out;
}

bool is_space(char32_t cp) {
    switch (cp) {
        case 0x09: case 0x0A: case 0x0B: case 0x0C: case 0x0D: case 0x20:
        case 0x85: case 0xA0: case 0x1680:
        case 0x2028: case 0x2029: case 0x202F: case 0x205F: case 0x3000:
            return true;
        default:
            return cp >= 0x2000 && cp <= 0x200A;
    }
}

namespace {

inline bool is_combining(char32_t cp) {
    return (cp >= 0x0300 && cp <= 0x036F) || (cp >= 0x1AB0 && cp <= 0x1AFF) ||
           (cp >= 0x1DC0 && cp <= 0x1DFF) || (cp >= 0x20D0 && cp <= 0x20FF) ||
           (cp >= 0xFE00 && cp <= 0xFE0F) || (cp >= 0xFE20 && cp <= 0xFE2F);
}

inline bool is_jamo_l(char32_t cp) { return cp >= 0x1100 && cp <= 0x115F; }
inline bool is_jamo_v(char32_t cp) { return cp >= 0x1160 && cp <= 0x11A7; }
inline bool is_jamo_t(char32_t cp) { return cp >= 0x11A8 && cp <= 0x11FF; }

constexpr char32_t kZwj = 0x200D;

}  // namespace

std::vector<std::pair<std::size_t, std::size_t>> grapheme_ranges(std::string_view s) {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    std::size_t i = 0;
    while (i < s.size()) {
        const std::size_t start = i;
        char32_t cp = decode_at(s, i);
        bool join_next = (cp == kZwj);
        for (;;) {
            if (i >= s.size()) break;
            std::size_t peek = i;
            const char32_t next = decode_at(s, peek);
            bool extend = false;
            if (join_next) {
                extend = true;
                join_next = false;
            } else if (is_combining(next) || next == kZwj) {
                extend = true;
            } else if (is_jamo_l(cp) && (is_jamo_l(next) || is_jamo_v(next))) {
                extend = true;
            } else if (is_jamo_v(cp) && (is_jamo_v(next) || is_jamo_t(next))) {
                extend = true;
            } else if (is_jamo_t(cp) && is_jamo_t(next)) {
                extend = true;
            }
            if (!extend) break;
            if (next == kZwj) join_next = true;
            cp = next;
            i = peek;
        }
        out.emplace_back(start, i);
    }
    return out;
}

}  // namespace morphobpe::utf8
