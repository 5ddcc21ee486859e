#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace morphobpe::utf8 {

// Returns the byte offset of the first invalid sequence, or npos if valid.
std::size_t find_invalid(std::string_view s);

// Byte length of the valid UTF-8 sequence starting at offset i, or 0 when
// the bytes there do not form one.
std::size_t sequence_length_at(std::string_view s, std::size_t i);

bool is_valid(std::string_view s);

// Throws DecodingError naming the byte offset when s is not valid UTF-8.
void require_valid(std::string_view s, const char* what);

// Decodes the scalar starting at byte offset i (assumes valid input) and
// advances i past it.
char32_t decode_at(std::string_view s, std::size_t& i);

std::string encode(char32_t cp);

std::size_t scalar_count(std::string_view s);

std::vector<char32_t> scalars(std::string_view s);

// Byte ranges [begin, end) of grapheme clusters. Approximate clustering:
// a base scalar absorbs combining marks and variation selectors, ZWJ joins
// the surrounding clusters, and decomposed Hangul jamo runs form L*V*T*
// syllable blocks. Precomposed Hangul syllables are single scalars already.
std::vector<std::pair<std::size_t, std::size_t>> grapheme_ranges(std::string_view s);

inline bool is_hangul_syllable(char32_t cp) { return cp >= 0xAC00 && cp <= 0xD7A3; }

bool is_space(char32_t cp);

}  // namespace morphobpe::utf8
