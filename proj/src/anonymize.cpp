#include "morphobpe/anonymize.hpp"

#include <cctype>
#include <optional>

namespace morphobpe::pipeline {

const char* to_string(PiiKind kind) {
    switch (kind) {
        case PiiKind::Rrn: return "rrn";
        case PiiKind::Email: return "email";
        case PiiKind::Phone: return "phone";
        case PiiKind::BankAccount: return "bank_account";
        case PiiKind::CreditCard: return "credit_card";
        case PiiKind::Passport: return "passport";
        case PiiKind::DriverLicense: return "driver_license";
    }
    return "unknown";
}

namespace {

inline bool ascii_digit(char c) { return c >= '0' && c <= '9'; }
inline bool ascii_alnum(char c) {
    return ascii_digit(c) || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
}

// Characters that may legally appear in an email local part.
inline bool local_char(char c) {
    return ascii_alnum(c) || c == '.' || c == '_' || c == '%' || c == '+' || c == '-';
}

// Matches never start right after an identifier character or '='; that
// keeps values embedded in already-rendered masks from seeding new
// matches, which is what makes anonymize a fixed point on its own output.
bool boundary_before(std::string_view text, std::size_t pos, bool digit_kind) {
    if (pos == 0) return true;
    const char prev = text[pos - 1];
    if (ascii_alnum(prev) || prev == '=') return false;
    if (digit_kind && (prev == '-' || prev == '.' || prev == '+')) return false;
    return true;
}

// Count of consecutive ASCII digits at pos.
std::size_t digit_run(std::string_view s, std::size_t pos) {
    std::size_t n = 0;
    while (pos + n < s.size() && ascii_digit(s[pos + n])) ++n;
    return n;
}

struct Candidate {
    std::size_t length = 0;
    std::vector<std::pair<std::string, std::string>> retained;
};

std::optional<Candidate> match_rrn(std::string_view s, std::size_t pos) {
    if (!boundary_before(s, pos, true)) return std::nullopt;
    if (digit_run(s, pos) != 6) return std::nullopt;
    if (pos + 6 >= s.size() || s[pos + 6] != '-') return std::nullopt;
    if (digit_run(s, pos + 7) != 7) return std::nullopt;
    const std::size_t end = pos + 14;
    if (end < s.size() && ascii_digit(s[end])) return std::nullopt;
    if (end + 1 < s.size() && s[end] == '-' && ascii_digit(s[end + 1])) return std::nullopt;

    Candidate c;
    c.length = 14;
    const char g = s[pos + 7];
    c.retained.emplace_back("gender", (g - '0') % 2 == 1 ? "M" : "F");
    // Century digit: 1,2 -> 1900s; 3,4 -> 2000s; other codes keep only gender.
    if (g >= '1' && g <= '4') {
        const int century = (g == '1' || g == '2') ? 1900 : 2000;
        const int yy = (s[pos] - '0') * 10 + (s[pos + 1] - '0');
        c.retained.emplace_back("birth_year", std::to_string(century + yy));
    }
    return c;
}

std::optional<Candidate> match_email(std::string_view s, std::size_t pos) {
    if (pos > 0 && local_char(s[pos - 1])) return std::nullopt;
    if (!local_char(s[pos]) || s[pos] == '.' || s[pos] == '-') return std::nullopt;
    std::size_t i = pos;
    while (i < s.size() && local_char(s[i])) ++i;
    if (i == pos || i >= s.size() || s[i] != '@') return std::nullopt;
    const std::size_t domain_start = i + 1;
    std::size_t j = domain_start;
    std::size_t last_dot = std::string_view::npos;
    while (j < s.size() && (ascii_alnum(s[j]) || s[j] == '-' || s[j] == '.')) {
        if (s[j] == '.') last_dot = j;
        ++j;
    }
    while (j > domain_start && (s[j - 1] == '.' || s[j - 1] == '-')) --j;  // trim trailing punct
    if (last_dot >= j) last_dot = std::string_view::npos;
    if (last_dot == std::string_view::npos || last_dot <= domain_start) return std::nullopt;
    // TLD: at least two letters.
    std::size_t letters = 0;
    for (std::size_t k = last_dot + 1; k < j; ++k) {
        if (!(s[k] >= 'a' && s[k] <= 'z') && !(s[k] >= 'A' && s[k] <= 'Z')) return std::nullopt;
        ++letters;
    }
    if (letters < 2) return std::nullopt;

    Candidate c;
    c.length = j - pos;
    c.retained.emplace_back("domain", std::string(s.substr(domain_start, j - domain_start)));
    return c;
}

std::optional<Candidate> match_phone(std::string_view s, std::size_t pos) {
    if (!boundary_before(s, pos, true)) return std::nullopt;
    std::size_t i = pos;
    std::size_t code_len = 0;
    if (s[i] == '+') {
        // International form: +82, then the usual grouping.
        if (s.substr(i, 3) != "+82") return std::nullopt;
        i += 3;
        code_len = 3;
    } else {
        if (s[i] != '0') return std::nullopt;
        const std::size_t run = digit_run(s, i);
        if (run < 2 || run > 3) return std::nullopt;
        i += run;
        code_len = run;
    }
    if (i >= s.size() || (s[i] != '-' && s[i] != '.')) return std::nullopt;
    const char sep = s[i];
    ++i;
    std::size_t run = digit_run(s, i);
    if (s[pos] == '+') {
        // +82 drops the leading zero of the carrier/area code.
        if (run < 1 || run > 2) return std::nullopt;
        i += run;
        if (i >= s.size() || s[i] != sep) return std::nullopt;
        ++i;
        run = digit_run(s, i);
    }
    if (run < 3 || run > 4) return std::nullopt;
    i += run;
    if (i >= s.size() || s[i] != sep) return std::nullopt;
    ++i;
    if (digit_run(s, i) != 4) return std::nullopt;
    i += 4;
    if (i < s.size() && (ascii_digit(s[i]) || (s[i] == sep && i + 1 < s.size() && ascii_digit(s[i + 1])))) {
        return std::nullopt;
    }

    Candidate c;
    c.length = i - pos;
    c.retained.emplace_back("dialing_code", std::string(s.substr(pos, code_len)));
    return c;
}

// Grouped account number: 3 groups of digits joined by '-', 10..16 digits
// total. The group shape also covers RRNs and phone numbers; those kinds
// win their ties by declaration order.
std::optional<Candidate> match_bank_account(std::string_view s, std::size_t pos) {
    if (!boundary_before(s, pos, true)) return std::nullopt;
    std::size_t i = pos;
    std::size_t total = 0;
    const std::size_t g1 = digit_run(s, i);
    if (g1 < 2 || g1 > 6) return std::nullopt;
    i += g1;
    total += g1;
    if (i >= s.size() || s[i] != '-') return std::nullopt;
    ++i;
    const std::size_t g2 = digit_run(s, i);
    if (g2 < 2 || g2 > 6) return std::nullopt;
    i += g2;
    total += g2;
    if (i >= s.size() || s[i] != '-') return std::nullopt;
    ++i;
    const std::size_t g3 = digit_run(s, i);
    if (g3 < 2 || g3 > 8) return std::nullopt;
    i += g3;
    total += g3;
    if (total < 10 || total > 16) return std::nullopt;
    if (i < s.size() && (ascii_digit(s[i]) || (s[i] == '-' && i + 1 < s.size() && ascii_digit(s[i + 1])))) {
        return std::nullopt;
    }
    Candidate c;
    c.length = i - pos;
    return c;
}

std::optional<Candidate> match_credit_card(std::string_view s, std::size_t pos) {
    if (!boundary_before(s, pos, true)) return std::nullopt;
    if (digit_run(s, pos) != 4) return std::nullopt;
    std::size_t i = pos + 4;
    if (i >= s.size() || (s[i] != '-' && s[i] != ' ')) return std::nullopt;
    const char sep = s[i];
    for (int group = 0; group < 3; ++group) {
        if (i >= s.size() || s[i] != sep) return std::nullopt;
        ++i;
        if (digit_run(s, i) != 4) return std::nullopt;
        i += 4;
    }
    if (i < s.size() && (ascii_digit(s[i]) || (s[i] == sep && i + 1 < s.size() && ascii_digit(s[i + 1])))) {
        return std::nullopt;
    }
    Candidate c;
    c.length = i - pos;
    return c;
}

std::optional<Candidate> match_passport(std::string_view s, std::size_t pos) {
    if (pos > 0 && (ascii_alnum(s[pos - 1]) || s[pos - 1] == '=')) return std::nullopt;
    const char t = s[pos];
    if (t != 'M' && t != 'S' && t != 'R' && t != 'O' && t != 'D' && t != 'T') return std::nullopt;
    if (digit_run(s, pos + 1) != 8) return std::nullopt;
    const std::size_t end = pos + 9;
    if (end < s.size() && ascii_alnum(s[end])) return std::nullopt;
    Candidate c;
    c.length = 9;
    return c;
}

std::optional<Candidate> match_driver_license(std::string_view s, std::size_t pos) {
    if (!boundary_before(s, pos, true)) return std::nullopt;
    static constexpr std::size_t groups[4] = {2, 2, 6, 2};
    std::size_t i = pos;
    for (int g = 0; g < 4; ++g) {
        if (digit_run(s, i) != groups[g]) return std::nullopt;
        i += groups[g];
        if (g < 3) {
            if (i >= s.size() || s[i] != '-') return std::nullopt;
            ++i;
        }
    }
    if (i < s.size() && (ascii_digit(s[i]) || (s[i] == '-' && i + 1 < s.size() && ascii_digit(s[i + 1])))) {
        return std::nullopt;
    }
    Candidate c;
    c.length = i - pos;
    c.retained.emplace_back("region_code", std::string(s.substr(pos, 2)));
    return c;
}

std::optional<Candidate> match_kind(PiiKind kind, std::string_view s, std::size_t pos) {
    switch (kind) {
        case PiiKind::Rrn: return match_rrn(s, pos);
        case PiiKind::Email: return match_email(s, pos);
        case PiiKind::Phone: return match_phone(s, pos);
        case PiiKind::BankAccount: return match_bank_account(s, pos);
        case PiiKind::CreditCard: return match_credit_card(s, pos);
        case PiiKind::Passport: return match_passport(s, pos);
        case PiiKind::DriverLicense: return match_driver_license(s, pos);
    }
    return std::nullopt;
}

constexpr PiiKind kAllKinds[] = {PiiKind::Rrn,         PiiKind::Email,
                                 PiiKind::Phone,       PiiKind::BankAccount,
                                 PiiKind::CreditCard,  PiiKind::Passport,
                                 PiiKind::DriverLicense};

}  // namespace

std::string render_mask(const PiiMatch& match) {
    std::string out = "<pii kind=";
    out += to_string(match.kind);
    for (const auto& [k, v] : match.retained) {
        out += ' ';
        out += k;
        out += '=';
        out += v;
    }
    out += '>';
    return out;
}

AnonymizeResult anonymize(std::string_view text, const PiiPolicy& policy) {
    AnonymizeResult result;
    result.text.reserve(text.size());
    std::size_t pos = 0;
    while (pos < text.size()) {
        const unsigned char b = static_cast<unsigned char>(text[pos]);
        // Every pattern starts with an ASCII digit, '+', or a capital letter.
        if (b >= 0x80 || !(ascii_digit(text[pos]) || text[pos] == '+' || local_char(text[pos]))) {
            result.text.push_back(text[pos]);
            ++pos;
            continue;
        }
        bool have = false;
        PiiMatch best;
        for (const PiiKind kind : kAllKinds) {
            if (!policy.enabled.contains(kind)) continue;
            const auto cand = match_kind(kind, text, pos);
            if (!cand) continue;
            if (!have || cand->length > best.end - best.begin) {
                have = true;
                best.kind = kind;
                best.begin = pos;
                best.end = pos + cand->length;
                best.retained = cand->retained;
            }
        }
        if (!have) {
            result.text.push_back(text[pos]);
            ++pos;
            continue;
        }
        result.text += render_mask(best);
        pos = best.end;
        result.matches.push_back(std::move(best));
    }
    return result;
}

}  // namespace morphobpe::pipeline
