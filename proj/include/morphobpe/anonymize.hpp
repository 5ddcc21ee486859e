#pragma once

#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace morphobpe::pipeline {

enum class PiiKind { Rrn, Email, Phone, BankAccount, CreditCard, Passport, DriverLicense };

const char* to_string(PiiKind kind);

struct PiiPolicy {
    std::set<PiiKind> enabled = {PiiKind::Rrn,        PiiKind::Email,    PiiKind::Phone,
                                 PiiKind::BankAccount, PiiKind::CreditCard, PiiKind::Passport,
                                 PiiKind::DriverLicense};
};

// One masked span. retained carries only the non-identifying parts the
// mask keeps: rrn -> gender/birth_year, phone -> dialing_code,
// email -> domain, driver_license -> region_code; the rest keep nothing.
struct PiiMatch {
    PiiKind kind;
    std::size_t begin = 0;  // byte offsets into the original text
    std::size_t end = 0;
    std::vector<std::pair<std::string, std::string>> retained;
};

struct AnonymizeResult {
    std::string text;
    std::vector<PiiMatch> matches;
};

// Left-to-right, non-overlapping masking; at a given position the longest
// match wins and ties fall to the PiiKind declaration order. Each match
// is replaced by `<pii kind=... k=v ...>`.
AnonymizeResult anonymize(std::string_view text, const PiiPolicy& policy);

std::string render_mask(const PiiMatch& match);

}  // namespace morphobpe::pipeline
