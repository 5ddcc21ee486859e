#include "morphobpe/postprocess.hpp"

#include <algorithm>

#include "morphobpe/errors.hpp"
#include "morphobpe/utf8.hpp"

namespace morphobpe::pipeline {

std::string ctrl_prefix(const Document& doc) {
    return doc.source + ", Title: " + doc.title + ", Body: " + doc.body;
}

namespace {

bool is_terminator(char32_t cp) {
    return cp == '.' || cp == '!' || cp == '?' || cp == '\n' || cp == 0xB2E4;  // '다'
}

bool is_punct_terminator(char32_t cp) {
    return cp == '.' || cp == '!' || cp == '?' || cp == '\n';
}

// Trim whitespace, drop trailing punctuation terminators, collapse inner
// whitespace runs to one space.
std::string normalize_sentence(std::string_view s) {
    std::vector<char32_t> cps = utf8::scalars(s);
    while (!cps.empty() && (utf8::is_space(cps.back()) || is_punct_terminator(cps.back()))) {
        cps.pop_back();
    }
    std::size_t start = 0;
    while (start < cps.size() && utf8::is_space(cps[start])) ++start;
    std::string out;
    bool pending_space = false;
    for (std::size_t i = start; i < cps.size(); ++i) {
        if (utf8::is_space(cps[i])) {
            pending_space = true;
            continue;
        }
        if (pending_space && !out.empty()) out.push_back(' ');
        pending_space = false;
        out += utf8::encode(cps[i]);
    }
    return out;
}

struct SentenceSpan {
    std::size_t begin;
    std::size_t text_end;  // past the terminator
    std::size_t end;       // past following whitespace
};

std::vector<SentenceSpan> sentence_spans(std::string_view body) {
    std::vector<SentenceSpan> spans;
    std::size_t i = 0;
    std::size_t start = 0;
    while (i < body.size()) {
        std::size_t next = i;
        const char32_t cp = utf8::decode_at(body, next);
        if (is_terminator(cp)) {
            std::size_t peek = next;
            const bool at_end = peek >= body.size();
            bool before_space = false;
            if (!at_end) {
                std::size_t tmp = peek;
                before_space = utf8::is_space(utf8::decode_at(body, tmp));
            }
            if (at_end || before_space) {
                std::size_t span_end = next;
                while (span_end < body.size()) {
                    std::size_t tmp = span_end;
                    if (!utf8::is_space(utf8::decode_at(body, tmp))) break;
                    span_end = tmp;
                }
                spans.push_back({start, next, span_end});
                i = span_end;
                start = span_end;
                continue;
            }
        }
        i = next;
    }
    if (start < body.size()) {
        spans.push_back({start, body.size(), body.size()});
    }
    return spans;
}

}  // namespace

Document strip_title_duplicates(const Document& doc) {
    const std::string title_norm = normalize_sentence(doc.title);
    if (title_norm.empty()) return doc;

    const auto spans = sentence_spans(doc.body);
    std::vector<bool> drop(spans.size(), false);
    bool any = false;
    for (std::size_t i = 0; i < spans.size(); ++i) {
        const std::string_view sentence =
            std::string_view(doc.body).substr(spans[i].begin, spans[i].text_end - spans[i].begin);
        if (normalize_sentence(sentence) == title_norm) {
            drop[i] = true;
            any = true;
        }
    }
    if (!any) return doc;

    Document out = doc;
    out.body.clear();
    for (std::size_t i = 0; i < spans.size(); ++i) {
        if (drop[i]) continue;
        out.body += doc.body.substr(spans[i].begin, spans[i].end - spans[i].begin);
    }
    return out;
}

std::vector<KinAnswer> select_kin_answers(const QnARecord& rec, long long min_reputation) {
    std::vector<KinAnswer> kept;
    for (const auto& a : rec.answers) {
        if ((a.adopted || a.expert) && a.reputation >= min_reputation) {
            kept.push_back(a);
        }
    }
    return kept;
}

NewsRule NewsRule::drop_first_line() {
    NewsRule rule;
    rule.action = Action::DropFirstLine;
    return rule;
}

NewsRule NewsRule::drop_last_match(const std::string& pattern) {
    NewsRule rule;
    rule.action = Action::DropLastMatch;
    rule.pattern = pattern;
    try {
        rule.regex_ = std::regex(pattern);
    } catch (const std::regex_error& e) {
        throw ConfigError("news rule: pattern \"" + pattern + "\" does not compile: " + e.what());
    }
    return rule;
}

const std::vector<NewsRule>& default_news_rules() {
    static const std::vector<NewsRule> rules = {
        NewsRule::drop_first_line(),
        NewsRule::drop_last_match("기자|특파원|연합뉴스|뉴시스|무단 ?전재|재배포 ?금지|저작권"),
    };
    return rules;
}

namespace {

std::vector<std::string_view> split_lines(std::string_view body) {
    std::vector<std::string_view> lines;
    std::size_t start = 0;
    for (;;) {
        const std::size_t nl = body.find('\n', start);
        if (nl == std::string_view::npos) {
            lines.push_back(body.substr(start));
            break;
        }
        lines.push_back(body.substr(start, nl - start));
        start = nl + 1;
    }
    return lines;
}

std::string join_lines(const std::vector<std::string_view>& lines) {
    std::string out;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (i > 0) out.push_back('\n');
        out.append(lines[i]);
    }
    return out;
}

bool is_blank(std::string_view line) {
    for (const char c : line) {
        if (c != ' ' && c != '\t' && c != '\r') return false;
    }
    return true;
}

}  // namespace

Document clean_news(const Document& doc, const std::vector<NewsRule>& rules) {
    Document out = doc;
    for (const auto& rule : rules) {
        auto lines = split_lines(out.body);
        if (rule.action == NewsRule::Action::DropFirstLine) {
            if (!lines.empty()) lines.erase(lines.begin());
        } else {
            // Last non-blank line, if it matches, goes.
            for (std::size_t i = lines.size(); i-- > 0;) {
                if (is_blank(lines[i])) continue;
                const std::string line(lines[i]);
                if (std::regex_search(line, rule.regex())) {
                    lines.erase(lines.begin() + static_cast<std::ptrdiff_t>(i));
                    // Drop a now-trailing blank line left behind.
                    while (!lines.empty() && is_blank(lines.back())) lines.pop_back();
                }
                break;
            }
        }
        out.body = join_lines(lines);
    }
    return out;
}

namespace {

bool iequals_at(std::string_view s, std::size_t pos, std::string_view lower_word) {
    if (pos + lower_word.size() > s.size()) return false;
    for (std::size_t i = 0; i < lower_word.size(); ++i) {
        const char c = s[pos + i];
        const char l = (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
        if (l != lower_word[i]) return false;
    }
    return true;
}

// Skips <script>/<style> elements wholesale; returns the index just past
// the closing tag (or the end on malformed input).
std::size_t skip_element(std::string_view s, std::size_t pos, std::string_view name) {
    std::size_t i = pos;
    while (i < s.size()) {
        const std::size_t lt = s.find('<', i);
        if (lt == std::string_view::npos) return s.size();
        if (lt + 1 < s.size() && s[lt + 1] == '/' && iequals_at(s, lt + 2, name)) {
            const std::size_t gt = s.find('>', lt);
            return gt == std::string_view::npos ? s.size() : gt + 1;
        }
        i = lt + 1;
    }
    return s.size();
}

void decode_entities(std::string_view in, std::string& out) {
    std::size_t i = 0;
    while (i < in.size()) {
        if (in[i] != '&') {
            out.push_back(in[i]);
            ++i;
            continue;
        }
        const std::size_t semi = in.find(';', i + 1);
        if (semi == std::string_view::npos || semi - i > 12) {
            out.push_back(in[i]);
            ++i;
            continue;
        }
        const std::string_view name = in.substr(i + 1, semi - i - 1);
        bool handled = true;
        if (name == "amp") {
            out.push_back('&');
        } else if (name == "lt") {
            out.push_back('<');
        } else if (name == "gt") {
            out.push_back('>');
        } else if (name == "quot") {
            out.push_back('"');
        } else if (name == "apos") {
            out.push_back('\'');
        } else if (name.size() > 1 && name[0] == '#') {
            char32_t cp = 0;
            bool ok = true;
            if (name[1] == 'x' || name[1] == 'X') {
                if (name.size() < 3) ok = false;
                for (std::size_t k = 2; ok && k < name.size(); ++k) {
                    const char c = name[k];
                    int v;
                    if (c >= '0' && c <= '9') v = c - '0';
                    else if (c >= 'a' && c <= 'f') v = c - 'a' + 10;
                    else if (c >= 'A' && c <= 'F') v = c - 'A' + 10;
                    else { ok = false; break; }
                    cp = cp * 16 + static_cast<char32_t>(v);
                }
            } else {
                for (std::size_t k = 1; ok && k < name.size(); ++k) {
                    const char c = name[k];
                    if (c < '0' || c > '9') { ok = false; break; }
                    cp = cp * 10 + static_cast<char32_t>(c - '0');
                }
            }
            if (ok && cp > 0 && cp <= 0x10FFFF && !(cp >= 0xD800 && cp <= 0xDFFF)) {
                out += utf8::encode(cp);
            } else {
                handled = false;
            }
        } else {
            handled = false;
        }
        if (handled) {
            i = semi + 1;
        } else {
            out.push_back(in[i]);
            ++i;
        }
    }
}

}  // namespace

std::string strip_html(std::string_view raw) {
    std::string text;
    text.reserve(raw.size());
    std::size_t i = 0;
    while (i < raw.size()) {
        const std::size_t lt = raw.find('<', i);
        if (lt == std::string_view::npos) {
            text.append(raw.substr(i));
            break;
        }
        text.append(raw.substr(i, lt - i));
        if (raw.substr(lt, 4) == "<!--") {
            const std::size_t end = raw.find("-->", lt + 4);
            i = end == std::string_view::npos ? raw.size() : end + 3;
            continue;
        }
        if (iequals_at(raw, lt + 1, "script")) {
            const std::size_t gt = raw.find('>', lt);
            i = gt == std::string_view::npos ? raw.size() : skip_element(raw, gt + 1, "script");
            continue;
        }
        if (iequals_at(raw, lt + 1, "style")) {
            const std::size_t gt = raw.find('>', lt);
            i = gt == std::string_view::npos ? raw.size() : skip_element(raw, gt + 1, "style");
            continue;
        }
        const std::size_t gt = raw.find('>', lt);
        if (gt == std::string_view::npos) {
            i = raw.size();  // unterminated tag: drop the rest
            continue;
        }
        // Block-ish boundary so "<p>a</p><p>b</p>" keeps a separator.
        text.push_back(' ');
        i = gt + 1;
    }

    std::string decoded;
    decoded.reserve(text.size());
    decode_entities(text, decoded);

    // Collapse whitespace runs and trim.
    std::string out;
    out.reserve(decoded.size());
    std::size_t j = 0;
    bool pending_space = false;
    while (j < decoded.size()) {
        const std::size_t start = j;
        const char32_t cp = utf8::decode_at(decoded, j);
        if (utf8::is_space(cp)) {
            pending_space = true;
            continue;
        }
        if (pending_space && !out.empty()) out.push_back(' ');
        pending_space = false;
        out.append(decoded.substr(start, j - start));
    }
    return out;
}

}  // namespace morphobpe::pipeline
