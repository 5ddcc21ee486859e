#pragma once

#include <regex>
#include <string>
#include <string_view>
#include <vector>

#include "morphobpe/document.hpp"

namespace morphobpe::pipeline {

// CTRL-style source prefix: "{source}, Title: {title}, Body: {body}".
std::string ctrl_prefix(const Document& doc);

// Removes body sentences that equal the title after whitespace
// normalization. Sentences end at '.', '!', '?', '\n', or '다' followed by
// whitespace or end of text. Documents without a matching sentence are
// returned unchanged.
Document strip_title_duplicates(const Document& doc);

std::vector<KinAnswer> select_kin_answers(const QnARecord& rec, long long min_reputation);

struct NewsRule {
    enum class Action { DropFirstLine, DropLastMatch };
    Action action = Action::DropFirstLine;
    std::string pattern;  // DropLastMatch only

    // Compiles the pattern; throws ConfigError when it does not parse.
    static NewsRule drop_first_line();
    static NewsRule drop_last_match(const std::string& pattern);

    const std::regex& regex() const { return regex_; }

private:
    std::regex regex_;
};

// Drop the first line, then drop a trailing reporter/affiliation line.
const std::vector<NewsRule>& default_news_rules();

Document clean_news(const Document& doc, const std::vector<NewsRule>& rules);

// Drops script/style/comment content and all tags, decodes the basic
// entities (&amp; &lt; &gt; &quot; &apos; &#NN; &#xHH;), collapses
// whitespace runs to single spaces, trims. Best effort on malformed HTML.
std::string strip_html(std::string_view raw);

}  // namespace morphobpe::pipeline
