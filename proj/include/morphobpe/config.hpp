#pragma once

#include <string>

#include "morphobpe/anonymize.hpp"
#include "morphobpe/dedup.hpp"
#include "morphobpe/filter.hpp"
#include "morphobpe/postprocess.hpp"

namespace morphobpe {

// One config file drives the corpus subcommands. Parsing is strict:
// unknown keys are rejected by name, and every threshold is checked
// against its range at load time.
struct AppConfig {
    pipeline::FilterConfig filter;
    pipeline::PiiPolicy pii;
    pipeline::DedupConfig dedup;
    std::vector<pipeline::NewsRule> news = pipeline::default_news_rules();
};

AppConfig parse_config(const std::string& json_text, const std::string& name);
AppConfig load_config(const std::string& path);

}  // namespace morphobpe
