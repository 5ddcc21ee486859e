#include "morphobpe/config.hpp"

#include <fstream>
#include <set>

#include <json.hpp>

#include "morphobpe/errors.hpp"

namespace morphobpe {

using nlohmann::json;

namespace {

void reject_unknown_keys(const json& obj, const std::set<std::string>& known,
                         const std::string& where) {
    for (const auto& [key, value] : obj.items()) {
        if (!known.contains(key)) {
            throw ConfigError(where + ": unknown key \"" + key + "\"");
        }
    }
}

double get_number(const json& obj, const char* key, double fallback, const std::string& where) {
    const auto it = obj.find(key);
    if (it == obj.end()) return fallback;
    if (!it->is_number()) {
        throw ConfigError(where + ": \"" + std::string(key) + "\" must be a number");
    }
    return it->get<double>();
}

void parse_filter(const json& obj, pipeline::FilterConfig& cfg, const std::string& where) {
    reject_unknown_keys(obj,
                        {"min_length", "repetition_threshold", "digit_threshold",
                         "special_threshold", "blocklist_threshold", "blocklist"},
                        where);
    cfg.min_length =
        static_cast<long long>(get_number(obj, "min_length", static_cast<double>(cfg.min_length), where));
    cfg.repetition_threshold = get_number(obj, "repetition_threshold", cfg.repetition_threshold, where);
    cfg.digit_threshold = get_number(obj, "digit_threshold", cfg.digit_threshold, where);
    cfg.special_threshold = get_number(obj, "special_threshold", cfg.special_threshold, where);
    cfg.blocklist_threshold = get_number(obj, "blocklist_threshold", cfg.blocklist_threshold, where);
    if (const auto it = obj.find("blocklist"); it != obj.end()) {
        if (!it->is_array()) throw ConfigError(where + ": \"blocklist\" must be an array");
        cfg.blocklist.clear();
        for (const auto& term : *it) {
            if (!term.is_string()) {
                throw ConfigError(where + ": \"blocklist\" entries must be strings");
            }
            cfg.blocklist.push_back(term.get<std::string>());
        }
    }
    try {
        cfg.validate();
    } catch (const ConfigError& e) {
        // Re-point the diagnostic at the config key names used here.
        std::string msg = e.what();
        throw ConfigError(where + ": " + msg);
    }
}

void parse_pii(const json& obj, pipeline::PiiPolicy& policy, const std::string& where) {
    reject_unknown_keys(obj, {"enabled"}, where);
    const auto it = obj.find("enabled");
    if (it == obj.end()) return;
    if (!it->is_array()) throw ConfigError(where + ": \"enabled\" must be an array of kinds");
    policy.enabled.clear();
    for (const auto& kind : *it) {
        if (!kind.is_string()) throw ConfigError(where + ": kinds must be strings");
        const std::string name = kind.get<std::string>();
        bool found = false;
        for (const auto k :
             {pipeline::PiiKind::Rrn, pipeline::PiiKind::Email, pipeline::PiiKind::Phone,
              pipeline::PiiKind::BankAccount, pipeline::PiiKind::CreditCard,
              pipeline::PiiKind::Passport, pipeline::PiiKind::DriverLicense}) {
            if (name == pipeline::to_string(k)) {
                policy.enabled.insert(k);
                found = true;
                break;
            }
        }
        if (!found) throw ConfigError(where + ": unknown pii kind \"" + name + "\"");
    }
}

void parse_dedup(const json& obj, pipeline::DedupConfig& cfg, const std::string& where) {
    reject_unknown_keys(obj, {"shingle_n", "num_hashes", "threshold"}, where);
    cfg.shingle_n = static_cast<int>(get_number(obj, "shingle_n", cfg.shingle_n, where));
    cfg.num_hashes = static_cast<int>(get_number(obj, "num_hashes", cfg.num_hashes, where));
    cfg.threshold = get_number(obj, "threshold", cfg.threshold, where);
    try {
        cfg.validate();
    } catch (const ConfigError& e) {
        throw ConfigError(where + ": " + std::string(e.what()));
    }
}

void parse_news(const json& obj, std::vector<pipeline::NewsRule>& rules, const std::string& where) {
    reject_unknown_keys(obj, {"rules"}, where);
    const auto it = obj.find("rules");
    if (it == obj.end()) return;
    if (!it->is_array()) throw ConfigError(where + ": \"rules\" must be an array");
    rules.clear();
    std::size_t n = 0;
    for (const auto& rule : *it) {
        ++n;
        const std::string rwhere = where + ".rules[" + std::to_string(n - 1) + "]";
        if (!rule.is_object() || !rule.contains("action") || !rule["action"].is_string()) {
            throw ConfigError(rwhere + ": rule needs a string \"action\"");
        }
        reject_unknown_keys(rule, {"action", "pattern"}, rwhere);
        const std::string action = rule["action"].get<std::string>();
        if (action == "drop_first_line") {
            rules.push_back(pipeline::NewsRule::drop_first_line());
        } else if (action == "drop_last_match") {
            if (!rule.contains("pattern") || !rule["pattern"].is_string()) {
                throw ConfigError(rwhere + ": drop_last_match needs a string \"pattern\"");
            }
            rules.push_back(
                pipeline::NewsRule::drop_last_match(rule["pattern"].get<std::string>()));
        } else {
            throw ConfigError(rwhere + ": unknown action \"" + action + "\"");
        }
    }
}

}  // namespace

AppConfig parse_config(const std::string& json_text, const std::string& name) {
    json j = json::parse(json_text, nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
        throw ConfigError(name + ": config must be a JSON object");
    }
    reject_unknown_keys(j, {"filter", "pii", "dedup", "news"}, name);
    AppConfig cfg;
    if (const auto it = j.find("filter"); it != j.end()) {
        if (!it->is_object()) throw ConfigError(name + ": \"filter\" must be an object");
        parse_filter(*it, cfg.filter, name + ".filter");
    }
    if (const auto it = j.find("pii"); it != j.end()) {
        if (!it->is_object()) throw ConfigError(name + ": \"pii\" must be an object");
        parse_pii(*it, cfg.pii, name + ".pii");
    }
    if (const auto it = j.find("dedup"); it != j.end()) {
        if (!it->is_object()) throw ConfigError(name + ": \"dedup\" must be an object");
        parse_dedup(*it, cfg.dedup, name + ".dedup");
    }
    if (const auto it = j.find("news"); it != j.end()) {
        if (!it->is_object()) throw ConfigError(name + ": \"news\" must be an object");
        parse_news(*it, cfg.news, name + ".news");
    }
    return cfg;
}

AppConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return parse_config(text, path);
}

}  // namespace morphobpe
