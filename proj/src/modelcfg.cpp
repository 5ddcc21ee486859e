#include "morphobpe/modelcfg.hpp"

#include <cmath>

#include <json.hpp>

#include "morphobpe/errors.hpp"

namespace morphobpe::modelcfg {

using nlohmann::json;

const std::vector<ModelConfig>& builtin_table() {
    static const std::vector<ModelConfig> table = {
        {"137M", 12, 768, 16, 48, 6.0e-4},
        {"350M", 24, 1024, 16, 64, 3.0e-4},
        {"760M", 24, 1536, 16, 96, 2.5e-4},
        {"1.3B", 24, 2048, 16, 128, 2.0e-4},
        {"6.9B", 32, 4096, 32, 128, 1.2e-4},
        {"13B", 40, 5120, 40, 128, 1.0e-4},
        {"39B", 48, 8192, 64, 128, 0.8e-4},
        {"82B", 64, 10240, 80, 128, 0.6e-4},
    };
    return table;
}

double parse_label_value(const std::string& label) {
    if (label.size() < 2) throw InputError("model label too short: \"" + label + "\"");
    const char unit = label.back();
    double scale = 0.0;
    switch (unit) {
        case 'M': scale = 1e6; break;
        case 'B': scale = 1e9; break;
        default: throw InputError("model label must end in M or B: \"" + label + "\"");
    }
    std::size_t consumed = 0;
    double value = 0.0;
    try {
        value = std::stod(label.substr(0, label.size() - 1), &consumed);
    } catch (const std::exception&) {
        throw InputError("model label is not numeric: \"" + label + "\"");
    }
    if (consumed != label.size() - 1 || value <= 0.0) {
        throw InputError("model label is not numeric: \"" + label + "\"");
    }
    return value * scale;
}

std::uint64_t param_count(const ModelConfig& cfg, std::uint64_t vocab_size,
                          std::uint64_t context_length) {
    if (cfg.n_layers <= 0 || cfg.d_model <= 0) {
        throw InputError("model config must have positive n_layers and d_model");
    }
    const std::uint64_t d = static_cast<std::uint64_t>(cfg.d_model);
    const std::uint64_t layers = static_cast<std::uint64_t>(cfg.n_layers);
    const std::uint64_t per_layer = 12 * d * d + 13 * d;
    return vocab_size * d + context_length * d + layers * per_layer + 2 * d;
}

std::vector<LabelCheck> validate_labels(std::uint64_t vocab_size, std::uint64_t context_length,
                                        double tolerance) {
    std::vector<LabelCheck> checks;
    for (const auto& cfg : builtin_table()) {
        LabelCheck check;
        check.cfg = cfg;
        check.computed = param_count(cfg, vocab_size, context_length);
        check.label_value = parse_label_value(cfg.label);
        check.deviation =
            std::abs(static_cast<double>(check.computed) - check.label_value) / check.label_value;
        check.pass = check.deviation <= tolerance;
        checks.push_back(std::move(check));
    }
    return checks;
}

std::string serialize_table(const std::vector<ModelConfig>& table) {
    json j = json::array();
    for (const auto& cfg : table) {
        j.push_back({{"label", cfg.label},
                     {"n_layers", cfg.n_layers},
                     {"d_model", cfg.d_model},
                     {"n_heads", cfg.n_heads},
                     {"d_head", cfg.d_head},
                     {"lr", cfg.lr}});
    }
    return j.dump(2);
}

std::vector<ModelConfig> parse_table(const std::string& json_text) {
    json j = json::parse(json_text, nullptr, false);
    if (j.is_discarded() || !j.is_array()) {
        throw ParseError("model table: expected a JSON array");
    }
    std::vector<ModelConfig> table;
    for (const auto& row : j) {
        ModelConfig cfg;
        cfg.label = row.value("label", std::string{});
        cfg.n_layers = row.value("n_layers", 0);
        cfg.d_model = row.value("d_model", 0);
        cfg.n_heads = row.value("n_heads", 0);
        cfg.d_head = row.value("d_head", 0);
        cfg.lr = row.value("lr", 0.0);
        if (cfg.label.empty() || cfg.n_layers <= 0 || cfg.d_model <= 0 || cfg.n_heads <= 0 ||
            cfg.d_head <= 0 || cfg.lr <= 0.0) {
            throw ParseError("model table: row with missing or non-positive fields");
        }
        if (cfg.d_model != cfg.n_heads * cfg.d_head) {
            throw ParseError("model table: d_model must equal n_heads * d_head for \"" +
                             cfg.label + "\"");
        }
        table.push_back(std::move(cfg));
    }
    return table;
}

}  // namespace morphobpe::modelcfg
