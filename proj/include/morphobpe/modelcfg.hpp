#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace morphobpe::modelcfg {

struct ModelConfig {
    std::string label;  // e.g. "82B"
    int n_layers = 0;
    int d_model = 0;
    int n_heads = 0;
    int d_head = 0;
    double lr = 0.0;

    bool operator==(const ModelConfig&) const = default;
};

// The eight published configurations, smallest to largest. Every row
// satisfies d_model == n_heads * d_head.
const std::vector<ModelConfig>& builtin_table();

// "82B" -> 82e9, "137M" -> 137e6. Throws InputError on anything else.
double parse_label_value(const std::string& label);

// GPT-style decoder parameter count with tied input/output embeddings:
// V*d token embedding, n_ctx*d learned positions, 12*d^2 + 13*d per layer
// (attention, MLP, two layernorms, all with biases), 2*d final layernorm.
std::uint64_t param_count(const ModelConfig& cfg, std::uint64_t vocab_size,
                          std::uint64_t context_length);

struct LabelCheck {
    ModelConfig cfg;
    std::uint64_t computed = 0;
    double label_value = 0.0;
    double deviation = 0.0;  // |computed - label| / label
    bool pass = false;
};

std::vector<LabelCheck> validate_labels(std::uint64_t vocab_size, std::uint64_t context_length,
                                        double tolerance = 0.10);

std::string serialize_table(const std::vector<ModelConfig>& table);
std::vector<ModelConfig> parse_table(const std::string& json_text);

}  // namespace morphobpe::modelcfg
