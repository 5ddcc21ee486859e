#pragma once

#include <cstdint>
#include <istream>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "morphobpe/rng.hpp"

namespace morphobpe::prompts {

// One task example: named fields -> values. Ordered so rendering and
// serialization are deterministic.
using Example = std::map<std::string, std::string>;

struct ExampleSet {
    std::string task;
    int set_index = 0;
    std::vector<Example> examples;
};

// Each set is an independent Fisher-Yates draw seeded with
// seed + set_index: without replacement inside a set, sets may overlap.
std::vector<ExampleSet> sample_example_sets(const std::vector<Example>& pool, std::size_t k,
                                            std::size_t num_sets, std::uint64_t seed,
                                            const std::string& task = {});

// {slot} fields are substituted at render time; a missing field is a
// render error naming the slot. "[P]" continuous-prompt markers are plain
// text to every operation here and pass through verbatim.
struct PromptTemplate {
    std::string header;
    std::string example_format;
    std::string separator;
    std::string query_format;
};

PromptTemplate load_template(const std::string& path);
PromptTemplate parse_template(const std::string& json_text, const std::string& name);

// Substitutes {name} slots from fields. The 1-based example position is
// available as {index} unless the fields provide their own.
std::string render_format(const std::string& format, const Example& fields, int index);

// header + k rendered examples + rendered query, joined by the separator.
std::string build_fewshot_prompt(const PromptTemplate& tmpl, const ExampleSet& set,
                                 const Example& query);

struct QaPair {
    std::string question;
    std::string answer;
};

// Reading-comprehension scheme: one passage, exactly four answered
// question/answer pairs from it, then the test question with an empty
// answer slot.
std::string build_qa_prompt(const std::string& passage, const std::vector<QaPair>& support_qas,
                            const std::string& test_question);

struct IntentClass {
    std::string name;
    std::vector<std::string> utterances;
};

// Intent-transfer augmentation prompt: three sampled source classes with
// five utterances each, then the target intent block ending in "1." to
// cue generation.
std::string build_augmentation_prompt(const std::vector<IntentClass>& source_classes,
                                      const std::string& target_intent, SplitMix64& rng);

struct PackEntry {
    std::string id;
    std::string prompt;
    std::string gold;
};

// JSONL {id, prompt, gold}; ids must be unique.
void export_prompt_pack(const std::vector<PackEntry>& entries, std::ostream& out);
std::vector<PackEntry> load_prompt_pack(std::istream& in);

std::string serialize_example_set(const ExampleSet& set);
ExampleSet parse_example_set(const std::string& json_line, std::size_t line_no = 0);
Example parse_example(const std::string& json_line, std::size_t line_no = 0);
std::string serialize_example(const Example& example);

}  // namespace morphobpe::prompts
