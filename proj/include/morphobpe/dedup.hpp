#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "morphobpe/document.hpp"

namespace morphobpe::pipeline {

struct DedupConfig {
    int shingle_n = 5;        // characters per shingle
    int num_hashes = 128;     // must be a positive multiple of kRows
    double threshold = 0.9;   // estimated Jaccard at or above drops the later doc
    std::uint64_t seed = 0;

    void validate() const;
};

// MinHash signatures over character shingles. A body shorter than
// shingle_n is treated as a single shingle so that short identical
// documents still collide and short distinct ones do not.
class MinHasher {
public:
    MinHasher(int num_hashes, int shingle_n, std::uint64_t seed);

    std::vector<std::uint64_t> signature(std::string_view text) const;

    static double estimate_jaccard(const std::vector<std::uint64_t>& a,
                                   const std::vector<std::uint64_t>& b);

    // Shingle hash values; exposed so tests can brute-force exact Jaccard.
    std::vector<std::uint64_t> shingle_set(std::string_view text) const;

    int num_hashes() const { return static_cast<int>(keys_.size()); }

private:
    int shingle_n_;
    std::vector<std::uint64_t> keys_;
};

struct DuplicatePair {
    std::string dropped_id;
    std::string kept_id;
    double estimated_jaccard = 0.0;
};

// Streaming near-duplicate detector: LSH banding proposes candidates and
// the signature estimate confirms them. Later documents in stream order
// are the ones dropped. offer() mutates shared state and must be called
// from one thread at a time.
class Deduplicator {
public:
    explicit Deduplicator(const DedupConfig& cfg);

    struct Outcome {
        bool kept = true;
        std::string duplicate_of;
        double estimated_jaccard = 0.0;
    };

    Outcome offer(const Document& doc);

    const std::vector<DuplicatePair>& report() const { return report_; }

    static constexpr int kRows = 4;  // rows per LSH band

private:
    DedupConfig cfg_;
    MinHasher hasher_;
    int bands_;
    std::vector<std::vector<std::uint64_t>> signatures_;
    std::vector<std::string> ids_;
    std::vector<std::unordered_map<std::uint64_t, std::vector<std::size_t>>> buckets_;
    std::vector<DuplicatePair> report_;
};

}  // namespace morphobpe::pipeline
