#include "morphobpe/dedup.hpp"

#include <algorithm>
#include <limits>
#include <unordered_set>

#include "morphobpe/errors.hpp"
#include "morphobpe/hash.hpp"
#include "morphobpe/rng.hpp"
#include "morphobpe/utf8.hpp"

namespace morphobpe::pipeline {

void DedupConfig::validate() const {
    if (shingle_n < 1) throw ConfigError("dedup: shingle_n must be >= 1");
    if (num_hashes < 16) throw ConfigError("dedup: num_hashes must be >= 16");
    if (num_hashes % Deduplicator::kRows != 0) {
        throw ConfigError("dedup: num_hashes must be a multiple of " +
                          std::to_string(Deduplicator::kRows));
    }
    if (!(threshold > 0.0 && threshold <= 1.0)) {
        throw ConfigError("dedup: threshold must be in (0, 1]");
    }
}

MinHasher::MinHasher(int num_hashes, int shingle_n, std::uint64_t seed)
    : shingle_n_(shingle_n) {
    SplitMix64 rng(seed);
    keys_.reserve(static_cast<std::size_t>(num_hashes));
    for (int i = 0; i < num_hashes; ++i) keys_.push_back(rng.next());
}

std::vector<std::uint64_t> MinHasher::shingle_set(std::string_view text) const {
    // Scalar offsets so shingles are character n-grams, not byte n-grams.
    std::vector<std::size_t> offsets;
    std::size_t i = 0;
    while (i < text.size()) {
        offsets.push_back(i);
        utf8::decode_at(text, i);
    }
    offsets.push_back(text.size());

    const std::size_t n_scalars = offsets.size() - 1;
    std::unordered_set<std::uint64_t> set;
    const std::size_t n = static_cast<std::size_t>(shingle_n_);
    if (n_scalars < n) {
        set.insert(fnv1a64(text));
    } else {
        for (std::size_t s = 0; s + n <= n_scalars; ++s) {
            set.insert(fnv1a64(text.substr(offsets[s], offsets[s + n] - offsets[s])));
        }
    }
    return {set.begin(), set.end()};
}

std::vector<std::uint64_t> MinHasher::signature(std::string_view text) const {
    const auto shingles = shingle_set(text);
    std::vector<std::uint64_t> sig(keys_.size(), std::numeric_limits<std::uint64_t>::max());
    for (const std::uint64_t sh : shingles) {
        for (std::size_t k = 0; k < keys_.size(); ++k) {
            const std::uint64_t h = mix64(sh ^ keys_[k]);
            if (h < sig[k]) sig[k] = h;
        }
    }
    return sig;
}

double MinHasher::estimate_jaccard(const std::vector<std::uint64_t>& a,
                                   const std::vector<std::uint64_t>& b) {
    if (a.size() != b.size() || a.empty()) {
        throw InputError("minhash: signatures must have equal non-zero length");
    }
    std::size_t agree = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] == b[i]) ++agree;
    }
    return static_cast<double>(agree) / static_cast<double>(a.size());
}

Deduplicator::Deduplicator(const DedupConfig& cfg)
    : cfg_(cfg), hasher_(cfg.num_hashes, cfg.shingle_n, cfg.seed),
      bands_(cfg.num_hashes / kRows) {
    cfg_.validate();
    buckets_.resize(static_cast<std::size_t>(bands_));
}

Deduplicator::Outcome Deduplicator::offer(const Document& doc) {
    const auto sig = hasher_.signature(doc.body);

    std::vector<std::uint64_t> band_keys(static_cast<std::size_t>(bands_));
    for (int band = 0; band < bands_; ++band) {
        std::uint64_t h = 0x9E3779B97F4A7C15ULL ^ static_cast<std::uint64_t>(band);
        for (int r = 0; r < kRows; ++r) {
            h = mix64(h ^ sig[static_cast<std::size_t>(band * kRows + r)]);
        }
        band_keys[static_cast<std::size_t>(band)] = h;
    }

    // Earliest surviving candidate that clears the threshold wins.
    std::size_t best_idx = std::numeric_limits<std::size_t>::max();
    double best_est = 0.0;
    std::unordered_set<std::size_t> checked;
    for (int band = 0; band < bands_; ++band) {
        const auto& bucket = buckets_[static_cast<std::size_t>(band)];
        const auto it = bucket.find(band_keys[static_cast<std::size_t>(band)]);
        if (it == bucket.end()) continue;
        for (const std::size_t cand : it->second) {
            if (!checked.insert(cand).second) continue;
            const double est = MinHasher::estimate_jaccard(sig, signatures_[cand]);
            if (est >= cfg_.threshold && cand < best_idx) {
                best_idx = cand;
                best_est = est;
            }
        }
    }

    if (best_idx != std::numeric_limits<std::size_t>::max()) {
        report_.push_back({doc.id, ids_[best_idx], best_est});
        return {false, ids_[best_idx], best_est};
    }

    const std::size_t idx = signatures_.size();
    signatures_.push_back(sig);
    ids_.push_back(doc.id);
    for (int band = 0; band < bands_; ++band) {
        buckets_[static_cast<std::size_t>(band)][band_keys[static_cast<std::size_t>(band)]]
            .push_back(idx);
    }
    return {true, {}, 0.0};
}

}  // namespace morphobpe::pipeline
