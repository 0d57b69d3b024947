#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

namespace fairmix {

// Deterministic 64-bit generator (SplitMix64 core) with hierarchical stream
// derivation. All simulation draws go through this type so that a (seed,
// scenario, replicate) triple reproduces byte-identical data on any platform;
// standard-library distributions are implementation-defined and never used.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64();

    // Uniform on [0,1) with 53 random mantissa bits.
    double next_double();

    // Uniform on (0,1): offset by half an ulp so quantile transforms never
    // see an endpoint.
    double next_open();

    // Uniform on [lo, hi).
    double next_uniform(double lo, double hi);

    // Standard normal via inverse-CDF of the pinned quantile function.
    double next_normal();

    // Index in [0, n), rejection-sampled to avoid modulo bias.
    std::uint64_t next_index(std::uint64_t n);

    // Category draw from unnormalized nonnegative weights.
    int next_categorical(const std::vector<double>& weights);

    // Child stream: mixes a tag word into the current state without
    // disturbing this generator. Children with distinct tags are
    // statistically independent streams.
    Rng split(std::uint64_t tag) const;
    Rng split(std::string_view tag) const;

private:
    std::uint64_t state_;
};

// FNV-1a hash of a string tag, used to derive named streams.
std::uint64_t hash_tag(std::string_view s);

}  // namespace fairmix
