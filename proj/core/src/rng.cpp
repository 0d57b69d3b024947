#include "fairmix/rng.hpp"

#include <cmath>
#include <stdexcept>

#include "fairmix/normal.hpp"

namespace fairmix {

namespace {
constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;

std::uint64_t mix64(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xbf58476d1ce4e5b9ULL;
    z ^= z >> 27;
    z *= 0x94d049bb133111ebULL;
    z ^= z >> 31;
    return z;
}
}  // namespace

std::uint64_t Rng::next_u64() {
    state_ += kGamma;
    return mix64(state_);
}

double Rng::next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::next_open() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double Rng::next_uniform(double lo, double hi) {
    return lo + (hi - lo) * next_double();
}

double Rng::next_normal() { return norm_quantile(next_open()); }

std::uint64_t Rng::next_index(std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("Rng::next_index: n must be positive");
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
        x = next_u64();
    } while (x >= limit);
    return x % n;
}

int Rng::next_categorical(const std::vector<double>& weights) {
    double total = 0.0;
    for (double w : weights) {
        if (w < 0.0 || !std::isfinite(w)) {
            throw std::invalid_argument("Rng::next_categorical: weights must be finite and nonnegative");
        }
        total += w;
    }
    if (total <= 0.0) throw std::invalid_argument("Rng::next_categorical: all weights zero");
    double u = next_double() * total;
    for (std::size_t k = 0; k + 1 < weights.size(); ++k) {
        u -= weights[k];
        if (u < 0.0) return static_cast<int>(k);
    }
    return static_cast<int>(weights.size()) - 1;
}

Rng Rng::split(std::uint64_t tag) const {
    return Rng(mix64(state_ ^ (kGamma * (tag + 1))));
}

Rng Rng::split(std::string_view tag) const { return split(hash_tag(tag)); }

std::uint64_t hash_tag(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace fairmix
