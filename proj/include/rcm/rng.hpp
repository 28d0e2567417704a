// Deterministic random number machinery.
//
// Everything stochastic in this library flows through two primitives:
//
//   1. Stream   -- a splitmix64 sequence used for ordered draws
//                  (Poisson counts, point positions, site/ghost bits).
//   2. PairUniformSource -- keyed, order-free uniforms for unordered
//                  vertex pairs. The value is a pure function of
//                  (seed, canonical key), so couplings that compare the
//                  same uniform against several connection functions are
//                  exact and replayable, and parallel replications cannot
//                  perturb each other.
//
// Seeds for sub-streams are derived by hashing (master seed, tag, index);
// results are identical across runs, platforms and worker counts.
#pragma once

#include <cstdint>
#include <string_view>

namespace rcm {

// Finalizer of splitmix64 (Stafford mix13). Bijective with full avalanche.
constexpr std::uint64_t mix64(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ull;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBull;
    z ^= z >> 31;
    return z;
}

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

// 64-bit FNV-1a over a short string, used to separate named sub-streams.
constexpr std::uint64_t hash_tag(std::string_view tag) {
    std::uint64_t h = 0xCBF29CE484222325ull;
    for (char c : tag) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001B3ull;
    }
    return h;
}

// Derive an independent child seed from (master, tag, index).
constexpr std::uint64_t derive_seed(std::uint64_t master, std::string_view tag,
                                    std::uint64_t index = 0) {
    std::uint64_t s = mix64(master + kGolden);
    s = mix64(s ^ hash_tag(tag));
    s = mix64(s ^ (index + kGolden));
    return s;
}

// Map 64 random bits to a double in [0, 1) with 53-bit resolution.
constexpr double bits_to_unit(std::uint64_t x) {
    return static_cast<double>(x >> 11) * 0x1.0p-53;
}

// splitmix64 stream generator.
class Stream {
  public:
    explicit Stream(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_bits() {
        state_ += kGolden;
        return mix64(state_);
    }

    // Uniform in [0, 1).
    double next_unit() { return bits_to_unit(next_bits()); }

    // Uniform in [lo, hi).
    double next_in(double lo, double hi) { return lo + (hi - lo) * next_unit(); }

    // Uniform integer in {0, ..., n-1} (n > 0). Modulo bias is < 2^-53 for the
    // n used here (vertex counts), irrelevant at Monte Carlo accuracy.
    std::uint64_t next_below(std::uint64_t n) { return next_bits() % n; }

  private:
    std::uint64_t state_;
};

// Exponential(1) variate from a stream draw.
double exponential_draw(Stream& s);

// Poisson(mean) count via the arrival-time construction: the count is the
// number of unit-exponential gaps that fit below `mean`. Exact for any mean,
// deterministic given the stream, O(mean) draws.
std::uint64_t poisson_draw(Stream& s, double mean);

// Keyed symmetric uniforms for unordered pairs.
//
// Two keying schemes are provided. `by_point_id` keys a pair of vertex ids.
// `by_box_tensor` keys (box, occurrence-index) pairs, storing the value under
// the lexicographically ordered box pair so that swapping the endpoints swaps
// both coordinates consistently.
class PairUniformSource {
  public:
    enum class Keying { by_point_id, by_box_tensor };

    PairUniformSource(std::uint64_t seed, Keying keying = Keying::by_point_id)
        : seed_(seed), keying_(keying) {}

    std::uint64_t seed() const { return seed_; }
    Keying keying() const { return keying_; }

    // Uniform for an unordered id pair; a == b is rejected.
    double by_ids(std::uint64_t a, std::uint64_t b) const;

    // Uniform for ((box_a, idx_a), (box_b, idx_b)) with the tensor
    // orientation rule. Boxes may coincide if the indices differ.
    double by_tensor(std::uint64_t box_a, std::uint64_t idx_a,
                     std::uint64_t box_b, std::uint64_t idx_b) const;

  private:
    std::uint64_t seed_;
    Keying keying_;
};

}  // namespace rcm
