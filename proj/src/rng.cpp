#include "rcm/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace rcm {

double exponential_draw(Stream& s) {
    // -log(1-u) with u in [0,1): argument stays in (0,1], result in [0,inf).
    return -std::log1p(-s.next_unit());
}

std::uint64_t poisson_draw(Stream& s, double mean) {
    if (!(mean >= 0.0) || !std::isfinite(mean))
        throw std::invalid_argument("poisson_draw: mean must be finite and >= 0");
    if (mean > 5e7)
        throw std::invalid_argument("poisson_draw: mean exceeds sampling budget");
    std::uint64_t count = 0;
    double total = exponential_draw(s);
    while (total <= mean) {
        ++count;
        total += exponential_draw(s);
    }
    return count;
}

namespace {

std::uint64_t pair_hash(std::uint64_t seed, std::uint64_t tag, std::uint64_t a,
                        std::uint64_t b) {
    std::uint64_t h = mix64(seed ^ tag);
    h = mix64(h ^ (a + kGolden));
    h = mix64(h ^ (b + kGolden));
    return h;
}

std::uint64_t quad_hash(std::uint64_t seed, std::uint64_t tag, std::uint64_t a,
                        std::uint64_t b, std::uint64_t c, std::uint64_t d) {
    std::uint64_t h = mix64(seed ^ tag);
    h = mix64(h ^ (a + kGolden));
    h = mix64(h ^ (b + kGolden));
    h = mix64(h ^ (c + kGolden));
    h = mix64(h ^ (d + kGolden));
    return h;
}

constexpr std::uint64_t kIdTag = hash_tag("pair-by-id");
constexpr std::uint64_t kTensorTag = hash_tag("pair-by-tensor");

}  // namespace

double PairUniformSource::by_ids(std::uint64_t a, std::uint64_t b) const {
    if (a == b) throw std::invalid_argument("PairUniformSource: equal point keys");
    if (a > b) std::swap(a, b);
    return bits_to_unit(pair_hash(seed_, kIdTag, a, b));
}

double PairUniformSource::by_tensor(std::uint64_t box_a, std::uint64_t idx_a,
                                    std::uint64_t box_b, std::uint64_t idx_b) const {
    // Store under the lexicographically first box; within one box, order by
    // occurrence index. U^{w,z}_{i,j} = U^{z,w}_{j,i} by construction.
    if (box_a > box_b || (box_a == box_b && idx_a > idx_b)) {
        std::swap(box_a, box_b);
        std::swap(idx_a, idx_b);
    }
    if (box_a == box_b && idx_a == idx_b)
        throw std::invalid_argument("PairUniformSource: equal tensor keys");
    return bits_to_unit(quad_hash(seed_, kTensorTag, box_a, idx_a, box_b, idx_b));
}

}  // namespace rcm
