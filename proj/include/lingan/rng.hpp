#pragma once

#include "lingan/types.hpp"

#include <cmath>
#include <cstdint>
#include <random>

namespace lingan {

// Deterministic random source. The engine (mt19937_64) and the seeding
// procedure (seed_seq) are fully specified by the standard, and the
// uniform/normal transforms below are explicit, so identically seeded
// generators produce bit-identical streams on any conforming platform.
// std::normal_distribution is deliberately avoided: its algorithm is
// implementation-defined.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : Rng(seed, 0) {}

    // Independent sub-stream of the given seed. Streams with different ids
    // are decorrelated by the seed_seq mixing.
    Rng(std::uint64_t seed, std::uint64_t stream) {
        std::seed_seq seq{static_cast<std::uint32_t>(seed & 0xffffffffu),
                          static_cast<std::uint32_t>(seed >> 32),
                          static_cast<std::uint32_t>(stream & 0xffffffffu),
                          static_cast<std::uint32_t>(stream >> 32)};
        engine_.seed(seq);
    }

    // Uniform on (0, 1): 53-bit mantissa, offset by half an ulp so the
    // endpoints are never produced (log() in the normal transform stays finite).
    double uniform() {
        return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
    }

    // Standard normal via the Box-Muller transform, pairs cached.
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        has_spare_ = true;
        return r * std::cos(a);
    }

    // Column-major fill: entry (0,0), (1,0), ... so that a taller/wider
    // matrix drawn from the same state extends a smaller one column by column.
    Matrix normal_matrix(Index rows, Index cols, double std_dev = 1.0) {
        detail::require(rows >= 0 && cols >= 0, "normal_matrix: negative size");
        detail::require(std_dev >= 0.0, "normal_matrix: negative std");
        Matrix out(rows, cols);
        for (Index j = 0; j < cols; ++j)
            for (Index i = 0; i < rows; ++i) out(i, j) = std_dev * normal();
        return out;
    }

    Vector normal_vector(Index n, double std_dev = 1.0) {
        Matrix m = normal_matrix(n, 1, std_dev);
        return m.col(0);
    }

    std::uint64_t raw() { return engine_(); }

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

// Fixed stream ids so experiment code never collides sub-streams.
namespace streams {
inline constexpr std::uint64_t data = 1;      // model + dataset draws
inline constexpr std::uint64_t pseudo = 2;    // pseudo-supervision latents
inline constexpr std::uint64_t init = 3;      // trainer initialization
inline constexpr std::uint64_t subset = 4;    // supervised coordinate subset
} // namespace streams

} // namespace lingan
