#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <random>
#include <utility>
#include <vector>

namespace hvi {

// Independent Mersenne-Twister stream for (seed, stream). Engine and
// seed_seq are fully specified by the standard, so draws are identical
// across platforms; the distribution helpers below avoid the
// implementation-defined std:: distributions for the same reason.
inline std::mt19937_64 substream(std::uint64_t seed, std::uint64_t stream)
{
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32), 0x68766975u};
    return std::mt19937_64(seq);
}

// Uniform on the open interval (0, 1), 53-bit resolution.
inline double uniform01(std::mt19937_64& eng)
{
    return (static_cast<double>(eng() >> 11) + 0.5) * 0x1.0p-53;
}

// Two independent standard normals (Box-Muller).
inline std::pair<double, double> normal_pair(std::mt19937_64& eng)
{
    double const u1 = uniform01(eng);
    double const u2 = uniform01(eng);
    double const rad = std::sqrt(-2.0 * std::log(u1));
    double const ang = 2.0 * std::numbers::pi * u2;
    return {rad * std::cos(ang), rad * std::sin(ang)};
}

// Random Latin hypercube on [0, 1]^d: row k of the result is point k, and
// each column visits every stratum [i/n, (i+1)/n) exactly once.
inline std::vector<std::vector<double>> latin_hypercube(std::size_t n, std::size_t d, std::mt19937_64& eng)
{
    std::vector<std::vector<double>> pts(n, std::vector<double>(d));
    std::vector<std::size_t> perm(n);
    for (std::size_t j = 0; j < d; ++j) {
        for (std::size_t k = 0; k < n; ++k) {
            perm[k] = k;
        }
        // Fisher-Yates with the portable uniform above
        for (std::size_t k = n; k > 1; --k) {
            auto const pick = static_cast<std::size_t>(uniform01(eng) * static_cast<double>(k));
            std::swap(perm[k - 1], perm[std::min(pick, k - 1)]);
        }
        for (std::size_t k = 0; k < n; ++k) {
            pts[k][j] = (static_cast<double>(perm[k]) + uniform01(eng)) / static_cast<double>(n);
        }
    }
    return pts;
}

} // namespace hvi
