// Independent reference computations used by the tests
#pragma once
#include <array>
#include <complex>
#include <random>

namespace wgqed::testing {

using c = std::complex<double>;
using Mat3 = std::array<std::array<c, 3>, 3>;

// Inverse by cofactors.
inline Mat3 adjugate_inverse(const Mat3& m)
{
    const auto cof = [&](int r, int col) {
        const int r0 = (r + 1) % 3, r1 = (r + 2) % 3;
        const int c0 = (col + 1) % 3, c1 = (col + 2) % 3;
        return m[r0][c0] * m[r1][c1] - m[r0][c1] * m[r1][c0];
    };
    const c det = m[0][0] * cof(0, 0) + m[0][1] * cof(0, 1) + m[0][2] * cof(0, 2);
    Mat3 inv{};
    for (int r = 0; r < 3; ++r)
        for (int col = 0; col < 3; ++col) inv[r][col] = cof(col, r) / det;
    return inv;
}

struct Rng {
    std::mt19937_64 gen;
    explicit Rng(std::uint64_t seed) : gen(seed) {}
    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(gen); }
};

inline double rel_err(c got, c want) { return std::abs(got - want) / std::abs(want); }

} // namespace wgqed::testing
