#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "plab/qstate.hpp"

namespace plab::test {

inline std::vector<cplx> random_amplitudes(std::size_t n, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    std::vector<cplx> v(n);
    double s = 0.0;
    for (auto& c : v) {
        c = cplx(g(rng), g(rng));
        s += std::norm(c);
    }
    for (auto& c : v)
        c /= std::sqrt(s);
    return v;
}

inline Vec2 random_unit2(std::mt19937_64& rng)
{
    std::normal_distribution<double> g;
    Vec2 v(cplx(g(rng), g(rng)), cplx(g(rng), g(rng)));
    return v / v.norm();
}

inline double max_abs_diff(const Mat2& a, const Mat2& b) { return (a - b).cwiseAbs().maxCoeff(); }

} // namespace plab::test
