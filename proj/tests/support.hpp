#pragma once

#include <cmath>
#include <random>
#include <vector>

#include <bisingular/bisymbol.hpp>
#include <bisingular/torus_fields.hpp>
#include <bisingular/wavefront.hpp>

namespace testsupport {

using namespace bisingular;

// Random trig polynomial in both variables, bandwidth <= bw, 1..3 modes.
// integral = true draws Gaussian integers in [-4,4]^2, so products and sums of these
// coefficients stay exact in double precision.
inline TrigPoly random_coefficient(std::mt19937_64& rng, int bw, bool integral = false) {
    std::uniform_int_distribution<int> nmodes(1, 3), kd(-bw, bw), iv(-4, 4);
    std::normal_distribution<double> g;
    TrigPoly t;
    int n = nmodes(rng);
    for (int i = 0; i < n; ++i) {
        int k1 = kd(rng), k2 = kd(rng);
        cplx v = integral ? cplx(iv(rng), iv(rng)) : cplx(g(rng), g(rng));
        t.set(k1, k2, t.at(k1, k2) + v);
    }
    return t;
}

// Random differential symbol: per-slot degree <= 2, coefficient bandwidth <= 3.
inline BiSymbol random_differential(std::mt19937_64& rng, int max_deg = 2, int bw = 3, bool integral = false) {
    std::uniform_int_distribution<int> nterms(1, 3), deg(0, max_deg);
    BiSymbol a;
    int n = nterms(rng);
    for (int i = 0; i < n; ++i)
        a += BiSymbol::coefficient(random_coefficient(rng, bw, integral)) * BiSymbol::xi(1, deg(rng)) * BiSymbol::xi(2, deg(rng));
    return a;
}

// Relative l2 difference over the common safe box.
inline double rel_diff(const CoeffField& a, const CoeffField& b) {
    int s1 = std::min(a.safe1(), b.safe1()), s2 = std::min(a.safe2(), b.safe2());
    double nb = b.norm(s1, s2);
    double d = (a - b).norm(s1, s2);
    return nb > 0 ? d / nb : d;
}

// Essential half-width of a mollified bump: nominal radius plus the half main lobe
// pi/M of its Jackson kernel (same M as bump_coeffs).
inline double bump_halfwidth(double radius, int mollifier_bw) {
    return radius + M_PI / std::max(2, mollifier_bw / 2 + 1);
}

// x-cells (cell c covers ((c - 1/2)h, (c + 1/2)h), h = 2 pi / cells) meeting the arc center +- halfwidth.
inline std::vector<int> arc_cells(double center, double halfwidth, int cells) {
    const double h = 2 * M_PI / cells;
    std::vector<int> out;
    for (int c = 0; c < cells; ++c) {
        bool hit = 2 * halfwidth + h >= 2 * M_PI;
        for (int w = -1; w <= 1 && !hit; ++w) {
            double lo = center - halfwidth + 2 * M_PI * w, hi = center + halfwidth + 2 * M_PI * w;
            hit = lo < (c + 0.5) * h && hi > (c - 0.5) * h;
        }
        if (hit) out.push_back(c);
    }
    return out;
}

// Factor-1 profile of a field of the form f(x1) delta(x2): the row summed against k2 = 0 is enough
// because the second factor has constant coefficients.
inline Field1D factor1_row(const CoeffField& u, int k2 = 0) {
    Field1D f;
    f.N = u.N();
    f.c.resize(static_cast<std::size_t>(2 * u.N() + 1));
    for (int k = -u.N(); k <= u.N(); ++k) f.c[static_cast<std::size_t>(k + u.N())] = u.at(k, k2);
    return f;
}

inline std::vector<Flag> axis2_flags(const std::vector<int>& c1s, int c2) {
    std::vector<Flag> v;
    for (int c : c1s)
        for (int s : {Axis2Pos, Axis2Neg}) v.push_back({c, c2, s, 0});
    return v;
}

}  // namespace testsupport
