#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <complex>
#include <memory>
#include <string>
#include <vector>

#include "xi_factor.hpp"

namespace bisingular {

// Fourier coefficients of the generalized Jackson kernel (F_M)^power, where
// F_M(x) = (sin(Mx/2) / (M sin(x/2)))^2 is the normalized Fejer kernel.
// Returned for j = -bw..bw, bw = power*(M-1); value 1 at x = 0. The kernel has
// zeros of order 2*power at the points 2*pi*l/M, l != 0.
inline std::vector<double> jackson_coeffs(int M, int power) {
    std::vector<double> f(std::size_t(2 * M - 1));
    for (int j = -(M - 1); j <= M - 1; ++j) f[std::size_t(j + M - 1)] = (1.0 - std::abs(j) / double(M)) / M;
    std::vector<double> acc{1.0};
    for (int p = 0; p < power; ++p) {
        std::vector<double> next(acc.size() + f.size() - 1, 0.0);
        for (std::size_t a = 0; a < acc.size(); ++a)
            for (std::size_t b = 0; b < f.size(); ++b) next[a + b] += acc[a] * f[b];
        acc.swap(next);
    }
    return acc;
}

// 1-D coefficients (k = -N..N) of a smooth bump: indicator of [center-radius,
// center+radius] convolved with a unit-mass Jackson kernel of bandwidth ~mollifier_bw.
inline std::vector<std::complex<double>> bump_coeffs(int N, double center, double radius, int mollifier_bw) {
    int M = std::max(2, mollifier_bw / 2 + 1);
    auto w = jackson_coeffs(M, 2);
    int bw = int(w.size() / 2);
    double w0 = w[std::size_t(bw)];
    std::vector<std::complex<double>> c(std::size_t(2 * N + 1));
    for (int k = -N; k <= N; ++k) {
        double ind = k == 0 ? radius / M_PI : std::sin(k * radius) / (M_PI * k);
        double wk = std::abs(k) <= bw ? w[std::size_t(k + bw)] / w0 : 0.0;
        c[std::size_t(k + N)] = ind * wk * std::polar(1.0, -k * center);
    }
    return c;
}

// Symbol of convolution with a unit-mass centred bump, as a tabulated profile.
inline ProfilePtr bump_profile(double radius, int mollifier_bw) {
    int M = std::max(2, mollifier_bw / 2 + 1);
    int bw = 2 * (M - 1);
    auto c = bump_coeffs(bw, 0.0, radius, mollifier_bw);
    double mass = c[std::size_t(bw)].real();
    std::vector<double> v;
    for (auto& x : c) v.push_back(x.real() / mass);
    char name[64];
    std::snprintf(name, sizeof name, "bump[%g,%d]", radius, mollifier_bw);
    return std::make_shared<TabulatedProfile>(name, v);
}

// C^1 taper: 0 for t <= 0, 1 for t >= 1.
inline double smoothstep(double t) {
    t = std::clamp(t, 0.0, 1.0);
    return t * t * (3 - 2 * t);
}

}  // namespace bisingular
