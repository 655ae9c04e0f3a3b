#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <vector>

#include "bisymbol.hpp"

namespace bisingular {

struct SampleSpec {
    int x_points = 4;     // per factor, uniform on [0, 2pi)
    int per_octave = 4;   // xi samples per dyadic octave
    int max_log2 = 10;    // largest |xi| = 2^max_log2
    int xi_depth = 2;     // derivative depth per xi slot
    int x_depth = 1;      // derivative depth per x slot
    double growth_factor = 1.1;
};

struct EstimateReport {
    bool pass = false;
    double worst_ratio = 0;
    double top_band_max = 0;
    double prev_band_max = 0;
};

namespace detail {

inline std::vector<double> xi_samples(const SampleSpec& s) {
    std::vector<double> v{0.0};
    for (int t = 0; t <= s.max_log2 * s.per_octave; ++t) {
        double x = std::exp2(double(t) / s.per_octave);
        v.push_back(x);
        v.push_back(-x);
    }
    return v;
}

inline int band_of(double xi1, double xi2) {
    double m = std::max({1.0, std::abs(xi1), std::abs(xi2)});
    return int(std::floor(std::log2(m) + 1e-12));
}

inline double bracket(double xi) { return std::sqrt(1 + xi * xi); }

// Per-band maxima -> report; weight(xi1, xi2, a1, a2) is the claimed bound.
struct BandAccumulator {
    std::map<int, double> band_max;
    double worst = 0;
    void add(double xi1, double xi2, double ratio) {
        if (std::isnan(ratio)) ratio = std::numeric_limits<double>::infinity();
        double& b = band_max[band_of(xi1, xi2)];
        b = std::max(b, ratio);
        worst = std::max(worst, ratio);
    }
    EstimateReport finish(double growth) const {
        EstimateReport r;
        r.worst_ratio = worst;
        if (band_max.size() < 2) return r;
        auto top = std::prev(band_max.end());
        r.top_band_max = top->second;
        r.prev_band_max = std::prev(top)->second;
        r.pass = std::isfinite(worst) && r.top_band_max <= growth * r.prev_band_max;
        return r;
    }
};

inline double order_weight(ExtInt m, int drop, double xi) {
    if (m.is_neg_inf()) return 0.0;
    return std::pow(bracket(xi), double(m.value() - drop));
}

}  // namespace detail

// Numerical check of |D_xi^a D_x^b sym| <= C <xi1>^(m1-|a1|) <xi2>^(m2-|a2|):
// the per-band ratio maximum must not grow between the two largest dyadic bands.
inline EstimateReport estimate_check(const BiSymbol& a, const BiOrder& claimed, const SampleSpec& spec = {}) {
    const auto xis = detail::xi_samples(spec);
    std::vector<std::pair<double, double>> xs;
    for (int i = 0; i < spec.x_points; ++i)
        for (int j = 0; j < spec.x_points; ++j)
            xs.push_back({2 * M_PI * i / spec.x_points, 2 * M_PI * j / spec.x_points});

    detail::BandAccumulator acc;
    for (int a1 = 0; a1 <= spec.xi_depth; ++a1)
        for (int a2 = 0; a2 <= spec.xi_depth; ++a2)
            for (int b1 = 0; b1 <= spec.x_depth; ++b1)
                for (int b2 = 0; b2 <= spec.x_depth; ++b2) {
                    BiSymbol d = a.derivative(MultiIndexPair{{a1}, {a2}}, MultiIndexPair{{b1}, {b2}});
                    // tabulate per-term factors
                    struct T {
                        std::vector<cplx> cx;
                        std::vector<double> f1, f2;
                    };
                    std::vector<T> tab;
                    for (auto& [k, c] : d.terms()) {
                        T t;
                        for (auto& [x1, x2] : xs) t.cx.push_back(c.eval(x1, x2));
                        for (double v : xis) t.f1.push_back(k.first.eval(v));
                        for (double v : xis) t.f2.push_back(k.second.eval(v));
                        tab.push_back(std::move(t));
                    }
                    for (std::size_t i1 = 0; i1 < xis.size(); ++i1)
                        for (std::size_t i2 = 0; i2 < xis.size(); ++i2) {
                            double w = detail::order_weight(claimed.m1, a1, xis[i1]) *
                                       detail::order_weight(claimed.m2, a2, xis[i2]);
                            double worst = 0;
                            for (std::size_t ix = 0; ix < xs.size(); ++ix) {
                                cplx s = 0;
                                for (auto& t : tab) s += t.cx[ix] * (t.f1[i1] * t.f2[i2]);
                                worst = std::max(worst, std::abs(s));
                            }
                            double ratio = worst == 0 ? 0.0 : (w == 0 ? std::numeric_limits<double>::infinity() : worst / w);
                            acc.add(xis[i1], xis[i2], ratio);
                        }
                }
    return acc.finish(spec.growth_factor);
}

// Same check for a symbol given as a function of (xi1, xi2) only; derivatives by
// central differences with step proportional to <xi>.
inline EstimateReport estimate_check(const std::function<double(double, double)>& f, const BiOrder& claimed,
                                     const SampleSpec& spec = {}) {
    const auto xis = detail::xi_samples(spec);
    auto deriv = [&](double x1, double x2, int a1, int a2) {
        double h1 = 1e-2 * std::max(1.0, std::abs(x1)), h2 = 1e-2 * std::max(1.0, std::abs(x2));
        std::function<double(double, double, int)> d2 = [&](double y1, double y2, int k) -> double {
            if (k == 0) return f(y1, y2);
            if (k == 1) return (f(y1, y2 + h2) - f(y1, y2 - h2)) / (2 * h2);
            return (f(y1, y2 + h2) - 2 * f(y1, y2) + f(y1, y2 - h2)) / (h2 * h2);
        };
        auto g = [&](double y1) { return d2(y1, x2, a2); };
        if (a1 == 0) return g(x1);
        if (a1 == 1) return (g(x1 + h1) - g(x1 - h1)) / (2 * h1);
        return (g(x1 + h1) - 2 * g(x1) + g(x1 - h1)) / (h1 * h1);
    };
    detail::BandAccumulator acc;
    for (int a1 = 0; a1 <= spec.xi_depth; ++a1)
        for (int a2 = 0; a2 <= spec.xi_depth; ++a2)
            for (double x1 : xis)
                for (double x2 : xis) {
                    double w = detail::order_weight(claimed.m1, a1, x1) * detail::order_weight(claimed.m2, a2, x2);
                    double v = std::abs(deriv(x1, x2, a1, a2));
                    acc.add(x1, x2, v == 0 ? 0.0 : (w == 0 ? std::numeric_limits<double>::infinity() : v / w));
                }
    return acc.finish(spec.growth_factor);
}

}  // namespace bisingular
