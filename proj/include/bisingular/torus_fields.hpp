#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <functional>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "bisymbol.hpp"
#include "errors.hpp"
#include "kernels.hpp"
#include "parser.hpp"

namespace bisingular {

// Fourier coefficients are normalized so that u(x) = sum_k u_k e^{ik.x}; the
// builtin delta therefore has u_k == 1 (it is 2*pi times the Dirac measure per factor).

namespace detail {
inline cplx cmul(cplx a, cplx b) {  // plain product, no NaN recovery path
    return {a.real() * b.real() - a.imag() * b.imag(), a.real() * b.imag() + a.imag() * b.real()};
}
}  // namespace detail

// Arc [lo, hi] on the circle (lo may be negative or hi > 2pi).
struct Arc {
    double lo, hi;
};

struct Field1D {
    int N = 0;
    std::vector<cplx> c;  // k = -N..N
    double growth = 0;
    std::vector<Arc> support;  // empty: identically zero
    bool full_support = false;

    cplx at(int k) const { return std::abs(k) > N ? cplx(0) : c[std::size_t(k + N)]; }
};

class CoeffField {
public:
    CoeffField() = default;
    explicit CoeffField(int N) : N_(N), c_(std::size_t(2 * N + 1) * std::size_t(2 * N + 1)), safe1_(N), safe2_(N) {}

    int N() const { return N_; }
    int width() const { return 2 * N_ + 1; }
    std::size_t index(int k1, int k2) const { return std::size_t(k1 + N_) * std::size_t(width()) + std::size_t(k2 + N_); }
    cplx& at(int k1, int k2) { return c_[index(k1, k2)]; }
    cplx at(int k1, int k2) const { return c_[index(k1, k2)]; }
    cplx get(int k1, int k2) const {
        return (std::abs(k1) > N_ || std::abs(k2) > N_) ? cplx(0) : c_[index(k1, k2)];
    }
    std::vector<cplx>& data() { return c_; }
    const std::vector<cplx>& data() const { return c_; }

    double growth_order = 0;
    int safe1() const { return safe1_; }
    int safe2() const { return safe2_; }
    int safe_band() const { return std::min(safe1_, safe2_); }
    void set_safe(int s1, int s2) {
        safe1_ = std::max(-1, std::min(s1, N_));
        safe2_ = std::max(-1, std::min(s2, N_));
    }

    // support metadata in x1 and x2 (union of arcs per factor pair)
    struct SupportBox {
        Arc x1, x2;
    };
    std::vector<SupportBox> support;

    CoeffField& operator+=(const CoeffField& o) {
        check_same(o);
        for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
        growth_order = std::max(growth_order, o.growth_order);
        set_safe(std::min(safe1_, o.safe1_), std::min(safe2_, o.safe2_));
        support.insert(support.end(), o.support.begin(), o.support.end());
        return *this;
    }
    CoeffField& operator*=(cplx s) {
        for (auto& v : c_) v *= s;
        return *this;
    }
    friend CoeffField operator+(CoeffField a, const CoeffField& b) { return a += b; }
    friend CoeffField operator-(CoeffField a, const CoeffField& b) {
        a.check_same(b);
        for (std::size_t i = 0; i < a.c_.size(); ++i) a.c_[i] -= b.c_[i];
        a.set_safe(std::min(a.safe1_, b.safe1_), std::min(a.safe2_, b.safe2_));
        a.growth_order = std::max(a.growth_order, b.growth_order);
        return a;
    }

    // l2 norm over the box |k1| <= b1, |k2| <= b2
    double norm(int b1, int b2) const {
        double s = 0;
        for (int k1 = -b1; k1 <= b1; ++k1)
            for (int k2 = -b2; k2 <= b2; ++k2) s += std::norm(at(k1, k2));
        return std::sqrt(s);
    }
    double max_abs() const {
        double m = 0;
        for (auto& v : c_) m = std::max(m, std::abs(v));
        return m;
    }
    bool is_zero() const {
        for (auto& v : c_)
            if (v != cplx(0)) return false;
        return true;
    }

    // swap(u)(k1,k2) = u(k2,k1)
    CoeffField swapped() const {
        CoeffField r(N_);
        for (int k1 = -N_; k1 <= N_; ++k1)
            for (int k2 = -N_; k2 <= N_; ++k2) r.at(k1, k2) = at(k2, k1);
        r.growth_order = growth_order;
        r.set_safe(safe2_, safe1_);
        for (auto& b : support) r.support.push_back({b.x2, b.x1});
        return r;
    }

private:
    void check_same(const CoeffField& o) const {
        if (o.N_ != N_) throw std::invalid_argument("CoeffField: band mismatch");
    }
    int N_ = 0;
    std::vector<cplx> c_;
    int safe1_ = 0, safe2_ = 0;
};

// ---------------------------------------------------------------- builtins

namespace builtin {

inline constexpr double kNoGrowth = -std::numeric_limits<double>::infinity();
inline const Arc kFullArc{0.0, 2 * M_PI};

inline Field1D one(int N) {
    Field1D f{N, std::vector<cplx>(std::size_t(2 * N + 1)), kNoGrowth, {kFullArc}, true};
    f.c[std::size_t(N)] = 1.0;
    return f;
}

inline Field1D delta_at(int N, double a = 0.0) {
    Field1D f{N, std::vector<cplx>(std::size_t(2 * N + 1)), 0.0, {{a, a}}, false};
    for (int k = -N; k <= N; ++k) f.c[std::size_t(k + N)] = std::polar(1.0, -k * a);
    return f;
}

// D^order delta_a with D = -i d/dx: coefficients k^order e^{-ika}
inline Field1D ddelta(int N, int order, double a = 0.0) {
    Field1D f = delta_at(N, a);
    for (int k = -N; k <= N; ++k) f.c[std::size_t(k + N)] *= std::pow(double(k), order);
    f.growth = order;
    return f;
}

inline int default_mollifier(int N) { return std::max(4, N / 16); }

inline Field1D bump(int N, double center, double radius, int mollifier_bw) {
    Field1D f{N, bump_coeffs(N, center, radius, mollifier_bw), kNoGrowth, {}, false};
    int M = std::max(2, mollifier_bw / 2 + 1);
    double lobe = 2 * M_PI / M;
    f.support = {{center - radius - lobe, center + radius + lobe}};
    return f;
}

// Real random field with compactly supported smooth spectral window |k| < K.
inline Field1D random_smooth_1d(int N, std::uint64_t seed, int K = 0) {
    if (K <= 0) K = std::max(4, N / 8);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, 1.0);
    Field1D f{N, std::vector<cplx>(std::size_t(2 * N + 1)), kNoGrowth, {kFullArc}, true};
    for (int k = 0; k <= std::min(N, K - 1); ++k) {
        double t = double(k) / K;
        double w = std::exp(1.0 - 1.0 / (1.0 - t * t));
        cplx v(g(rng) * w, k == 0 ? 0.0 : g(rng) * w);
        f.c[std::size_t(k + N)] = v;
        f.c[std::size_t(-k + N)] = std::conj(v);
    }
    return f;
}

inline CoeffField tensor(const Field1D& a, const Field1D& b) {
    if (a.N != b.N) throw std::invalid_argument("tensor: band mismatch");
    CoeffField u(a.N);
    for (int k1 = -a.N; k1 <= a.N; ++k1) {
        cplx x = a.c[std::size_t(k1 + a.N)];
        if (x == cplx(0)) continue;
        for (int k2 = -a.N; k2 <= a.N; ++k2) u.at(k1, k2) = detail::cmul(x, b.c[std::size_t(k2 + a.N)]);
    }
    auto pos = [](double g) { return std::isfinite(g) ? std::max(g, 0.0) : 0.0; };
    u.growth_order = (!std::isfinite(a.growth) && !std::isfinite(b.growth)) ? kNoGrowth : pos(a.growth) + pos(b.growth);
    for (auto& x : a.support)
        for (auto& y : b.support) u.support.push_back({x, y});
    return u;
}

inline CoeffField one2(int N) { return tensor(one(N), one(N)); }
inline CoeffField delta_at(int N, double a1, double a2) { return tensor(delta_at(N, a1), delta_at(N, a2)); }

// 2*pi delta(x1 - x2): coefficients 1 on the anti-diagonal k1 + k2 = 0
inline CoeffField diag_delta(int N) {
    CoeffField u(N);
    for (int k = -N; k <= N; ++k) u.at(k, -k) = 1.0;
    u.growth_order = 0;
    // support is the diagonal; recorded as the full box
    u.support.push_back({kFullArc, kFullArc});
    return u;
}

inline CoeffField smooth_bump(int N, double c1, double c2, double radius) {
    return tensor(bump(N, c1, radius, default_mollifier(N)), bump(N, c2, radius, default_mollifier(N)));
}

// Real random field on the product with compactly supported smooth spectral window.
inline CoeffField random_smooth(int N, std::uint64_t seed, int K = 0) {
    if (K <= 0) K = std::max(4, N / 8);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, 1.0);
    CoeffField u(N);
    for (int k1 = -K; k1 <= K; ++k1)
        for (int k2 = -K; k2 <= K; ++k2) {
            if (std::abs(k1) > N || std::abs(k2) > N) continue;
            // fill one representative of each +-k pair
            if (k1 < 0 || (k1 == 0 && k2 < 0)) continue;
            double t2 = (double(k1) * k1 + double(k2) * k2) / (double(K) * K);
            if (t2 >= 1) continue;
            double w = std::exp(1.0 - 1.0 / (1.0 - t2));
            cplx v(g(rng) * w, (k1 == 0 && k2 == 0) ? 0.0 : g(rng) * w);
            u.at(k1, k2) = v;
            u.at(-k1, -k2) = std::conj(v);
        }
    u.growth_order = kNoGrowth;
    u.support.push_back({kFullArc, kFullArc});
    return u;
}

// f * u for a trigonometric polynomial f: exact convolution, safe band shrinks by deg f
inline CoeffField multiply(const TrigPoly& f, const CoeffField& u) {
    const int N = u.N();
    CoeffField v(N);
    for (auto& [k, fk] : f.coeffs())
        for (int k1 = -N; k1 <= N; ++k1) {
            int s1 = k1 - k.first;
            if (std::abs(s1) > N) continue;
            for (int k2 = -N; k2 <= N; ++k2) {
                int s2 = k2 - k.second;
                if (std::abs(s2) > N) continue;
                v.at(k1, k2) += detail::cmul(fk, u.at(s1, s2));
            }
        }
    v.growth_order = u.growth_order;
    v.set_safe(u.safe1() - f.bandwidth(1), u.safe2() - f.bandwidth(2));
    v.support = u.support;
    return v;
}

}  // namespace builtin

// ---------------------------------------------------------------- descriptors

namespace detail {

struct DistBuilder {
    int N;
    std::uint64_t seed;

    struct Value {
        bool two_d = false;
        Field1D f1;
        CoeffField f2;
    };

    static double num(const SExpr& e) {
        double v;
        if (e.is_list() || !parse_number(e.atom, v)) throw ParseError("number expected", e.pos);
        return v;
    }

    CoeffField as2(const Value& v, std::size_t pos) const {
        if (!v.two_d) throw ParseError("two-variable distribution expected", pos);
        return v.f2;
    }
    Field1D as1(const Value& v, std::size_t pos) const {
        if (v.two_d) throw ParseError("one-variable distribution expected", pos);
        return v.f1;
    }

    Value build(const SExpr& e) {
        std::string head = e.is_list() ? (e.items[0].is_list() ? "" : e.items[0].atom) : e.atom;
        if (head.empty()) throw ParseError("distribution name expected", e.pos);
        std::size_t nargs = e.is_list() ? e.items.size() - 1 : 0;
        auto arg = [&](std::size_t i) -> const SExpr& { return e.items[i]; };
        auto need = [&](std::size_t lo, std::size_t hi) {
            if (nargs < lo || nargs > hi) throw ParseError("wrong number of arguments to '" + head + "'", e.pos);
        };
        Value v;
        auto one_d = [&](Field1D f) {
            v.f1 = std::move(f);
            return v;
        };
        auto two_d = [&](CoeffField f) {
            v.two_d = true;
            v.f2 = std::move(f);
            return v;
        };
        if (head == "one") {
            need(0, 0);
            return one_d(builtin::one(N));
        }
        if (head == "delta") {
            need(0, 0);
            return one_d(builtin::delta_at(N, 0.0));
        }
        if (head == "delta_at") {
            need(1, 2);
            if (nargs == 1) return one_d(builtin::delta_at(N, num(arg(1))));
            return two_d(builtin::delta_at(N, num(arg(1)), num(arg(2))));
        }
        if (head == "ddelta") {
            need(1, 2);
            return one_d(builtin::ddelta(N, int(num(arg(1))), nargs > 1 ? num(arg(2)) : 0.0));
        }
        if (head == "bump") {
            need(2, 3);
            int bw = nargs > 2 ? int(num(arg(3))) : builtin::default_mollifier(N);
            return one_d(builtin::bump(N, num(arg(1)), num(arg(2)), bw));
        }
        if (head == "smooth1") {
            need(0, 1);
            return one_d(builtin::random_smooth_1d(N, nargs ? std::uint64_t(num(arg(1))) : seed));
        }
        if (head == "smooth" || head == "random_smooth") {
            need(0, 1);
            return two_d(builtin::random_smooth(N, nargs ? std::uint64_t(num(arg(1))) : seed));
        }
        if (head == "diag_delta") {
            need(0, 0);
            return two_d(builtin::diag_delta(N));
        }
        if (head == "smooth_bump") {
            need(3, 3);
            return two_d(builtin::smooth_bump(N, num(arg(1)), num(arg(2)), num(arg(3))));
        }
        if (head == "tensor") {
            need(2, 2);
            return two_d(builtin::tensor(as1(build(arg(1)), arg(1).pos), as1(build(arg(2)), arg(2).pos)));
        }
        if (head == "sum") {
            need(2, 100);
            CoeffField s = as2(build(arg(1)), arg(1).pos);
            for (std::size_t i = 2; i <= nargs; ++i) s += as2(build(arg(i)), arg(i).pos);
            return two_d(std::move(s));
        }
        if (head == "scale") {
            need(2, 2);
            CoeffField s = as2(build(arg(2)), arg(2).pos);
            s *= num(arg(1));
            return two_d(std::move(s));
        }
        if (head == "swap") {
            need(1, 1);
            return two_d(as2(build(arg(1)), arg(1).pos).swapped());
        }
        if (head == "trigmul" || head == "product") {
            need(2, 2);
            TrigPoly f = arg(1).is_list() ? parse_symbol_coefficient(arg(1)) : named_coefficient(arg(1).atom, arg(1).pos);
            return two_d(builtin::multiply(f, as2(build(arg(2)), arg(2).pos)));
        }
        throw ParseError("unknown distribution '" + head + "'", e.pos);
    }

    static TrigPoly parse_symbol_coefficient(const SExpr& e) {
        // (mode k1 k2 re [im]) terms summed with +
        if (e.items[0].atom == "mode") {
            int k1 = int(num(e.items[1])), k2 = int(num(e.items[2]));
            double re = num(e.items[3]), im = e.items.size() > 4 ? num(e.items[4]) : 0.0;
            return TrigPoly::mode(k1, k2, cplx(re, im));
        }
        if (e.items[0].atom == "+") {
            TrigPoly s;
            for (std::size_t i = 1; i < e.items.size(); ++i)
                s += e.items[i].is_list() ? parse_symbol_coefficient(e.items[i]) : named_coefficient(e.items[i].atom, e.items[i].pos);
            return s;
        }
        throw ParseError("coefficient expected", e.pos);
    }
};

}  // namespace detail

// Distribution descriptors: s-expressions such as (tensor delta one) or the bare
// form "tensor delta one"; see README for the full catalogue.
inline CoeffField synthesize(const std::string& descriptor, int N, std::uint64_t seed = 1) {
    if (N < 16) throw std::invalid_argument("synthesize: N must be >= 16");
    std::string text = descriptor;
    std::size_t first = text.find_first_not_of(" \t\n");
    if (first != std::string::npos && text[first] != '(') text = "(" + text + ")";
    SExpr e = read_sexpr(text);
    // (name) with a single atom reduces to the atom
    detail::DistBuilder b{N, seed};
    auto v = b.build(e.is_list() && e.items.size() == 1 ? e.items[0] : e);
    if (!v.two_d) throw ParseError("descriptor describes a one-variable distribution", 0);
    return v.f2;
}

// ---------------------------------------------------------------- operators

namespace detail {

inline std::vector<double> lattice_values(const Atom& a, int N) {
    if (a.p < 0) throw ClassUnsupported("negative power of xi is singular on the lattice");
    for (auto& [c, h] : a.shifts)
        if (c == 0 && h < 0) throw ClassUnsupported("negative power of |xi| is singular on the lattice");
    std::vector<double> v(std::size_t(2 * N + 1));
    for (int k = -N; k <= N; ++k) v[std::size_t(k + N)] = a.eval(double(k));
    return v;
}

inline double positive_part(ExtInt m) { return m.is_neg_inf() ? 0.0 : std::max<double>(0.0, double(m.value())); }

}  // namespace detail

// Left quantization: multiplier at the input frequency, then convolution with the
// coefficient: v(k) = sum_j c(j) f1(k1-j1) f2(k2-j2) u(k-j).
inline CoeffField apply_operator(const BiSymbol& a, const CoeffField& u) {
    const int N = u.N(), W = u.width();
    CoeffField v(N);
    std::vector<cplx> w(u.data().size());
    for (auto& [key, coef] : a.terms()) {
        auto m1 = detail::lattice_values(key.first, N);
        auto m2 = detail::lattice_values(key.second, N);
        for (int k1 = -N; k1 <= N; ++k1) {
            const double f1 = m1[std::size_t(k1 + N)];
            const std::size_t row = std::size_t(k1 + N) * std::size_t(W);
            for (int k2 = -N; k2 <= N; ++k2)
                w[row + std::size_t(k2 + N)] = u.data()[row + std::size_t(k2 + N)] * (f1 * m2[std::size_t(k2 + N)]);
        }
        for (auto& [j, cj] : coef.coeffs()) {
            const int j1 = j.first, j2 = j.second;
            for (int k1 = std::max(-N, -N + j1); k1 <= std::min(N, N + j1); ++k1) {
                cplx* out = &v.data()[v.index(k1, 0)];
                const cplx* in = &w[std::size_t(k1 - j1 + N) * std::size_t(W) + std::size_t(N)];
                for (int k2 = std::max(-N, -N + j2); k2 <= std::min(N, N + j2); ++k2)
                    out[k2] += detail::cmul(cj, in[k2 - j2]);
            }
        }
    }
    BiOrder o = a.bi_order();
    v.growth_order = u.growth_order + detail::positive_part(o.m1) + detail::positive_part(o.m2);
    v.set_safe(u.safe1() - a.coefficient_bandwidth(1), u.safe2() - a.coefficient_bandwidth(2));
    v.support = u.support;
    return v;
}

// A = chi(x_i) psi(D_i) acting on factor i only.
struct FactorOperator {
    TrigPoly chi{1.0};                     // depends on x_i only
    std::function<cplx(int)> multiplier;  // lattice profile, empty = 1
};

inline CoeffField apply_factor_operator(const FactorOperator& A, int which, const CoeffField& u) {
    if (A.chi.depends_on(3 - which)) throw ClassUnsupported("factor coefficient depends on the other variable");
    const int N = u.N();
    std::vector<cplx> psi(std::size_t(2 * N + 1), 1.0);
    if (A.multiplier)
        for (int k = -N; k <= N; ++k) psi[std::size_t(k + N)] = A.multiplier(k);
    CoeffField v(N);
    for (auto& [j, cj] : A.chi.coeffs()) {
        int jj = which == 1 ? j.first : j.second;
        for (int k1 = -N; k1 <= N; ++k1)
            for (int k2 = -N; k2 <= N; ++k2) {
                int s1 = which == 1 ? k1 - jj : k1, s2 = which == 2 ? k2 - jj : k2;
                if (std::abs(s1) > N || std::abs(s2) > N) continue;
                cplx m = psi[std::size_t((which == 1 ? s1 : s2) + N)];
                v.at(k1, k2) += detail::cmul(cj, detail::cmul(m, u.at(s1, s2)));
            }
    }
    v.growth_order = u.growth_order;
    int b = A.chi.bandwidth(which);
    v.set_safe(which == 1 ? u.safe1() - b : u.safe1(), which == 2 ? u.safe2() - b : u.safe2());
    v.support = u.support;
    return v;
}

// Factor operator from a one-slot symbol (coefficient on x_i, multiplier on xi_i).
inline CoeffField apply_factor_operator(const BiSymbol& a, int which, const CoeffField& u) {
    for (auto& [k, c] : a.terms()) {
        const Atom& other = which == 1 ? k.second : k.first;
        if (!other.is_constant() || c.depends_on(3 - which))
            throw ClassUnsupported("symbol acts on both factors");
    }
    return apply_operator(a, u);
}

// Samples u on the M x M grid x = 2*pi*(a1, a2)/M.
inline std::vector<cplx> evaluate_on_grid(const CoeffField& u, int M) {
    const int N = u.N();
    if (M < 2 * N + 1) throw AliasRisk("grid of size " + std::to_string(M) + " aliases band " + std::to_string(N));
    std::vector<cplx> tw(static_cast<std::size_t>(M));
    for (int t = 0; t < M; ++t) tw[std::size_t(t)] = std::polar(1.0, 2 * M_PI * t / M);
    auto e = [&](int k, int a) {
        long t = (long(k) * a) % M;
        if (t < 0) t += M;
        return tw[std::size_t(t)];
    };
    // transform along k2 first
    std::vector<cplx> half(std::size_t(2 * N + 1) * std::size_t(M));
    for (int k1 = -N; k1 <= N; ++k1)
        for (int a2 = 0; a2 < M; ++a2) {
            cplx s = 0;
            for (int k2 = -N; k2 <= N; ++k2) s += detail::cmul(u.at(k1, k2), e(k2, a2));
            half[std::size_t(k1 + N) * std::size_t(M) + std::size_t(a2)] = s;
        }
    std::vector<cplx> out(std::size_t(M) * std::size_t(M));
    for (int a1 = 0; a1 < M; ++a1)
        for (int a2 = 0; a2 < M; ++a2) {
            cplx s = 0;
            for (int k1 = -N; k1 <= N; ++k1) s += detail::cmul(half[std::size_t(k1 + N) * std::size_t(M) + std::size_t(a2)], e(k1, a1));
            out[std::size_t(a1) * std::size_t(M) + std::size_t(a2)] = s;
        }
    return out;
}

inline cplx evaluate_at(const Field1D& f, double x) {
    cplx s = 0;
    for (int k = -f.N; k <= f.N; ++k) s += f.c[std::size_t(k + f.N)] * std::polar(1.0, k * x);
    return s;
}

// ---------------------------------------------------------------- cutoffs and cones

// Smoothed indicator of a ball: indicator of radius 3/4 width convolved with a
// unit-mass generalized Jackson kernel; bandwidth grows until the tolerances hold.
struct Cutoff {
    int factor = 1;
    double center = 0, width = 1;
    int bandwidth = 0;
    TrigPoly coeffs;  // on x_factor
    double achieved_eps = 1;

    double value(double x) const {
        double x1 = factor == 1 ? x : 0, x2 = factor == 2 ? x : 0;
        return coeffs.eval(x1, x2).real();
    }

    // worst violation of: value in [0,1], >= 1 on the width/2 ball, <= 0 outside the width ball
    double measure(int samples = 4096) const {
        double worst = 0;
        for (int i = 0; i < samples; ++i) {
            double x = 2 * M_PI * i / samples;
            double d = std::abs(std::remainder(x - center, 2 * M_PI));
            double v = value(x);
            worst = std::max({worst, -v, v - 1});
            if (d <= width / 2) worst = std::max(worst, 1 - v);
            if (d >= width) worst = std::max(worst, v);
        }
        return worst;
    }

    static Cutoff make(int factor, double center, double width, double eps = 1e-6, int power = 4) {
        for (int M = 8; M <= 4096; M *= 2) {
            Cutoff c;
            c.factor = factor, c.center = center, c.width = width;
            auto J = jackson_coeffs(M, power);
            int bw = int(J.size() / 2);
            double r = 0.75 * width;
            for (int k = -bw; k <= bw; ++k) {
                double ind = k == 0 ? r / M_PI : std::sin(k * r) / (M_PI * k);
                cplx v = ind * J[std::size_t(k + bw)] / J[std::size_t(bw)] * std::polar(1.0, -k * center);
                if (factor == 1) c.coeffs.set(k, 0, v);
                else c.coeffs.set(0, k, v);
            }
            c.bandwidth = bw;
            c.achieved_eps = c.measure();
            if (c.achieved_eps <= eps) return c;
        }
        throw std::runtime_error("Cutoff: tolerance not reachable");
    }
};

struct ConeLocalizer {
    enum class Which { Factor1, Factor2, Joint };
    Which which = Which::Factor1;
    int s1 = 1, s2 = 1;   // signs; for a factor cone only the matching one is used
    double margin = 0.2;  // angular margin of a joint quadrant core
    double r0 = 2.0;

    double value(int k1, int k2) const {
        switch (which) {
            case Which::Factor1: return smoothstep((s1 * k1 - r0) / r0);
            case Which::Factor2: return smoothstep((s2 * k2 - r0) / r0);
            default: {
                if (s1 * k1 <= 0 || s2 * k2 <= 0) return 0.0;
                double r = std::hypot(double(k1), double(k2));
                double th = std::atan2(std::abs(double(k2)), std::abs(double(k1)));
                double edge = std::min(th, M_PI / 2 - th);
                return smoothstep((r - r0) / r0) * smoothstep(edge / margin);
            }
        }
    }
    bool inside(int k1, int k2) const { return value(k1, k2) > 0; }
};

// ---------------------------------------------------------------- serialization

inline void save_field(const CoeffField& u, const std::string& stem, const nlohmann::json& extra = {}) {
    std::ofstream bin(stem + ".bin", std::ios::binary);
    if (!bin) throw std::runtime_error("cannot write " + stem + ".bin");
    auto put_u32 = [&](std::uint32_t x) {
        unsigned char b[4] = {static_cast<unsigned char>(x), static_cast<unsigned char>(x >> 8),
                              static_cast<unsigned char>(x >> 16), static_cast<unsigned char>(x >> 24)};
        bin.write(reinterpret_cast<char*>(b), 4);
    };
    auto put_f32 = [&](float f) {
        std::uint32_t x;
        std::memcpy(&x, &f, 4);
        put_u32(x);
    };
    auto put_f64 = [&](double d) {
        std::uint64_t x;
        std::memcpy(&x, &d, 8);
        put_u32(std::uint32_t(x));
        put_u32(std::uint32_t(x >> 32));
    };
    bin.write("BSCF", 4);
    put_u32(std::uint32_t(u.N()));
    put_f64(u.growth_order);
    put_u32(std::uint32_t(std::int32_t(u.safe1())));
    put_u32(std::uint32_t(std::int32_t(u.safe2())));
    for (auto& v : u.data()) {
        put_f32(float(v.real()));
        put_f32(float(v.imag()));
    }
    nlohmann::json side = extra;
    side["format"] = "complex64-le";
    side["layout"] = "row-major k1 in [-N,N], k2 in [-N,N]";
    side["N"] = u.N();
    side["growth_order"] = std::isfinite(u.growth_order) ? nlohmann::json(u.growth_order) : nlohmann::json("-inf");
    side["safe_band"] = {u.safe1(), u.safe2()};
    std::ofstream js(stem + ".json");
    js << side.dump(2) << "\n";
}

inline CoeffField load_field(const std::string& stem) {
    std::ifstream bin(stem + ".bin", std::ios::binary);
    if (!bin) throw std::runtime_error("cannot read " + stem + ".bin");
    char magic[4];
    bin.read(magic, 4);
    if (std::string(magic, 4) != "BSCF") throw std::runtime_error("bad field header");
    auto get_u32 = [&]() {
        unsigned char b[4];
        bin.read(reinterpret_cast<char*>(b), 4);
        return std::uint32_t(b[0]) | std::uint32_t(b[1]) << 8 | std::uint32_t(b[2]) << 16 | std::uint32_t(b[3]) << 24;
    };
    auto get_f32 = [&]() {
        std::uint32_t x = get_u32();
        float f;
        std::memcpy(&f, &x, 4);
        return f;
    };
    int N = int(get_u32());
    std::uint64_t lo = get_u32(), hi = get_u32();
    std::uint64_t bits = lo | hi << 32;
    double g;
    std::memcpy(&g, &bits, 8);
    int s1 = int(std::int32_t(get_u32())), s2 = int(std::int32_t(get_u32()));
    CoeffField u(N);
    for (auto& v : u.data()) {
        float re = get_f32(), im = get_f32();
        v = cplx(re, im);
    }
    if (!bin) throw std::runtime_error("truncated field file");
    u.growth_order = g;
    u.set_safe(s1, s2);
    return u;
}

}  // namespace bisingular
