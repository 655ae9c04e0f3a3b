#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <tuple>
#include <complex>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>

namespace bisingular {

using cplx = std::complex<double>;
using Lattice2 = std::pair<int, int>;

enum class DerivConvention { D, Partial };  // D = -i d/dx, Partial = d/dx

// Finitely supported Fourier series c(x1,x2) = sum_k c_k e^{i(k1 x1 + k2 x2)}.
class TrigPoly {
public:
    TrigPoly() = default;
    explicit TrigPoly(cplx constant) {
        if (constant != cplx(0)) c_[{0, 0}] = constant;
    }

    static TrigPoly mode(int k1, int k2, cplx v = 1.0) {
        TrigPoly t;
        t.set(k1, k2, v);
        return t;
    }
    static TrigPoly sin_x(int factor) {  // sin(x_factor)
        TrigPoly t;
        t.set(factor == 1 ? 1 : 0, factor == 2 ? 1 : 0, cplx(0, -0.5));
        t.set(factor == 1 ? -1 : 0, factor == 2 ? -1 : 0, cplx(0, 0.5));
        return t;
    }
    static TrigPoly cos_x(int factor) {
        TrigPoly t;
        t.set(factor == 1 ? 1 : 0, factor == 2 ? 1 : 0, 0.5);
        t.set(factor == 1 ? -1 : 0, factor == 2 ? -1 : 0, 0.5);
        return t;
    }

    void set(int k1, int k2, cplx v) {
        if (v == cplx(0)) c_.erase({k1, k2});
        else c_[{k1, k2}] = v;
    }
    cplx at(int k1, int k2) const {
        auto it = c_.find({k1, k2});
        return it == c_.end() ? cplx(0) : it->second;
    }
    const std::map<Lattice2, cplx>& coeffs() const { return c_; }

    bool is_zero() const { return c_.empty(); }
    bool is_constant() const { return c_.empty() || (c_.size() == 1 && c_.begin()->first == Lattice2{0, 0}); }
    cplx constant_value() const { return at(0, 0); }
    bool depends_on(int factor) const {
        for (auto& [k, v] : c_)
            if ((factor == 1 ? k.first : k.second) != 0) return true;
        return false;
    }
    // 0: constant, 1: x1 only, 2: x2 only, 3: both
    int dims() const { return (depends_on(1) ? 1 : 0) | (depends_on(2) ? 2 : 0); }

    int bandwidth() const {
        int b = 0;
        for (auto& [k, v] : c_) b = std::max({b, std::abs(k.first), std::abs(k.second)});
        return b;
    }
    int bandwidth(int factor) const {
        int b = 0;
        for (auto& [k, v] : c_) b = std::max(b, std::abs(factor == 1 ? k.first : k.second));
        return b;
    }

    // Real-valued iff c(-k) = conj c(k), within tol.
    bool is_real(double tol = 0.0) const {
        for (auto& [k, v] : c_)
            if (std::abs(at(-k.first, -k.second) - std::conj(v)) > tol) return false;
        return true;
    }

    cplx eval(double x1, double x2) const {
        cplx s = 0;
        for (auto& [k, v] : c_) s += v * std::polar(1.0, k.first * x1 + k.second * x2);
        return s;
    }

    TrigPoly derivative(int factor, int order = 1, DerivConvention conv = DerivConvention::D) const {
        TrigPoly r;
        const cplx unit = conv == DerivConvention::D ? cplx(1) : cplx(0, 1);
        for (auto& [k, v] : c_) {
            cplx f = 1;
            int kk = factor == 1 ? k.first : k.second;
            for (int i = 0; i < order; ++i) f *= unit * double(kk);
            r.set(k.first, k.second, v * f);
        }
        return r;
    }

    TrigPoly conj() const {
        TrigPoly r;
        for (auto& [k, v] : c_) r.set(-k.first, -k.second, std::conj(v));
        return r;
    }

    TrigPoly& operator+=(const TrigPoly& o) {
        for (auto& [k, v] : o.c_) set(k.first, k.second, at(k.first, k.second) + v);
        return *this;
    }
    TrigPoly& operator-=(const TrigPoly& o) {
        for (auto& [k, v] : o.c_) set(k.first, k.second, at(k.first, k.second) - v);
        return *this;
    }
    TrigPoly& operator*=(cplx s) {
        if (s == cplx(0)) { c_.clear(); return *this; }
        for (auto& [k, v] : c_) v *= s;
        return *this;
    }
    friend TrigPoly operator+(TrigPoly a, const TrigPoly& b) { return a += b; }
    friend TrigPoly operator-(TrigPoly a, const TrigPoly& b) { return a -= b; }
    friend TrigPoly operator*(TrigPoly a, cplx s) { return a *= s; }
    friend TrigPoly operator*(cplx s, TrigPoly a) { return a *= s; }
    friend TrigPoly operator*(const TrigPoly& a, const TrigPoly& b) {
        TrigPoly r;
        for (auto& [ka, va] : a.c_)
            for (auto& [kb, vb] : b.c_) {
                int k1 = ka.first + kb.first, k2 = ka.second + kb.second;
                r.set(k1, k2, r.at(k1, k2) + va * vb);
            }
        return r;
    }
    friend bool operator==(const TrigPoly& a, const TrigPoly& b) { return a.c_ == b.c_; }
    friend bool operator<(const TrigPoly& a, const TrigPoly& b) {
        auto key = [](const std::pair<const Lattice2, cplx>& p) {
            return std::make_tuple(p.first, p.second.real(), p.second.imag());
        };
        return std::lexicographical_compare(a.c_.begin(), a.c_.end(), b.c_.begin(), b.c_.end(),
                                            [&](auto& x, auto& y) { return key(x) < key(y); });
    }

    double max_abs_diff(const TrigPoly& o) const {
        double m = 0;
        for (auto& [k, v] : c_) m = std::max(m, std::abs(v - o.at(k.first, k.second)));
        for (auto& [k, v] : o.c_) m = std::max(m, std::abs(v - at(k.first, k.second)));
        return m;
    }

    std::string str() const;

private:
    std::map<Lattice2, cplx> c_;
};

inline std::string format_cplx(cplx v) {
    auto num = [](double x) {
        char buf[40];
        if (x == std::round(x) && std::abs(x) < 1e15) std::snprintf(buf, sizeof buf, "%.0f", x);
        else std::snprintf(buf, sizeof buf, "%.6g", x);
        return std::string(buf);
    };
    if (v.imag() == 0) return num(v.real());
    if (v.real() == 0) return num(v.imag()) + "i";
    return "(" + num(v.real()) + (v.imag() < 0 ? "-" : "+") + num(std::abs(v.imag())) + "i)";
}

inline std::string TrigPoly::str() const {
    if (c_.empty()) return "0";
    if (is_constant()) return format_cplx(constant_value());
    std::string s = "[";
    bool first = true;
    for (auto& [k, v] : c_) {
        if (!first) s += " ";
        first = false;
        s += format_cplx(v) + "e(" + std::to_string(k.first) + "," + std::to_string(k.second) + ")";
    }
    return s + "]";
}

}  // namespace bisingular
