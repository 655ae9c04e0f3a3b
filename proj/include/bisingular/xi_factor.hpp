#pragma once

#include <cmath>
#include <cstdio>
#include <tuple>
#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "order.hpp"

namespace bisingular {

// Rapid-decay profile given by its values on the integer lattice (zero for |k| > K).
// Off the lattice it is continued by the Catmull-Rom cubic, which is C^1; the
// second derivative is piecewise linear, so the stored depth is 2.
class TabulatedProfile {
public:
    TabulatedProfile(std::string name, std::vector<double> values_from_minus_K)
        : name_(std::move(name)), v_(std::move(values_from_minus_K)) {
        if (v_.size() % 2 == 0) throw std::invalid_argument("TabulatedProfile: need 2K+1 values");
        K_ = int(v_.size() / 2);
    }

    const std::string& name() const { return name_; }
    int half_width() const { return K_; }
    int depth() const { return 2; }

    double knot(int k) const { return std::abs(k) > K_ ? 0.0 : v_[std::size_t(k + K_)]; }
    double slope(int k) const { return 0.5 * (knot(k + 1) - knot(k - 1)); }

    double eval(double xi, int deriv) const {
        if (deriv > depth()) throw UnsupportedFactor("profile " + name_ + " differentiated beyond stored depth");
        double fl = std::floor(xi);
        int k = int(fl);
        double t = xi - fl;
        double p0 = knot(k), p1 = knot(k + 1), m0 = slope(k), m1 = slope(k + 1);
        // Hermite basis and its derivatives in t
        double t2 = t * t, t3 = t2 * t;
        switch (deriv) {
            case 0:
                return (2 * t3 - 3 * t2 + 1) * p0 + (t3 - 2 * t2 + t) * m0 + (-2 * t3 + 3 * t2) * p1 + (t3 - t2) * m1;
            case 1:
                return (6 * t2 - 6 * t) * p0 + (3 * t2 - 4 * t + 1) * m0 + (-6 * t2 + 6 * t) * p1 + (3 * t2 - 2 * t) * m1;
            default:
                return (12 * t - 6) * p0 + (6 * t - 4) * m0 + (-12 * t + 6) * p1 + (6 * t - 2) * m1;
        }
    }

private:
    std::string name_;
    std::vector<double> v_;
    int K_ = 0;
};

using ProfilePtr = std::shared_ptr<const TabulatedProfile>;

// One atom of a covariable factor:
//   xi^p * prod_i (xi^2 + c_i)^(h_i/2) * T^(d)(xi)
// with integer p, h_i and an optional tabulated profile T. A shift with c = 0
// and h = 1 stands for |xi|, which is what homogeneous leading parts need.
struct Atom {
    int p = 0;
    std::vector<std::pair<double, int>> shifts;  // sorted by c, h != 0
    ProfilePtr profile;
    int profile_deriv = 0;

    bool is_constant() const { return p == 0 && shifts.empty() && !profile; }
    bool is_monomial() const { return p >= 0 && shifts.empty() && !profile; }

    ExtInt order() const {
        if (profile) return ExtInt::neg_inf();
        int o = p;
        for (auto& s : shifts) o += s.second;
        return o;
    }

    double eval(double xi) const {
        double v = std::pow(xi, p);
        for (auto& [c, h] : shifts) v *= std::pow(xi * xi + c, 0.5 * h);
        if (profile) v *= profile->eval(xi, profile_deriv);
        return v;
    }

    auto key() const { return std::make_tuple(p, shifts, profile ? profile->name() : std::string(), profile_deriv); }
    friend bool operator<(const Atom& a, const Atom& b) { return a.key() < b.key(); }
    friend bool operator==(const Atom& a, const Atom& b) { return a.key() == b.key(); }

    std::string str(const std::string& var) const;
};

// Real linear combination of atoms in one covariable.
class XiFactor {
public:
    XiFactor() = default;
    explicit XiFactor(double c) {
        if (c != 0) add(Atom{}, c);
    }

    static XiFactor constant(double c) { return XiFactor(c); }
    static XiFactor monomial(int p) { return from_atom(Atom{p, {}, nullptr, 0}); }
    // <xi>^s = (xi^2+1)^(s/2)
    static XiFactor bracket(int s) { return shifted(1.0, s); }
    // (xi^2 + c)^(h/2); h = 2s for the shifted power (|xi|^2+c)^s
    static XiFactor shifted(double c, int h) { return from_atom(Atom{0, {{c, h}}, nullptr, 0}); }
    static XiFactor profile(ProfilePtr prof) { return from_atom(Atom{0, {}, std::move(prof), 0}); }
    static XiFactor from_atom(const Atom& a);

    const std::map<Atom, double>& atoms() const { return a_; }
    bool is_zero() const { return a_.empty(); }

    void add(const Atom& at, double c) {
        double& slot = a_[at];
        slot += c;
        if (slot == 0) a_.erase(at);
    }
    XiFactor& operator+=(const XiFactor& o) {
        for (auto& [at, c] : o.a_) add(at, c);
        return *this;
    }
    XiFactor& operator*=(double s) {
        if (s == 0) a_.clear();
        for (auto& [at, c] : a_) c *= s;
        return *this;
    }
    friend XiFactor operator+(XiFactor a, const XiFactor& b) { return a += b; }
    friend XiFactor operator*(XiFactor a, double s) { return a *= s; }
    friend XiFactor operator*(const XiFactor& a, const XiFactor& b);
    friend bool operator==(const XiFactor& a, const XiFactor& b) { return a.a_ == b.a_; }

    ExtInt order() const {
        ExtInt o = ExtInt::neg_inf();
        for (auto& [at, c] : a_) o = max(o, at.order());
        return o;
    }
    double eval(double xi) const {
        double s = 0;
        for (auto& [at, c] : a_) s += c * at.eval(xi);
        return s;
    }
    XiFactor derivative(int times = 1) const;

    std::string str(const std::string& var) const;

private:
    std::map<Atom, double> a_;
};

namespace detail {

inline double binom(int n, int k) {
    double r = 1;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

// Bring an atom to canonical form: merged shifts, |xi|^odd as xi^(h-1)|xi|,
// non-negative even shifted powers expanded, xi^2 absorbed into negative powers.
inline void canonical_into(Atom a, double coef, XiFactor& out) {
    if (coef == 0) return;
    std::map<double, int> merged;
    for (auto& [c, h] : a.shifts) merged[c] += h;
    a.shifts.clear();
    for (auto& [c, h] : merged) {
        if (h == 0) continue;
        if (c == 0) {
            if (h % 2 == 0) {
                a.p += h;
            } else {
                a.p += h - 1;
                a.shifts.push_back({0.0, 1});
            }
            continue;
        }
        a.shifts.push_back({c, h});
    }
    for (std::size_t i = 0; i < a.shifts.size(); ++i) {
        auto [c, h] = a.shifts[i];
        if (c > 0 && h > 0 && h % 2 == 0) {
            Atom rest = a;
            rest.shifts.erase(rest.shifts.begin() + long(i));
            int n = h / 2;
            for (int j = 0; j <= n; ++j) {
                Atom t = rest;
                t.p += 2 * j;
                canonical_into(t, coef * binom(n, j) * std::pow(c, n - j), out);
            }
            return;
        }
    }
    if (a.p >= 2) {
        for (std::size_t i = 0; i < a.shifts.size(); ++i) {
            auto [c, h] = a.shifts[i];
            if (c > 0 && h < 0) {
                Atom up = a, same = a;
                up.p -= 2;
                up.shifts[i].second += 2;
                same.p -= 2;
                canonical_into(up, coef, out);
                canonical_into(same, -c * coef, out);
                return;
            }
        }
    }
    out.add(a, coef);
}

inline XiFactor atom_derivative(const Atom& a) {
    XiFactor out;
    if (a.p != 0) {
        Atom t = a;
        t.p -= 1;
        canonical_into(t, a.p, out);
    }
    for (std::size_t i = 0; i < a.shifts.size(); ++i) {
        Atom t = a;
        t.p += 1;
        t.shifts[i].second -= 2;
        canonical_into(t, a.shifts[i].second, out);
    }
    if (a.profile) {
        if (a.profile_deriv + 1 > a.profile->depth())
            throw UnsupportedFactor("profile " + a.profile->name() + " differentiated beyond stored depth");
        Atom t = a;
        t.profile_deriv += 1;
        canonical_into(t, 1.0, out);
    }
    return out;
}

inline std::string exponent_str(int h) {
    if (h % 2 == 0) return std::to_string(h / 2);
    return std::to_string(h) + "/2";
}

inline std::string real_str(double c) {
    char buf[40];
    if (c == std::round(c) && std::abs(c) < 1e15) std::snprintf(buf, sizeof buf, "%.0f", c);
    else std::snprintf(buf, sizeof buf, "%.6g", c);
    return buf;
}

}  // namespace detail

inline XiFactor XiFactor::from_atom(const Atom& a) {
    XiFactor f;
    detail::canonical_into(a, 1.0, f);
    return f;
}

inline XiFactor operator*(const XiFactor& a, const XiFactor& b) {
    XiFactor out;
    for (auto& [x, cx] : a.a_)
        for (auto& [y, cy] : b.a_) {
            if (x.profile && y.profile) throw UnsupportedFactor("product of two tabulated profiles");
            Atom t = x;
            t.p += y.p;
            t.shifts.insert(t.shifts.end(), y.shifts.begin(), y.shifts.end());
            if (y.profile) {
                t.profile = y.profile;
                t.profile_deriv = y.profile_deriv;
            }
            detail::canonical_into(t, cx * cy, out);
        }
    return out;
}

inline XiFactor XiFactor::derivative(int times) const {
    XiFactor cur = *this;
    for (int n = 0; n < times; ++n) {
        XiFactor next;
        for (auto& [at, c] : cur.a_) next += detail::atom_derivative(at) * c;
        cur = std::move(next);
    }
    return cur;
}

inline std::string Atom::str(const std::string& var) const {
    std::string s;
    auto mul = [&](const std::string& f) { s += (s.empty() ? "" : "*") + f; };
    if (p == 1) mul(var);
    else if (p != 0) mul(var + "^" + std::to_string(p));
    for (auto& [c, h] : shifts) {
        if (c == 0) mul("|" + var + "|");
        else mul("(" + var + "^2+" + detail::real_str(c) + ")^(" + detail::exponent_str(h) + ")");
    }
    if (profile) mul(profile->name() + (profile_deriv ? "^(" + std::to_string(profile_deriv) + ")" : "") + "(" + var + ")");
    return s.empty() ? "1" : s;
}

inline std::string XiFactor::str(const std::string& var) const {
    if (a_.empty()) return "0";
    std::string s;
    for (auto& [at, c] : a_) {
        std::string a = at.str(var);
        std::string coef = detail::real_str(std::abs(c));
        std::string term = a == "1" ? coef : (std::abs(c) == 1 ? a : coef + "*" + a);
        if (s.empty()) s = (c < 0 ? "-" : "") + term;
        else s += (c < 0 ? " - " : " + ") + term;
    }
    return s;
}

}  // namespace bisingular
