#pragma once

#include <complex>
#include <map>
#include <optional>
#include <string>
#include <utility>

#include "order.hpp"
#include "trig_poly.hpp"
#include "xi_factor.hpp"

namespace bisingular {

enum class SymbolClass { Differential, Multiplier, Mixed };

inline const char* to_string(SymbolClass c) {
    switch (c) {
        case SymbolClass::Differential: return "differential";
        case SymbolClass::Multiplier: return "multiplier";
        default: return "mixed";
    }
}

enum class DerivKind { Xi1, Xi2, X1, X2 };

// Sum of coefficient(x1,x2) * atom1(xi1) * atom2(xi2), kept in canonical form:
// one TrigPoly per distinct atom pair, zero entries removed.
class BiSymbol {
public:
    using Key = std::pair<Atom, Atom>;

    BiSymbol() = default;
    explicit BiSymbol(cplx c) {
        if (c != cplx(0)) terms_[{Atom{}, Atom{}}] = TrigPoly(c);
    }
    BiSymbol(const TrigPoly& coef, const XiFactor& f1, const XiFactor& f2) { add_product(coef, f1, f2); }

    static BiSymbol xi(int slot, int power = 1) {
        return slot == 1 ? BiSymbol(TrigPoly(1.0), XiFactor::monomial(power), XiFactor(1.0))
                         : BiSymbol(TrigPoly(1.0), XiFactor(1.0), XiFactor::monomial(power));
    }
    static BiSymbol coefficient(const TrigPoly& c) { return BiSymbol(c, XiFactor(1.0), XiFactor(1.0)); }

    void add_term(const Atom& a1, const Atom& a2, const TrigPoly& coef) {
        if (coef.is_zero()) return;
        Key k{a1, a2};
        auto it = terms_.find(k);
        if (it == terms_.end()) {
            terms_.emplace(k, coef);
            return;
        }
        it->second += coef;
        if (it->second.is_zero()) terms_.erase(it);
    }
    void add_product(const TrigPoly& coef, const XiFactor& f1, const XiFactor& f2) {
        for (auto& [a1, c1] : f1.atoms())
            for (auto& [a2, c2] : f2.atoms()) add_term(a1, a2, coef * cplx(c1 * c2));
    }

    const std::map<Key, TrigPoly>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }

    std::optional<BiOrder> declared_order;

    BiOrder bi_order() const {
        BiOrder o = BiOrder::zero_symbol();
        bool first = true;
        for (auto& [k, c] : terms_) {
            BiOrder t{k.first.order(), k.second.order()};
            o = first ? t : o.join(t);
            first = false;
        }
        return o;
    }
    // declared order if set and dominating, else the computed one
    BiOrder order() const {
        BiOrder b = bi_order();
        if (declared_order && b.leq(*declared_order)) return *declared_order;
        return b;
    }

    SymbolClass class_tag() const {
        bool diff = true, mult = true;
        for (auto& [k, c] : terms_) {
            diff = diff && k.first.is_monomial() && k.second.is_monomial();
            mult = mult && c.is_constant();
        }
        if (diff) return SymbolClass::Differential;
        if (mult) return SymbolClass::Multiplier;
        return SymbolClass::Mixed;
    }
    int coefficient_bandwidth() const {
        int b = 0;
        for (auto& [k, c] : terms_) b = std::max(b, c.bandwidth());
        return b;
    }
    int coefficient_bandwidth(int factor) const {
        int b = 0;
        for (auto& [k, c] : terms_) b = std::max(b, c.bandwidth(factor));
        return b;
    }
    bool has_profile() const {
        for (auto& [k, c] : terms_)
            if (k.first.profile || k.second.profile) return true;
        return false;
    }

    cplx eval(double x1, double x2, double xi1, double xi2) const {
        cplx s = 0;
        for (auto& [k, c] : terms_) s += c.eval(x1, x2) * (k.first.eval(xi1) * k.second.eval(xi2));
        return s;
    }

    BiSymbol& operator+=(const BiSymbol& o) {
        for (auto& [k, c] : o.terms_) add_term(k.first, k.second, c);
        return *this;
    }
    BiSymbol& operator-=(const BiSymbol& o) {
        for (auto& [k, c] : o.terms_) add_term(k.first, k.second, c * cplx(-1));
        return *this;
    }
    BiSymbol& operator*=(cplx s) {
        if (s == cplx(0)) terms_.clear();
        for (auto& [k, c] : terms_) c *= s;
        return *this;
    }
    friend BiSymbol operator+(BiSymbol a, const BiSymbol& b) { return a += b; }
    friend BiSymbol operator-(BiSymbol a, const BiSymbol& b) { return a -= b; }
    friend BiSymbol operator*(BiSymbol a, cplx s) { return a *= s; }
    friend BiSymbol operator*(cplx s, BiSymbol a) { return a *= s; }

    // pointwise product of symbols
    friend BiSymbol operator*(const BiSymbol& a, const BiSymbol& b) {
        BiSymbol r;
        for (auto& [ka, ca] : a.terms_)
            for (auto& [kb, cb] : b.terms_) {
                XiFactor f1 = XiFactor::from_atom(ka.first) * XiFactor::from_atom(kb.first);
                XiFactor f2 = XiFactor::from_atom(ka.second) * XiFactor::from_atom(kb.second);
                r.add_product(ca * cb, f1, f2);
            }
        return r;
    }
    friend bool operator==(const BiSymbol& a, const BiSymbol& b) { return a.terms_ == b.terms_; }

    double max_abs() const {
        double m = 0;
        for (auto& [k, c] : terms_) m = std::max(m, c.max_abs_diff(TrigPoly()));
        return m;
    }

    // largest coefficient difference over all atom pairs
    double max_abs_diff(const BiSymbol& o) const {
        BiSymbol d = *this - o;
        double m = 0;
        for (auto& [k, c] : d.terms_) m = std::max(m, c.max_abs_diff(TrigPoly()));
        return m;
    }

    // D = -i d/dx by default; xi-derivatives are plain d/dxi
    BiSymbol derivative(DerivKind kind, int order = 1, DerivConvention conv = DerivConvention::D) const {
        if (order == 0) return *this;
        BiSymbol r;
        for (auto& [k, c] : terms_) {
            switch (kind) {
                case DerivKind::X1:
                case DerivKind::X2: {
                    TrigPoly dc = c.derivative(kind == DerivKind::X1 ? 1 : 2, order, conv);
                    r.add_term(k.first, k.second, dc);
                    break;
                }
                case DerivKind::Xi1:
                    r.add_product(c, XiFactor::from_atom(k.first).derivative(order), XiFactor::from_atom(k.second));
                    break;
                case DerivKind::Xi2:
                    r.add_product(c, XiFactor::from_atom(k.first), XiFactor::from_atom(k.second).derivative(order));
                    break;
            }
        }
        return r;
    }
    BiSymbol derivative(const MultiIndexPair& xi, const MultiIndexPair& x = {},
                        DerivConvention conv = DerivConvention::D) const {
        return derivative(DerivKind::Xi1, xi.abs1())
            .derivative(DerivKind::Xi2, xi.abs2())
            .derivative(DerivKind::X1, x.abs1(), conv)
            .derivative(DerivKind::X2, x.abs2(), conv);
    }

    // Restriction to terms whose slot orders match a predicate.
    template <class Pred>
    BiSymbol filter(Pred keep) const {
        BiSymbol r;
        for (auto& [k, c] : terms_)
            if (keep(k.first, k.second)) r.add_term(k.first, k.second, c);
        return r;
    }

    BiSymbol conj_swap() const {  // (x1,x2,xi1,xi2) -> (x2,x1,xi2,xi1)
        BiSymbol r;
        for (auto& [k, c] : terms_) {
            TrigPoly s;
            for (auto& [kk, v] : c.coeffs()) s.set(kk.second, kk.first, v);
            r.add_term(k.second, k.first, s);
        }
        return r;
    }

    std::string str() const {
        if (terms_.empty()) return "0";
        std::string s;
        for (auto& [k, c] : terms_) {
            std::string a1 = k.first.str("xi1"), a2 = k.second.str("xi2");
            std::string t = c.str();
            if (a1 != "1") t += "*" + a1;
            if (a2 != "1") t += "*" + a2;
            s += (s.empty() ? "" : " + ") + t;
        }
        return s;
    }

private:
    std::map<Key, TrigPoly> terms_;
};

// Which sign convention a bracket uses:
//   XiFirst: {a,b}_j = d_xi a d_x b - d_x a d_xi b
//   XFirst : {a,b}_j = d_x a d_xi b - d_xi a d_x b
enum class BracketConvention { XiFirst, XFirst };

inline BiSymbol poisson_bracket(const BiSymbol& a, const BiSymbol& b, int j,
                                BracketConvention conv = BracketConvention::XiFirst) {
    DerivKind dxi = j == 1 ? DerivKind::Xi1 : DerivKind::Xi2;
    DerivKind dx = j == 1 ? DerivKind::X1 : DerivKind::X2;
    BiSymbol r = a.derivative(dxi) * b.derivative(dx, 1, DerivConvention::Partial) -
                 a.derivative(dx, 1, DerivConvention::Partial) * b.derivative(dxi);
    if (conv == BracketConvention::XFirst) r *= -1.0;
    return r;
}

}  // namespace bisingular
