#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "bisymbol.hpp"
#include "errors.hpp"
#include "parser.hpp"

namespace bisingular {

// ---------------------------------------------------------------- principal parts

struct PrincipalTriple {
    BiOrder order;
    BiSymbol sigma1;   // xi1-leading part, an operator symbol in factor 2
    BiSymbol sigma2;   // xi2-leading part, an operator symbol in factor 1
    BiSymbol sigma12;  // doubly leading, bihomogeneous of degree order
};

// Homogeneous top-degree part of one atom: every (xi^2+c) becomes xi^2.
inline XiFactor leading_part(const Atom& a) {
    if (a.profile) throw NotClassical("tabulated profile has no homogeneous leading part");
    Atom t = a;
    for (auto& s : t.shifts) s.first = 0.0;
    return XiFactor::from_atom(t);
}

inline BiSymbol leading_in_slot(const BiSymbol& a, int slot, ExtInt m) {
    BiSymbol r;
    for (auto& [k, c] : a.terms()) {
        const Atom& at = slot == 1 ? k.first : k.second;
        if (at.profile) throw NotClassical("tabulated profile in slot " + std::to_string(slot));
        if (at.order() != m) continue;
        XiFactor f1 = slot == 1 ? leading_part(k.first) : XiFactor::from_atom(k.first);
        XiFactor f2 = slot == 2 ? leading_part(k.second) : XiFactor::from_atom(k.second);
        r.add_product(c, f1, f2);
    }
    return r;
}

inline PrincipalTriple principal_triple(const BiSymbol& a) {
    PrincipalTriple t;
    t.order = a.bi_order();
    if (a.is_zero()) return t;
    t.sigma1 = leading_in_slot(a, 1, t.order.m1);
    t.sigma2 = leading_in_slot(a, 2, t.order.m2);
    t.sigma12 = leading_in_slot(t.sigma1, 2, t.order.m2);
    return t;
}

// ---------------------------------------------------------------- composition

struct CompositionBlock {
    BiSymbol c1, c2, c12;
    BiSymbol sum() const { return c1 + c2 + c12; }
};

struct CompositionExpansion {
    std::vector<CompositionBlock> terms;  // indexed by j
    int truncation = 0;
    bool exact = false;  // true when the expansion terminates within the truncation
    std::vector<BiOrder> remainder_orders;  // bounds of the two remainder families, empty when exact

    BiSymbol total() const {
        BiSymbol s;
        for (auto& b : terms) s += b.sum();
        return s;
    }
};

namespace detail {

inline double factorial(int n) {
    double f = 1;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
}

inline bool polynomial_in_xi(const BiSymbol& a, int& degree) {
    degree = 0;
    for (auto& [k, c] : a.terms()) {
        if (!k.first.is_monomial() || !k.second.is_monomial()) return false;
        degree = std::max({degree, k.first.p, k.second.p});
    }
    return true;
}

inline bool x_independent(const BiSymbol& a) {
    for (auto& [k, c] : a.terms())
        if (!c.is_constant()) return false;
    return true;
}

// Table of 1/(a1! a2!) d_xi^a a * D_x^a b for 0 <= a1, a2 <= J.
inline std::vector<std::vector<BiSymbol>> leibniz_table(const BiSymbol& a, const BiSymbol& b, int J) {
    std::vector<std::vector<BiSymbol>> da(std::size_t(J + 1)), db(std::size_t(J + 1));
    BiSymbol ra = a, rb = b;
    for (int a1 = 0; a1 <= J; ++a1) {
        BiSymbol ca = ra, cb = rb;
        for (int a2 = 0; a2 <= J; ++a2) {
            da[std::size_t(a1)].push_back(ca);
            db[std::size_t(a1)].push_back(cb);
            if (a2 < J) {
                ca = ca.derivative(DerivKind::Xi2);
                cb = cb.derivative(DerivKind::X2);
            }
        }
        if (a1 < J) {
            ra = ra.derivative(DerivKind::Xi1);
            rb = rb.derivative(DerivKind::X1);
        }
    }
    std::vector<std::vector<BiSymbol>> T(std::size_t(J + 1), std::vector<BiSymbol>(std::size_t(J + 1)));
    for (int a1 = 0; a1 <= J; ++a1)
        for (int a2 = 0; a2 <= J; ++a2) {
            const BiSymbol& x = da[std::size_t(a1)][std::size_t(a2)];
            const BiSymbol& y = db[std::size_t(a1)][std::size_t(a2)];
            if (x.is_zero() || y.is_zero()) continue;
            T[std::size_t(a1)][std::size_t(a2)] = (x * y) * cplx(1.0 / (factorial(a1) * factorial(a2)));
        }
    return T;
}

}  // namespace detail

// Blocks: c12_j = T(j,j), c1_j = sum_{a1>j} T(a1,j), c2_j = sum_{a2>j} T(j,a2).
// Together they exhaust all (a1,a2) with a1,a2 <= J.
inline CompositionExpansion compose(const BiSymbol& a, const BiSymbol& b, int J) {
    CompositionExpansion e;
    e.truncation = J;
    auto T = detail::leibniz_table(a, b, J);
    for (int j = 0; j <= J; ++j) {
        CompositionBlock blk;
        blk.c12 = T[std::size_t(j)][std::size_t(j)];
        for (int a = j + 1; a <= J; ++a) {
            blk.c1 += T[std::size_t(a)][std::size_t(j)];
            blk.c2 += T[std::size_t(j)][std::size_t(a)];
        }
        e.terms.push_back(std::move(blk));
    }
    int deg = 0;
    e.exact = detail::x_independent(b) || (detail::polynomial_in_xi(a, deg) && deg <= J);
    if (!e.exact) {
        BiOrder s = a.bi_order() + b.bi_order();
        e.remainder_orders = {s.shifted(J + 1, 0), s.shifted(0, J + 1)};
    }
    return e;
}

inline CompositionExpansion commutator(const BiSymbol& a, const BiSymbol& b, int J) {
    CompositionExpansion ab = compose(a, b, J), ba = compose(b, a, J);
    CompositionExpansion c = ab;
    for (std::size_t j = 0; j < c.terms.size(); ++j) {
        c.terms[j].c1 -= ba.terms[j].c1;
        c.terms[j].c2 -= ba.terms[j].c2;
        c.terms[j].c12 -= ba.terms[j].c12;
    }
    c.exact = ab.exact && ba.exact;
    if (c.exact) c.remainder_orders.clear();
    return c;
}

// Structure of the j = 0 commutator block.
struct CommutatorCheck {
    bool c12_zero = false;        // doubly leading block vanishes identically
    bool leading_matches = false; // first-order part equals i({a,b}_1 + {a,b}_2) (x-first bracket)
    bool remainder_orders_ok = false;
    double c12_residual = 0, leading_residual = 0, split_residual = 0;
    BiSymbol leading;             // first-order part of block 0
    BiSymbol bracket_term;        // i({a,b}_1 + {a,b}_2), x-first convention
};

// Identities are checked to rounding level: floating coefficients make ab and ba
// differ in the last bits, so "zero" means below rel_tol times the size of ab.
inline CommutatorCheck check_commutator(const BiSymbol& a, const BiSymbol& b, int J, double rel_tol = 1e-12) {
    CommutatorCheck r;
    auto Tab = detail::leibniz_table(a, b, J), Tba = detail::leibniz_table(b, a, J);
    CompositionExpansion c = commutator(a, b, J);
    const double tol = rel_tol * std::max(1.0, (a * b).max_abs());
    r.c12_residual = c.terms[0].c12.max_abs();
    r.c12_zero = r.c12_residual <= tol;
    r.leading = (Tab[1][0] - Tba[1][0]) + (Tab[0][1] - Tba[0][1]);
    r.bracket_term = (poisson_bracket(a, b, 1, BracketConvention::XFirst) +
                      poisson_bracket(a, b, 2, BracketConvention::XFirst)) * cplx(0, 1);
    r.leading_residual = r.leading.max_abs_diff(r.bracket_term);
    r.leading_matches = r.leading_residual <= tol;
    // block 0 minus the bracket term splits into a1 >= 2 and a2 >= 2 families
    BiSymbol rest1, rest2;
    for (int k = 2; k <= J; ++k) {
        rest1 += Tab[std::size_t(k)][0] - Tba[std::size_t(k)][0];
        rest2 += Tab[0][std::size_t(k)] - Tba[0][std::size_t(k)];
    }
    BiSymbol block0 = c.terms[0].sum();
    r.split_residual = (block0 - r.bracket_term).max_abs_diff(rest1 + rest2);
    bool split_ok = r.split_residual <= tol;
    BiOrder s = a.bi_order() + b.bi_order();
    r.remainder_orders_ok = split_ok && (rest1.is_zero() || rest1.bi_order().leq(s.shifted(2, 0))) &&
                            (rest2.is_zero() || rest2.bi_order().leq(s.shifted(0, 2)));
    return r;
}

// ---------------------------------------------------------------- ellipticity

enum class CharReading { A, B };

struct MultiplierCheck {
    bool nonvanishing = false;  // g(k) != 0 for |k| <= K_check
    bool exponent_ok = false;   // fitted growth exponent within tolerance of the order
    double min_abs = 0;
    double fitted_exponent_plus = 0, fitted_exponent_minus = 0;
    bool ok() const { return nonvanishing && exponent_ok; }
};

struct EllipticityConfig {
    int k_check = 64;
    int fit_from = 16;
    double exponent_tol = 0.1;
    int cells = 16;
    int samples_per_cell = 4;
    CharReading reading = CharReading::A;
};

// Lattice multiplier g(k) = sum of weighted atoms.
struct LatticeMultiplier {
    std::vector<std::pair<cplx, Atom>> parts;
    cplx operator()(double k) const {
        cplx s = 0;
        for (auto& [w, a] : parts) s += w * a.eval(k);
        return s;
    }
};

inline MultiplierCheck check_multiplier(const LatticeMultiplier& g, ExtInt order, const EllipticityConfig& cfg) {
    MultiplierCheck r;
    r.min_abs = INFINITY;
    for (int k = -cfg.k_check; k <= cfg.k_check; ++k) r.min_abs = std::min(r.min_abs, std::abs(g(k)));
    r.nonvanishing = r.min_abs > 0 && std::isfinite(r.min_abs);
    auto fit = [&](int sign) {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        int n = 0;
        for (int k = cfg.fit_from; k <= cfg.k_check; ++k) {
            double x = std::log(std::sqrt(1.0 + double(k) * k));
            double y = std::log(std::abs(g(sign * k)));
            sx += x, sy += y, sxx += x * x, sxy += x * y, ++n;
        }
        return (n * sxy - sx * sy) / (n * sxx - sx * sx);
    };
    if (r.nonvanishing && !order.is_neg_inf()) {
        r.fitted_exponent_plus = fit(1);
        r.fitted_exponent_minus = fit(-1);
        double m = double(order.value());
        r.exponent_ok = std::abs(r.fitted_exponent_plus - m) <= cfg.exponent_tol &&
                        std::abs(r.fitted_exponent_minus - m) <= cfg.exponent_tol;
    }
    return r;
}

// sigma written as s(x, xi_slot) * g(xi_other) with g a constant-coefficient
// multiplier and s independent of the other variable.
struct Factorized {
    BiSymbol scalar;  // depends on x_slot and xi_slot only
    LatticeMultiplier g;
};

inline std::optional<Factorized> factorize(const BiSymbol& sigma, int slot) {
    if (sigma.is_zero()) return std::nullopt;
    int other = 3 - slot;
    std::map<Atom, BiSymbol> by_other;
    for (auto& [k, c] : sigma.terms()) {
        if (c.depends_on(other)) return std::nullopt;
        const Atom& ao = slot == 1 ? k.second : k.first;
        const Atom& as = slot == 1 ? k.first : k.second;
        BiSymbol part;
        if (slot == 1) part.add_term(as, Atom{}, c);
        else part.add_term(Atom{}, as, c);
        by_other[ao] += part;
    }
    Factorized f;
    f.scalar = by_other.begin()->second;
    // reference coefficient for ratios
    auto ref = f.scalar.terms().begin();
    for (auto& [ao, part] : by_other) {
        if (part.terms().size() != f.scalar.terms().size()) return std::nullopt;
        auto it = part.terms().find(ref->first);
        if (it == part.terms().end()) return std::nullopt;
        // ratio from any nonzero coefficient entry
        auto& rc = ref->second.coeffs();
        cplx ratio = it->second.at(rc.begin()->first.first, rc.begin()->first.second) / rc.begin()->second;
        if (!(part.max_abs_diff(f.scalar * ratio) <= 1e-12 * (1 + std::abs(ratio)))) return std::nullopt;
        f.g.parts.push_back({ratio, ao});
    }
    return f;
}

struct BiellipticReport {
    enum class Verdict { BiElliptic, NotBiElliptic, UnsupportedHeuristic };
    Verdict verdict = Verdict::NotBiElliptic;
    bool heuristic_value = false;  // meaningful only for UnsupportedHeuristic
    bool cond_i = false, cond_ii = false, cond_iii = false;
    bool conclusive = false;
    BiOrder order;
    MultiplierCheck mult1, mult2;  // factor-2 multiplier of sigma1, factor-1 multiplier of sigma2
    std::string note;

    bool bielliptic() const {
        return verdict == Verdict::BiElliptic || (verdict == Verdict::UnsupportedHeuristic && heuristic_value);
    }
};

inline const char* to_string(BiellipticReport::Verdict v) {
    switch (v) {
        case BiellipticReport::Verdict::BiElliptic: return "bi-elliptic";
        case BiellipticReport::Verdict::NotBiElliptic: return "not bi-elliptic";
        default: return "unsupported-heuristic";
    }
}

// Region descriptor for one Char component.
struct Region {
    enum class Kind { Empty, Full, Explicit };
    Kind kind = Kind::Empty;
    // Explicit flags: (x1 cell, x2 cell or -1 for all, s1, s2) with s = 0 on an axis
    struct Flag {
        int c1, c2, s1, s2;
        auto operator<=>(const Flag&) const = default;
    };
    std::vector<Flag> flags;
};

struct CharReport {
    Region char1, char2, char12;
    CharReading reading = CharReading::A;
    BiellipticReport ellipticity;
    bool table_mismatch = false;  // set by the table reproduction for the flagged row
};

namespace detail {

inline double cell_point(int cell, int sample, const EllipticityConfig& cfg) {
    double h = 2 * M_PI / cfg.cells;
    return (cell - 0.5) * h + h * (sample + 0.5) / cfg.samples_per_cell;
}

inline Region summarize(std::vector<Region::Flag> flags, std::size_t total) {
    Region r;
    std::sort(flags.begin(), flags.end());
    if (flags.empty()) r.kind = Region::Kind::Empty;
    else if (flags.size() == total) r.kind = Region::Kind::Full;
    else r.kind = Region::Kind::Explicit;
    r.flags = std::move(flags);
    return r;
}

inline bool nonzero(cplx v) { return std::abs(v) > 1e-12 || !std::isfinite(std::abs(v)); }

}  // namespace detail

// Evaluates the three conditions cell by cell; shared by is_bielliptic and char_sets.
inline CharReport analyze_characteristics(const BiSymbol& a, const EllipticityConfig& cfg = {}) {
    CharReport rep;
    rep.reading = cfg.reading;
    BiellipticReport& e = rep.ellipticity;
    e.order = a.bi_order();
    PrincipalTriple t = principal_triple(a);
    const int M = cfg.cells, S = cfg.samples_per_cell;
    const bool const_coeff = detail::x_independent(a);

    // condition (i) and Char12: sigma12 at the four quadrant directions
    std::vector<Region::Flag> f12;
    for (int c1 = 0; c1 < M; ++c1)
        for (int c2 = 0; c2 < M; ++c2)
            for (int s1 : {1, -1})
                for (int s2 : {1, -1}) {
                    bool ok = true;
                    for (int i = 0; i < S && ok; ++i)
                        for (int j = 0; j < S && ok; ++j)
                            ok = detail::nonzero(t.sigma12.eval(detail::cell_point(c1, i, cfg),
                                                                detail::cell_point(c2, j, cfg), s1, s2));
                    if (!ok) f12.push_back({c1, c2, s1, s2});
                }
    e.cond_i = f12.empty();

    // condition (1) near axis slot: sigma12 nonzero on the punctured neighbourhood
    auto cond1 = [&](int slot, int cell, int sign) {
        for (int i = 0; i < S; ++i)
            for (int c = 0; c < M; ++c)
                for (int j = 0; j < S; ++j) {
                    double xs = detail::cell_point(cell, i, cfg), xo = detail::cell_point(c, j, cfg);
                    double x1 = slot == 1 ? xs : xo, x2 = slot == 1 ? xo : xs;
                    for (int so : {1, -1}) {
                        double xi1 = slot == 1 ? sign : so, xi2 = slot == 1 ? so : sign;
                        if (!detail::nonzero(t.sigma12.eval(x1, x2, xi1, xi2))) return false;
                    }
                    if (cfg.reading == CharReading::B) {
                        double xi1 = slot == 1 ? sign : 0.0, xi2 = slot == 1 ? 0.0 : sign;
                        if (!detail::nonzero(t.sigma12.eval(x1, x2, xi1, xi2))) return false;
                    }
                }
        return true;
    };

    // condition (2): sigma_slot invertible as an operator on the other factor
    bool conclusive = const_coeff;
    auto char_slot = [&](int slot, MultiplierCheck& mc, bool& cond_whole) {
        const BiSymbol& sig = slot == 1 ? t.sigma1 : t.sigma2;
        ExtInt m_other = slot == 1 ? e.order.m2 : e.order.m1;
        auto fac = factorize(sig, slot);
        std::vector<Region::Flag> flags;
        bool all_ok = true;
        if (fac) mc = check_multiplier(fac->g, m_other, cfg);
        for (int c = 0; c < M; ++c)
            for (int s : {1, -1}) {
                bool ok = cond1(slot, c, s);
                if (fac) {
                    bool scalar_ok = mc.ok();
                    for (int i = 0; i < S && scalar_ok; ++i) {
                        double x = detail::cell_point(c, i, cfg);
                        cplx v = slot == 1 ? fac->scalar.eval(x, 0, s, 0) : fac->scalar.eval(0, x, 0, s);
                        scalar_ok = detail::nonzero(v);
                    }
                    ok = ok && scalar_ok;
                } else {
                    // sampled lower bound of |sigma|/<k>^m over the other lattice
                    conclusive = false;
                    double lo = INFINITY;
                    for (int i = 0; i < S; ++i) {
                        double x = detail::cell_point(c, i, cfg);
                        for (int k = -cfg.k_check; k <= cfg.k_check; ++k) {
                            double w = m_other.is_neg_inf() ? 1.0 : std::pow(1.0 + double(k) * k, 0.5 * double(m_other.value()));
                            for (int j = 0; j < S * M; j += S) {
                                double y = 2 * M_PI * j / (S * M);
                                cplx v = slot == 1 ? sig.eval(x, y, s, k) : sig.eval(y, x, k, s);
                                lo = std::min(lo, std::abs(v) / w);
                            }
                        }
                    }
                    ok = ok && lo > 1e-9;
                }
                all_ok = all_ok && ok;
                if (!ok) flags.push_back(slot == 1 ? Region::Flag{c, -1, s, 0} : Region::Flag{-1, c, 0, s});
            }
        cond_whole = all_ok;
        return detail::summarize(std::move(flags), std::size_t(2 * M));
    };

    bool c1_all = false, c2_all = false;
    rep.char1 = char_slot(1, e.mult1, c1_all);
    rep.char2 = char_slot(2, e.mult2, c2_all);
    rep.char12 = detail::summarize(std::move(f12), std::size_t(4 * M * M));

    // (ii)/(iii) are the operator-invertibility parts alone
    auto inv_ok = [&](int slot, const MultiplierCheck& mc) {
        const BiSymbol& sig = slot == 1 ? t.sigma1 : t.sigma2;
        auto fac = factorize(sig, slot);
        if (!fac) return slot == 1 ? c1_all : c2_all;
        if (!mc.ok()) return false;
        for (int c = 0; c < M; ++c)
            for (int s : {1, -1})
                for (int i = 0; i < S; ++i) {
                    double x = detail::cell_point(c, i, cfg);
                    cplx v = slot == 1 ? fac->scalar.eval(x, 0, s, 0) : fac->scalar.eval(0, x, 0, s);
                    if (!detail::nonzero(v)) return false;
                }
        return true;
    };
    e.cond_ii = inv_ok(1, e.mult1);
    e.cond_iii = inv_ok(2, e.mult2);
    e.conclusive = conclusive && factorize(t.sigma1, 1).has_value() && factorize(t.sigma2, 2).has_value();
    bool value = e.cond_i && e.cond_ii && e.cond_iii;
    if (e.conclusive) {
        e.verdict = value ? BiellipticReport::Verdict::BiElliptic : BiellipticReport::Verdict::NotBiElliptic;
    } else {
        e.verdict = BiellipticReport::Verdict::UnsupportedHeuristic;
        e.heuristic_value = value;
        e.note = "x-dependent or non-factorizing principal symbol: sampled, not conclusive";
    }
    return rep;
}

inline BiellipticReport is_bielliptic(const BiSymbol& a, const EllipticityConfig& cfg = {}) {
    EllipticityConfig c = cfg;
    c.reading = CharReading::A;
    return analyze_characteristics(a, c).ellipticity;
}

inline CharReport char_sets(const BiSymbol& a, const EllipticityConfig& cfg = {}) {
    return analyze_characteristics(a, cfg);
}

// ---------------------------------------------------------------- exact inverse

inline BiSymbol exact_tensor_inverse(const BiSymbol& a, int k_check = 64) {
    if (!detail::x_independent(a)) throw OutsideFamily("inverse needs constant coefficients");
    if (a.is_zero()) throw NotInvertible("zero symbol");
    // rank-one split a = g1(xi1) g2(xi2)
    auto fac = factorize(a, 1);
    if (!fac) throw OutsideFamily("symbol is not a tensor product of factor multipliers");
    XiFactor g1, g2;
    for (auto& [k, c] : fac->scalar.terms()) {
        if (c.constant_value().imag() != 0) throw OutsideFamily("complex factor weights");
        g1.add(k.first, c.constant_value().real());
    }
    for (auto& [w, at] : fac->g.parts) {
        if (w.imag() != 0) throw OutsideFamily("complex factor weights");
        g2.add(at, w.real());
    }
    for (const XiFactor* g : {&g1, &g2})
        for (int k = -k_check; k <= k_check; ++k)
            if (!detail::nonzero(g->eval(k)) || !std::isfinite(g->eval(k)))
                throw NotInvertible("factor vanishes at lattice point " + std::to_string(k));
    auto recip = [](const XiFactor& g) -> XiFactor {
        const auto& at = g.atoms();
        if (at.size() == 1) {
            Atom x = at.begin()->first;
            if (x.profile) throw OutsideFamily("reciprocal of a tabulated profile");
            x.p = -x.p;
            for (auto& s : x.shifts) s.second = -s.second;
            return XiFactor::from_atom(x) * (1.0 / at.begin()->second);
        }
        if (at.size() == 2) {
            auto it = at.begin();
            auto [a0, c0] = *it++;
            auto [a1, c1] = *it;
            if (a0.is_constant() && a1.is_monomial() && a1.p == 2 && c0 / c1 > 0)
                return XiFactor::shifted(c0 / c1, -2) * (1.0 / c1);
        }
        throw OutsideFamily("reciprocal not representable in the factor family");
    };
    return BiSymbol(TrigPoly(1.0), recip(g1), recip(g2));
}

// ---------------------------------------------------------------- model tables

struct ModelOperator {
    std::string name;
    std::string literal;
};

inline std::vector<ModelOperator> model_operators() {
    return {
        {"I⊗I", "1"},
        {"-Δ₁⊗I + I⊗(-Δ₂)", "(+ (sq xi1) (sq xi2))"},
        {"-Δ₁⊗(-Δ₂)", "(* (sq xi1) (sq xi2))"},
        {"-Δ₁⊗(-Δ₂+I)", "(* (sq xi1) (+ (sq xi2) 1))"},
        {"(-Δ₁+I)⊗(-Δ₂+I)", "(* (+ (sq xi1) 1) (+ (sq xi2) 1))"},
        {"(-Δ₁+I)⁻¹⊗(-Δ₂+I)⁻¹", "(* (pow (+ (sq xi1) 1) -1) (pow (+ (sq xi2) 1) -1))"},
    };
}

// Classical order on the product and ellipticity of the top total-degree part;
// nullopt when the symbol is not a polynomial in (xi1, xi2).
struct JointPsiDO {
    int order;
    bool elliptic;
};

inline std::optional<JointPsiDO> joint_classical(const BiSymbol& a) {
    int deg = 0;
    if (!detail::polynomial_in_xi(a, deg)) return std::nullopt;
    int top = 0;
    for (auto& [k, c] : a.terms()) top = std::max(top, k.first.p + k.second.p);
    BiSymbol lead = a.filter([&](const Atom& x, const Atom& y) { return x.p + y.p == top; });
    bool ell = true;
    for (int i = 0; i < 720 && ell; ++i) {
        double th = 2 * M_PI * i / 720;
        for (int xc = 0; xc < 4 && ell; ++xc)
            for (int yc = 0; yc < 4 && ell; ++yc)
                ell = detail::nonzero(lead.eval(2 * M_PI * xc / 4, 2 * M_PI * yc / 4, std::cos(th), std::sin(th)));
    }
    return JointPsiDO{top, ell};
}

inline std::string region_label(const Region& r, int comp) {
    switch (r.kind) {
        case Region::Kind::Empty: return "∅";
        case Region::Kind::Full:
            return comp == 1 ? "Ω×R₀^{n₁}×{0}" : comp == 2 ? "Ω×{0}×R₀^{n₂}" : "Ω×R₀^{n₁₂}";
        default: {
            std::string s = "{";
            for (std::size_t i = 0; i < r.flags.size(); ++i) {
                auto& f = r.flags[i];
                s += (i ? " " : "") + std::string("(") + std::to_string(f.c1) + "," + std::to_string(f.c2) + "," +
                     std::to_string(f.s1) + "," + std::to_string(f.s2) + ")";
            }
            return s + "}";
        }
    }
}

inline std::string bi_order_label(const BiOrder& o) { return o.str(); }

inline std::string table1_markdown() {
    std::ostringstream os;
    os << "| Operator | ΨDO-order | ΨDO-ell. | Bi-order | Bi-ell. |\n";
    os << "|---|---|---|---|---|\n";
    for (auto& op : model_operators()) {
        BiSymbol a = parse_symbol(op.literal);
        auto j = joint_classical(a);
        auto e = is_bielliptic(a);
        os << "| " << op.name << " | " << (j ? std::to_string(j->order) : "not a ΨDO") << " | "
           << (j ? (j->elliptic ? "√" : "×") : "") << " | " << bi_order_label(a.bi_order()) << " | "
           << (e.bielliptic() ? "√" : "×") << " |\n";
    }
    return os.str();
}

// The row whose tabulated reference lists the transpose of the definition-derived sets.
inline constexpr int kTransposedRow = 4;

inline std::string table2_markdown(CharReading reading = CharReading::A) {
    std::ostringstream os;
    os << "| Operator | Char¹ | Char² | Char¹² | Note |\n";
    os << "|---|---|---|---|---|\n";
    int row = 0;
    for (auto& op : model_operators()) {
        ++row;
        EllipticityConfig cfg;
        cfg.reading = reading;
        CharReport r = char_sets(parse_symbol(op.literal), cfg);
        std::string note;
        if (row == kTransposedRow)
            note = "transposed vs. tabulated reference (Ω×R₀^{n₁}×{0}; ∅; ∅)";
        os << "| " << op.name << " | " << region_label(r.char1, 1) << " | " << region_label(r.char2, 2) << " | "
           << region_label(r.char12, 12) << " | " << note << " |\n";
    }
    return os.str();
}

}  // namespace bisingular
