#include <gtest/gtest.h>

#include <random>

#include <bisingular/calculus.hpp>
#include <bisingular/parser.hpp>
#include <bisingular/torus_fields.hpp>

#include "support.hpp"

using namespace bisingular;

namespace {

const cplx I(0, 1);
BiSymbol P(const std::string& s) { return parse_symbol(s); }

void expect_bihomogeneous(const BiSymbol& s, BiOrder o) {
    for (double t : {0.5, 2.0, 3.0})
        for (double r : {0.25, 4.0}) {
            cplx base = s.eval(0.4, 1.3, 1.7, -2.2);
            cplx scaled = s.eval(0.4, 1.3, t * 1.7, r * -2.2);
            double f = std::pow(t, double(o.m1.value())) * std::pow(r, double(o.m2.value()));
            EXPECT_LT(std::abs(scaled - f * base), 1e-12 * std::max(1.0, std::abs(scaled)));
        }
}

}  // namespace

TEST(PrincipalTriple, SumOfLaplacians) {
    auto t = principal_triple(P("(+ (sq xi1) (sq xi2))"));
    EXPECT_EQ(t.sigma1, P("(sq xi1)"));
    EXPECT_EQ(t.sigma2, P("(sq xi2)"));
    EXPECT_TRUE(t.sigma12.is_zero());
}

TEST(PrincipalTriple, MixedLeading) {
    auto t = principal_triple(P("(* (sq xi1) (+ (sq xi2) 1))"));
    EXPECT_EQ(t.sigma1, P("(* (sq xi1) (+ (sq xi2) 1))"));
    EXPECT_EQ(t.sigma2, P("(* (sq xi1) (sq xi2))"));
    EXPECT_EQ(t.sigma12, P("(* (sq xi1) (sq xi2))"));
    expect_bihomogeneous(t.sigma12, t.order);
    auto u = principal_triple(P("(* (+ (sq xi1) 1) (+ (sq xi2) 1))"));
    EXPECT_EQ(u.sigma12, P("(* (sq xi1) (sq xi2))"));
}

TEST(PrincipalTriple, CompatibilityOnRandomSymbols) {
    std::mt19937_64 rng(11);
    for (int i = 0; i < 30; ++i) {
        BiSymbol a = testsupport::random_differential(rng);
        auto t = principal_triple(a);
        EXPECT_EQ(leading_in_slot(t.sigma1, 2, t.order.m2), t.sigma12);
        EXPECT_EQ(leading_in_slot(t.sigma2, 1, t.order.m1), t.sigma12);
        if (!t.sigma12.is_zero()) expect_bihomogeneous(t.sigma12, t.order);
    }
}

TEST(PrincipalTriple, ProfileIsNotClassical) {
    EXPECT_THROW(principal_triple(P("(* (profile xi1 bump 0.6 16) (sq xi2))")), NotClassical);
}

TEST(Compose, ConstantCoefficients) {
    auto c = compose(P("(sq xi1)"), P("(sq xi2)"), 4);
    EXPECT_TRUE(c.exact);
    EXPECT_EQ(c.total(), P("(* (sq xi1) (sq xi2))"));
    EXPECT_TRUE(c.terms[0].c1.is_zero());
    EXPECT_TRUE(c.terms[0].c2.is_zero());
    EXPECT_EQ(c.terms[0].c12, P("(* (sq xi1) (sq xi2))"));
    for (std::size_t j = 1; j < c.terms.size(); ++j) EXPECT_TRUE(c.terms[j].sum().is_zero());
}

TEST(Compose, XiTimesSine) {
    auto c = compose(P("xi1"), BiSymbol::coefficient(TrigPoly::sin_x(1)), 4);
    BiSymbol want = BiSymbol::coefficient(TrigPoly::sin_x(1)) * P("xi1") + BiSymbol::coefficient(TrigPoly::cos_x(1)) * (-I);
    EXPECT_LT(c.total().max_abs_diff(want), 1e-15);
    // plane-wave oracle: apply both operators to e^{i k x1}
    CoeffField u(32);
    u.at(5, 0) = 1;
    CoeffField lhs = apply_operator(c.total(), u);
    CoeffField rhs = apply_operator(P("xi1"), apply_operator(BiSymbol::coefficient(TrigPoly::sin_x(1)), u));
    EXPECT_LT(testsupport::rel_diff(lhs, rhs), 1e-14);
}

TEST(Compose, TensorCaseFactorizes) {
    BiSymbol a1 = BiSymbol::coefficient(TrigPoly::cos_x(1)) * P("(sq xi1)");
    BiSymbol a2 = BiSymbol::coefficient(TrigPoly::sin_x(2)) * P("xi2");
    BiSymbol b1 = BiSymbol::coefficient(TrigPoly::sin_x(1)) * P("xi1");
    BiSymbol b2 = BiSymbol::coefficient(TrigPoly::mode(0, 2)) * P("(sq xi2)");
    BiSymbol whole = compose(a1 * a2, b1 * b2, 6).total();
    BiSymbol f1 = compose(a1, b1, 6).total(), f2 = compose(a2, b2, 6).total();
    EXPECT_LT(whole.max_abs_diff(f1 * f2), 1e-13);
}

TEST(Compose, OrderBookkeepingAndApplication) {
    std::mt19937_64 rng(3);
    CoeffField u = builtin::random_smooth(48, 5);
    for (int i = 0; i < 20; ++i) {
        BiSymbol a = testsupport::random_differential(rng), b = testsupport::random_differential(rng);
        auto c = compose(a, b, 6);
        EXPECT_TRUE(c.exact);
        if (!c.total().is_zero()) EXPECT_TRUE(c.total().bi_order().leq(a.bi_order() + b.bi_order()));
        for (std::size_t j = 0; j < c.terms.size(); ++j) {
            BiOrder s = a.bi_order() + b.bi_order();
            int jj = int(j);
            if (!c.terms[j].c1.is_zero()) EXPECT_TRUE(c.terms[j].c1.bi_order().leq(s.shifted(jj + 1, jj)));
            if (!c.terms[j].c2.is_zero()) EXPECT_TRUE(c.terms[j].c2.bi_order().leq(s.shifted(jj, jj + 1)));
            if (!c.terms[j].c12.is_zero()) EXPECT_TRUE(c.terms[j].c12.bi_order().leq(s.shifted(jj, jj)));
        }
        EXPECT_LT(testsupport::rel_diff(apply_operator(c.total(), u), apply_operator(a, apply_operator(b, u))), 1e-10);
    }
}

TEST(Commutator, Examples) {
    EXPECT_TRUE(commutator(P("(sq xi1)"), P("(sq xi2)"), 4).total().is_zero());
    BiSymbol a = P("(+ xi1 xi2)");
    BiSymbol b = BiSymbol::coefficient(TrigPoly::sin_x(1) + TrigPoly::sin_x(2));
    auto chk = check_commutator(a, b, 4);
    EXPECT_TRUE(chk.c12_zero);
    EXPECT_TRUE(chk.leading_matches);
    // [D, sin x] u = -i cos x u
    BiSymbol want = BiSymbol::coefficient(TrigPoly::cos_x(1) + TrigPoly::cos_x(2)) * (-I);
    EXPECT_LT(chk.bracket_term.max_abs_diff(want), 1e-15);
    EXPECT_LT(commutator(a, b, 4).total().max_abs_diff(want), 1e-15);
}

TEST(Commutator, RandomPairs) {
    std::mt19937_64 rng(5);
    for (int i = 0; i < 20; ++i) {
        BiSymbol a = testsupport::random_differential(rng), b = testsupport::random_differential(rng);
        auto chk = check_commutator(a, b, 6);
        EXPECT_TRUE(chk.c12_zero);
        EXPECT_TRUE(chk.leading_matches);
        EXPECT_TRUE(chk.remainder_orders_ok);
    }
}

TEST(Commutator, ExactWithIntegerCoefficients) {
    std::mt19937_64 rng(11);
    for (int i = 0; i < 20; ++i) {
        BiSymbol a = testsupport::random_differential(rng, 2, 3, true), b = testsupport::random_differential(rng, 2, 3, true);
        auto chk = check_commutator(a, b, 6, 0.0);
        EXPECT_EQ(chk.c12_residual, 0.0);
        EXPECT_EQ(chk.leading_residual, 0.0);
        EXPECT_TRUE(chk.remainder_orders_ok);
    }
}

TEST(Bielliptic, TableRows) {
    EXPECT_TRUE(is_bielliptic(P("(* (+ (sq xi1) 1) (+ (sq xi2) 1))")).bielliptic());
    EXPECT_FALSE(is_bielliptic(P("(* (sq xi1) (sq xi2))")).bielliptic());
    BiSymbol inv = P("(* (pow (+ (sq xi1) 1) -1) (pow (+ (sq xi2) 1) -1))");
    EXPECT_TRUE(is_bielliptic(inv).bielliptic());
    EXPECT_EQ(inv.bi_order(), (BiOrder{-2, -2}));
}

TEST(CharSets, Examples) {
    auto r1 = char_sets(P("1"));
    EXPECT_EQ(r1.char1.kind, Region::Kind::Empty);
    EXPECT_EQ(r1.char2.kind, Region::Kind::Empty);
    EXPECT_EQ(r1.char12.kind, Region::Kind::Empty);
    auto r2 = char_sets(P("(+ (sq xi1) (sq xi2))"));
    EXPECT_EQ(r2.char1.kind, Region::Kind::Full);
    EXPECT_EQ(r2.char2.kind, Region::Kind::Full);
    EXPECT_EQ(r2.char12.kind, Region::Kind::Full);
    auto r4 = char_sets(P("(* (sq xi1) (+ (sq xi2) 1))"));
    EXPECT_EQ(r4.char1.kind, Region::Kind::Empty);
    EXPECT_EQ(r4.char2.kind, Region::Kind::Full);
    EXPECT_EQ(r4.char12.kind, Region::Kind::Empty);
}

TEST(CharSets, BiellipticIffEmpty) {
    for (auto& op : model_operators()) {
        BiSymbol a = P(op.literal);
        auto r = char_sets(a);
        bool empty = r.char1.kind == Region::Kind::Empty && r.char2.kind == Region::Kind::Empty &&
                     r.char12.kind == Region::Kind::Empty;
        EXPECT_EQ(is_bielliptic(a).bielliptic(), empty) << op.name;
    }
}

TEST(ExactInverse, Examples) {
    EXPECT_EQ(exact_tensor_inverse(P("(* (+ (sq xi1) 1) (+ (sq xi2) 1))")),
              P("(* (pow (+ (sq xi1) 1) -1) (pow (+ (sq xi2) 1) -1))"));
    EXPECT_EQ(exact_tensor_inverse(P("1")), P("1"));
    EXPECT_THROW(exact_tensor_inverse(P("(* (sq xi1) (sq xi2))")), NotInvertible);
    BiSymbol a = P("(* (+ (sq xi1) 1) (+ (sq xi2) 1))");
    EXPECT_EQ(compose(a, exact_tensor_inverse(a), 4).total(), P("1"));
}
