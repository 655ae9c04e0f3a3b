#pragma once

#include <cctype>
#include <cmath>
#include <string>
#include <string_view>
#include <vector>

#include "bisymbol.hpp"
#include "errors.hpp"
#include "kernels.hpp"

namespace bisingular {

// S-expression reader shared by the symbol grammar and the distribution grammar.
struct SExpr {
    std::string atom;  // empty for lists
    std::vector<SExpr> items;
    std::size_t pos = 0;
    bool quoted = false;

    bool is_list() const { return atom.empty() && !quoted; }
};

namespace detail {

class Reader {
public:
    explicit Reader(std::string_view s) : s_(s) {}

    SExpr read_all() {
        skip();
        if (i_ == s_.size()) throw ParseError("empty input", i_);
        SExpr e = read();
        skip();
        if (i_ != s_.size()) throw ParseError("trailing input", i_);
        return e;
    }

private:
    void skip() {
        while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) ++i_;
    }
    SExpr read() {
        skip();
        if (i_ >= s_.size()) throw ParseError("unexpected end of input", i_);
        SExpr e;
        e.pos = i_;
        char c = s_[i_];
        if (c == '(') {
            ++i_;
            for (;;) {
                skip();
                if (i_ >= s_.size()) throw ParseError("missing ')'", e.pos);
                if (s_[i_] == ')') {
                    ++i_;
                    break;
                }
                e.items.push_back(read());
            }
            if (e.items.empty()) throw ParseError("empty list", e.pos);
            return e;
        }
        if (c == ')') throw ParseError("unexpected ')'", i_);
        if (c == '"') {
            std::size_t start = ++i_;
            while (i_ < s_.size() && s_[i_] != '"') ++i_;
            if (i_ >= s_.size()) throw ParseError("unterminated string", e.pos);
            e.atom = std::string(s_.substr(start, i_ - start));
            e.quoted = true;
            ++i_;
            return e;
        }
        std::size_t start = i_;
        while (i_ < s_.size() && !std::isspace(static_cast<unsigned char>(s_[i_])) && s_[i_] != '(' && s_[i_] != ')' &&
               s_[i_] != '"')
            ++i_;
        e.atom = std::string(s_.substr(start, i_ - start));
        return e;
    }

    std::string_view s_;
    std::size_t i_ = 0;
};

inline bool parse_number(const std::string& s, double& out) {
    if (s.empty()) return false;
    char* end = nullptr;
    out = std::strtod(s.c_str(), &end);
    return end == s.c_str() + s.size() && std::isfinite(out);
}

}  // namespace detail

inline SExpr read_sexpr(std::string_view text) { return detail::Reader(text).read_all(); }

// Named coefficient functions accepted by (coef NAME) and (coef NAME e).
inline TrigPoly named_coefficient(const std::string& name, std::size_t pos) {
    if (name == "one") return TrigPoly(1.0);
    if (name == "sin_x1") return TrigPoly::sin_x(1);
    if (name == "sin_x2") return TrigPoly::sin_x(2);
    if (name == "cos_x1") return TrigPoly::cos_x(1);
    if (name == "cos_x2") return TrigPoly::cos_x(2);
    if (name == "exp_x1") return TrigPoly::mode(1, 0);
    if (name == "exp_x2") return TrigPoly::mode(0, 1);
    if (name == "exp_mx1") return TrigPoly::mode(-1, 0);
    if (name == "exp_mx2") return TrigPoly::mode(0, -1);
    throw ParseError("unknown coefficient '" + name + "'", pos);
}

namespace detail {

class SymbolBuilder {
public:
    BiSymbol build(const SExpr& e) {
        if (!e.is_list()) return build_atom(e);
        const SExpr& head = e.items[0];
        if (head.is_list()) throw ParseError("operator expected", head.pos);
        const std::string& op = head.atom;
        auto args = [&](std::size_t lo, std::size_t hi) {
            std::size_t n = e.items.size() - 1;
            if (n < lo || n > hi) throw ParseError("wrong number of arguments to '" + op + "'", e.pos);
        };
        if (op == "+") {
            args(1, 1000);
            BiSymbol s;
            for (std::size_t i = 1; i < e.items.size(); ++i) s += build(e.items[i]);
            return s;
        }
        if (op == "*") {
            args(1, 1000);
            BiSymbol s = build(e.items[1]);
            for (std::size_t i = 2; i < e.items.size(); ++i) s = s * build(e.items[i]);
            return s;
        }
        if (op == "-") {
            args(1, 2);
            if (e.items.size() == 2) return build(e.items[1]) * cplx(-1);
            return build(e.items[1]) - build(e.items[2]);
        }
        if (op == "sq") {
            args(1, 1);
            BiSymbol s = build(e.items[1]);
            return s * s;
        }
        if (op == "pow") {
            args(2, 2);
            int n = integer(e.items[2]);
            return power(build(e.items[1]), n, e.items[1].pos);
        }
        if (op == "mono") {
            args(2, 2);
            int slot = slot_of(e.items[1]);
            return BiSymbol::xi(slot, integer(e.items[2]));
        }
        if (op == "abs") {
            args(1, 1);
            return one_slot(slot_of(e.items[1]), XiFactor::shifted(0.0, 1));
        }
        if (op == "bracket") {
            args(2, 2);
            return one_slot(slot_of(e.items[1]), XiFactor::bracket(integer(e.items[2])));
        }
        if (op == "shifted") {
            args(3, 3);
            double c = number(e.items[2]);
            double s = number(e.items[3]);
            if (c <= 0) throw ParseError("shifted power needs c > 0", e.items[2].pos);
            if (std::round(2 * s) != 2 * s) throw ParseError("shifted exponent must be a multiple of 1/2", e.items[3].pos);
            return one_slot(slot_of(e.items[1]), XiFactor::shifted(c, int(2 * s)));
        }
        if (op == "profile") {
            args(4, 4);
            int slot = slot_of(e.items[1]);
            if (e.items[2].atom != "bump") throw ParseError("unknown profile '" + e.items[2].atom + "'", e.items[2].pos);
            double r = number(e.items[3]);
            int bw = integer(e.items[4]);
            if (r <= 0 || bw < 2) throw ParseError("bad bump profile parameters", e.items[3].pos);
            return one_slot(slot, XiFactor::profile(bump_profile(r, bw)));
        }
        if (op == "coef") {
            args(1, 2);
            TrigPoly c = coefficient(e.items[1]);
            if (e.items.size() == 2) return BiSymbol::coefficient(c);
            return BiSymbol::coefficient(c) * build(e.items[2]);
        }
        if (op == "mode") {
            args(3, 4);
            int k1 = integer(e.items[1]), k2 = integer(e.items[2]);
            double re = number(e.items[3]);
            double im = e.items.size() > 4 ? number(e.items[4]) : 0.0;
            return BiSymbol::coefficient(TrigPoly::mode(k1, k2, cplx(re, im)));
        }
        throw ParseError("unknown operator '" + op + "'", head.pos);
    }

private:
    static BiSymbol one_slot(int slot, const XiFactor& f) {
        return slot == 1 ? BiSymbol(TrigPoly(1.0), f, XiFactor(1.0)) : BiSymbol(TrigPoly(1.0), XiFactor(1.0), f);
    }
    BiSymbol build_atom(const SExpr& e) {
        if (e.quoted) throw ParseError("unexpected string", e.pos);
        if (e.atom == "xi1") return BiSymbol::xi(1);
        if (e.atom == "xi2") return BiSymbol::xi(2);
        if (e.atom == "I") return BiSymbol(cplx(0, 1));
        double v;
        if (detail::parse_number(e.atom, v)) return BiSymbol(cplx(v));
        throw ParseError("unknown token '" + e.atom + "'", e.pos);
    }
    static int slot_of(const SExpr& e) {
        if (e.atom == "xi1") return 1;
        if (e.atom == "xi2") return 2;
        throw ParseError("expected xi1 or xi2", e.pos);
    }
    static double number(const SExpr& e) {
        double v;
        if (e.is_list() || !detail::parse_number(e.atom, v)) throw ParseError("number expected", e.pos);
        return v;
    }
    static int integer(const SExpr& e) {
        double v = number(e);
        if (v != std::round(v)) throw ParseError("integer expected", e.pos);
        return int(v);
    }
    TrigPoly coefficient(const SExpr& e) {
        if (!e.is_list()) return named_coefficient(e.atom, e.pos);
        BiSymbol s = build(e);
        if (s.terms().size() != 1 || !s.terms().begin()->first.first.is_constant() ||
            !s.terms().begin()->first.second.is_constant())
            throw ParseError("coefficient expression must not depend on xi", e.pos);
        return s.terms().begin()->second;
    }

    // Reciprocal of a one-slot, x-independent factor that is a scaled atom or xi^2 + c.
    static BiSymbol reciprocal(const BiSymbol& s, std::size_t pos) {
        if (s.is_zero()) throw ParseError("reciprocal of zero", pos);
        int slot = 0;
        XiFactor f;
        for (auto& [k, c] : s.terms()) {
            if (!c.is_constant() || c.constant_value().imag() != 0)
                throw ParseError("reciprocal needs a real constant-coefficient factor", pos);
            int here = k.first.is_constant() ? (k.second.is_constant() ? 0 : 2) : (k.second.is_constant() ? 1 : -1);
            if (here < 0) throw ParseError("reciprocal needs a one-slot factor", pos);
            if (here != 0) {
                if (slot != 0 && slot != here) throw ParseError("reciprocal needs a one-slot factor", pos);
                slot = here;
            }
            f.add(here == 2 ? k.second : k.first, c.constant_value().real());
        }
        if (slot == 0) slot = 1;
        const auto& at = f.atoms();
        if (at.size() == 1) {
            Atom a = at.begin()->first;
            if (a.profile) throw OutsideFamily("reciprocal of a tabulated profile");
            a.p = -a.p;
            for (auto& sh : a.shifts) sh.second = -sh.second;
            return one_slot(slot, XiFactor::from_atom(a) * (1.0 / at.begin()->second));
        }
        if (at.size() == 2) {
            auto it = at.begin();
            const Atom& a0 = it->first;
            double c0 = it->second;
            ++it;
            const Atom& a1 = it->first;
            double c1 = it->second;
            if (a0.is_constant() && a1.is_monomial() && a1.p == 2 && c0 / c1 > 0)
                return one_slot(slot, XiFactor::shifted(c0 / c1, -2) * (1.0 / c1));
        }
        throw OutsideFamily("reciprocal not representable in the factor family");
    }

    static BiSymbol power(const BiSymbol& s, int n, std::size_t pos) {
        BiSymbol base = n < 0 ? reciprocal(s, pos) : s;
        BiSymbol r(1.0);
        for (int i = 0; i < std::abs(n); ++i) r = r * base;
        return r;
    }
};

}  // namespace detail

// Parse a symbol literal such as (* (+ (sq xi1) 1) (+ (sq xi2) 1)).
inline BiSymbol parse_symbol(std::string_view text) {
    SExpr e = read_sexpr(text);
    try {
        return detail::SymbolBuilder().build(e);
    } catch (const OutsideFamily& err) {
        throw ParseError(err.what(), 0);
    }
}

}  // namespace bisingular
