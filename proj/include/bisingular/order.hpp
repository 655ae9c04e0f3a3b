#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>

namespace bisingular {

// Integer order with a -infinity element.
class ExtInt {
public:
    constexpr ExtInt() = default;
    constexpr ExtInt(std::int64_t v) : v_(v) {}  // NOLINT(implicit)

    static constexpr ExtInt neg_inf() {
        ExtInt e;
        e.v_ = kNegInf;
        return e;
    }

    constexpr bool is_neg_inf() const { return v_ == kNegInf; }
    constexpr std::int64_t value() const {
        if (is_neg_inf()) throw std::domain_error("ExtInt: -inf has no finite value");
        return v_;
    }

    friend constexpr ExtInt operator+(ExtInt a, ExtInt b) {
        if (a.is_neg_inf() || b.is_neg_inf()) return neg_inf();
        return ExtInt(a.v_ + b.v_);
    }
    friend constexpr ExtInt operator-(ExtInt a, std::int64_t d) {
        if (a.is_neg_inf()) return a;
        return ExtInt(a.v_ - d);
    }
    friend constexpr auto operator<=>(ExtInt a, ExtInt b) = default;

    std::string str() const { return is_neg_inf() ? "-inf" : std::to_string(v_); }

private:
    static constexpr std::int64_t kNegInf = std::numeric_limits<std::int64_t>::min();
    std::int64_t v_ = 0;
};

inline ExtInt max(ExtInt a, ExtInt b) { return a < b ? b : a; }
inline std::ostream& operator<<(std::ostream& os, ExtInt e) { return os << e.str(); }

struct BiOrder {
    ExtInt m1 = ExtInt::neg_inf();
    ExtInt m2 = ExtInt::neg_inf();

    static BiOrder zero_symbol() { return {}; }

    friend BiOrder operator+(const BiOrder& a, const BiOrder& b) { return {a.m1 + b.m1, a.m2 + b.m2}; }
    friend bool operator==(const BiOrder&, const BiOrder&) = default;

    // componentwise partial order
    bool leq(const BiOrder& o) const { return m1 <= o.m1 && m2 <= o.m2; }
    BiOrder join(const BiOrder& o) const { return {max(m1, o.m1), max(m2, o.m2)}; }
    BiOrder shifted(std::int64_t d1, std::int64_t d2) const { return {m1 - d1, m2 - d2}; }

    std::string str() const { return "(" + m1.str() + "," + m2.str() + ")"; }
};

inline std::ostream& operator<<(std::ostream& os, const BiOrder& o) { return os << o.str(); }

// Multi-indices for n1 = n2 = 1; the arrays keep the general shape visible.
struct MultiIndexPair {
    std::array<int, 1> alpha1{0};
    std::array<int, 1> alpha2{0};

    int abs1() const { return alpha1[0]; }
    int abs2() const { return alpha2[0]; }
    friend bool operator==(const MultiIndexPair&, const MultiIndexPair&) = default;
};

}  // namespace bisingular
