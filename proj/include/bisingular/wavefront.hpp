#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "errors.hpp"
#include "kernels.hpp"
#include "torus_fields.hpp"

namespace bisingular {

// ---------------------------------------------------------------- classification

struct Thresholds {
    double smooth = -3.0;
    double singular = -1.0;
    double negligible = 1e-3;  // relative shell mass treated as zero
    double reference = -8.0;   // a cone whose unlocalized decay is this fast is smooth everywhere
};

enum class Cls { Smooth, Singular, Indeterminate };

inline const char* cls_name(Cls c) {
    switch (c) {
        case Cls::Smooth: return "smooth";
        case Cls::Singular: return "singular";
        default: return "indeterminate";
    }
}

inline constexpr double kLogFloor = 1e-30;
inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct DecayProfile {
    std::vector<int> j;
    std::vector<double> value;      // quantity whose log2 is fitted
    std::vector<double> localized;  // raw shell maxima of the probe field
    std::vector<double> reference;  // shell maxima of the unlocalized field (empty in raw mode)
    std::vector<int> excluded;      // empty shells inside [j_min, j_max]
    double slope = 0;
    int j_min = 0, j_max = -1;
    bool negligible = false;
    bool reference_smooth = false;
    double reference_slope = 0;

    std::vector<double> log2_values() const {
        std::vector<double> r;
        for (double v : value) r.push_back(std::log2(std::max(v, kLogFloor)));
        return r;
    }
};

inline double fit_slope(const std::vector<int>& js, const std::vector<double>& vals) {
    const std::size_t n = js.size();
    if (n < 2) return 0;
    double mx = 0, my = 0;
    std::vector<double> y;
    for (std::size_t i = 0; i < n; ++i) {
        y.push_back(std::log2(std::max(vals[i], kLogFloor)));
        mx += js[i];
        my += y.back();
    }
    mx /= double(n), my /= double(n);
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sxy += (js[i] - mx) * (y[i] - my);
        sxx += (js[i] - mx) * (js[i] - mx);
    }
    return sxy / sxx;
}

inline Cls classify(double slope, const Thresholds& th = {}) {
    if (slope <= th.smooth) return Cls::Smooth;
    if (slope >= th.singular) return Cls::Singular;
    return Cls::Indeterminate;
}

inline Cls classify(const DecayProfile& p, const Thresholds& th = {}) {
    if (p.reference_smooth || p.negligible) return Cls::Smooth;
    return classify(p.slope, th);
}

// Distance of the decision from the nearest threshold (negative when indeterminate).
inline double decision_margin(const DecayProfile& p, const Thresholds& th = {}) {
    if (p.reference_smooth || p.negligible) return kInf;
    switch (classify(p.slope, th)) {
        case Cls::Smooth: return th.smooth - p.slope;
        case Cls::Singular: return p.slope - th.singular;
        default: return -std::min(p.slope - th.smooth, th.singular - p.slope);
    }
}

// ---------------------------------------------------------------- shells

struct ShellSet {
    std::vector<int> j;
    std::vector<std::vector<std::pair<int, int>>> pts;
    std::vector<int> excluded;
    std::size_t size() const { return j.size(); }
};

inline ShellSet make_shells(int b1, int b2, int j0, const std::function<bool(int, int)>& inside,
                            const std::function<double(int, int)>& radius) {
    std::vector<std::vector<std::pair<int, int>>> by_j(40);
    for (int k1 = -b1; k1 <= b1; ++k1)
        for (int k2 = -b2; k2 <= b2; ++k2) {
            if (!inside(k1, k2)) continue;
            double r = radius(k1, k2);
            if (r < std::ldexp(1.0, j0)) continue;
            int j = int(std::floor(std::log2(r)));
            // guard against rounding at exact powers of two
            if (std::ldexp(1.0, j + 1) <= r) ++j;
            if (std::ldexp(1.0, j) > r) --j;
            by_j[std::size_t(j)].push_back({k1, k2});
        }
    ShellSet s;
    int last = -1;
    for (int j = 0; j < 40; ++j)
        if (!by_j[std::size_t(j)].empty()) last = j;
    for (int j = j0; j <= last; ++j) {
        if (by_j[std::size_t(j)].empty()) {
            s.excluded.push_back(j);
            continue;
        }
        s.j.push_back(j);
        s.pts.push_back(std::move(by_j[std::size_t(j)]));
    }
    return s;
}

// Drops leading shells below j_pref as long as at least min_shells remain.
inline void trim_below(ShellSet& s, int j_pref, int min_shells) {
    std::size_t drop = 0;
    while (drop < s.size() && s.j[drop] < j_pref && int(s.size() - drop) > min_shells) ++drop;
    s.j.erase(s.j.begin(), s.j.begin() + long(drop));
    s.pts.erase(s.pts.begin(), s.pts.begin() + long(drop));
}

// ---------------------------------------------------------------- raw decay profile

// Shell maxima of |v|/<k_other>^p over the cone, radius |k_i| for factor cones and
// |k| for joint cones; p weights the slot not being tested (k2 for factor-1 cones).
inline DecayProfile decay_profile(const CoeffField& v, const ConeLocalizer& cone, double weight_allowance = 0.0,
                                  int j0 = 3, int min_shells = 4) {
    using W = ConeLocalizer::Which;
    auto radius = [&](int k1, int k2) -> double {
        if (cone.which == W::Factor1) return std::abs(k1);
        if (cone.which == W::Factor2) return std::abs(k2);
        return std::hypot(double(k1), double(k2));
    };
    auto inside = [&](int k1, int k2) {
        if (cone.which == W::Joint) return cone.value(k1, k2) > 0 && radius(k1, k2) >= 2 * cone.r0;
        return cone.value(k1, k2) >= 1.0;
    };
    ShellSet sh = make_shells(v.safe1(), v.safe2(), j0, inside, radius);
    if (int(sh.size()) < min_shells) throw InsufficientBand("decay_profile: fewer than " + std::to_string(min_shells) + " shells");
    DecayProfile p;
    p.j = sh.j;
    p.excluded = sh.excluded;
    for (std::size_t s = 0; s < sh.size(); ++s) {
        double m = 0;
        for (auto [k1, k2] : sh.pts[s]) {
            double other = cone.which == W::Factor2 ? k1 : (cone.which == W::Factor1 ? k2 : 0);
            double w = weight_allowance != 0 ? std::pow(1 + other * other, 0.5 * weight_allowance) : 1.0;
            m = std::max(m, std::abs(v.at(k1, k2)) / w);
        }
        p.localized.push_back(m);
        p.value.push_back(m);
    }
    p.slope = fit_slope(p.j, p.value);
    p.j_min = p.j.front();
    p.j_max = p.j.back();
    return p;
}

// ---------------------------------------------------------------- sectors and flags

// Direction sectors centred at angle idx*pi/4.
enum Sector : int { Axis1Pos = 0, QuadPP = 1, Axis2Pos = 2, QuadMP = 3, Axis1Neg = 4, QuadMM = 5, Axis2Neg = 6, QuadPM = 7 };

inline const char* sector_name(int s) {
    static const char* names[8] = {"axis1+", "q++", "axis2+", "q-+", "axis1-", "q--", "axis2-", "q+-"};
    return names[s & 7];
}
inline int sector_from_name(const std::string& n) {
    for (int s = 0; s < 8; ++s)
        if (n == sector_name(s)) return s;
    throw std::invalid_argument("unknown sector " + n);
}
inline int quadrant_sector(int s1, int s2) { return s1 > 0 ? (s2 > 0 ? QuadPP : QuadPM) : (s2 > 0 ? QuadMP : QuadMM); }
inline int axis_sector(int factor, int s) { return factor == 1 ? (s > 0 ? Axis1Pos : Axis1Neg) : (s > 0 ? Axis2Pos : Axis2Neg); }
inline bool is_quadrant(int s) { return s % 2 == 1; }
inline int swap_sector(int s) { return ((2 - s) % 8 + 8) % 8; }

inline constexpr int kAllCells = -1;

struct Flag {
    int c1 = kAllCells, c2 = kAllCells;
    int sector = 0;
    double slope = 0;

    auto key() const { return std::tuple(c1, c2, sector); }
    friend bool operator<(const Flag& a, const Flag& b) { return a.key() < b.key(); }
    friend bool operator==(const Flag& a, const Flag& b) { return a.key() == b.key(); }
};

enum class Component { Cl, One, Two, Twelve, Tilde, Cl1D };
inline const char* component_name(Component c) {
    switch (c) {
        case Component::Cl: return "cl";
        case Component::One: return "1";
        case Component::Two: return "2";
        case Component::Twelve: return "12";
        case Component::Tilde: return "tilde";
        default: return "cl1d";
    }
}

enum class Mode { Relaxed, Strict };
inline const char* mode_name(Mode m) { return m == Mode::Strict ? "strict" : "relaxed"; }
inline Mode mode_from_name(const std::string& s) {
    if (s == "strict") return Mode::Strict;
    if (s == "relaxed") return Mode::Relaxed;
    throw std::invalid_argument("mode must be strict or relaxed");
}

struct ProbeResult {
    std::string id;
    Flag where;
    DecayProfile profile;
    Cls cls = Cls::Smooth;
    double margin = kInf;
};

struct WFSet {
    Component component = Component::Cl;
    Mode mode = Mode::Relaxed;
    int N = 0, cells = 0;
    Thresholds thresholds;
    std::vector<Flag> flags;
    std::vector<Flag> indeterminate;
    std::vector<ProbeResult> probes;

    bool empty() const { return flags.empty(); }
    bool has_indeterminate() const { return !indeterminate.empty(); }
    double min_margin() const {
        double m = kInf;
        for (auto& p : probes) m = std::min(m, p.margin);
        return m;
    }
    void canonicalize() {
        auto tidy = [](std::vector<Flag>& v) {
            std::sort(v.begin(), v.end());
            v.erase(std::unique(v.begin(), v.end()), v.end());
        };
        tidy(flags);
        tidy(indeterminate);
    }
    bool contains(int c1, int c2, int sector) const {
        for (auto& f : flags)
            if (f.c1 == c1 && f.c2 == c2 && f.sector == sector) return true;
        return false;
    }
};

// ---------------------------------------------------------------- configuration

struct DetectorConfig {
    int cells = 0;  // 0: max(4, N/16)
    Thresholds th;
    double margin = 0.2;  // angular margin of quadrant and axis cones
    double r0 = 2.0;
    int jackson_power = 2;
    int min_shells = 4;
    bool keep_probes = true;

    int cells_for(int N) const { return cells > 0 ? cells : std::max(4, N / 16); }
    int probe_bandwidth(int N) const { return jackson_power * (cells_for(N) - 1); }
    // first dyadic shell whose inner radius reaches the probe bandwidth; below it the
    // localized coefficients are dominated by smearing across the probe support
    int first_shell(int N) const {
        int B = probe_bandwidth(N);
        return std::max(2, B > 0 ? int(std::floor(std::log2(double(B)))) : 2);
    }
    // shells below this are dropped when enough remain: their localized maxima are still
    // dominated by smearing across the probe support
    int preferred_shell(int N) const {
        int B = probe_bandwidth(N);
        return B > 0 ? int(std::ceil(std::log2(double(B)))) : 0;
    }
};

namespace detail {

// Probe cutoff centred on cell c: Jackson kernel with zeros at the other cell centres.
inline std::vector<cplx> cell_cutoff(int cells, int c, int power) {
    auto J = jackson_coeffs(cells, power);
    int B = int(J.size() / 2);
    double x = 2 * M_PI * c / cells;
    std::vector<cplx> out(J.size());
    for (int j = -B; j <= B; ++j) out[std::size_t(j + B)] = J[std::size_t(j + B)] * std::polar(1.0, -j * x);
    return out;
}

inline double conic(int k, int s, double r0) { return smoothstep((s * k - r0) / r0); }

// Finishes a probe profile from shell maxima of the localized field.
inline DecayProfile finish_profile(const ShellSet& sh, const std::vector<double>& m, const DecayProfile& ref,
                                   const Thresholds& th) {
    DecayProfile p;
    p.j = sh.j;
    p.excluded = sh.excluded;
    p.localized = m;
    p.reference = ref.reference;
    p.reference_smooth = ref.reference_smooth;
    p.reference_slope = ref.reference_slope;
    double rc = 0;
    for (double r : ref.reference) rc = std::max(rc, r);
    double qmax = 0;
    for (std::size_t i = 0; i < m.size(); ++i) {
        double r = ref.reference[i];
        double q = r > 0 ? m[i] / r : (rc > 0 ? m[i] / rc : 0.0);
        p.value.push_back(q);
        qmax = std::max(qmax, q);
    }
    // asymptotic level: the top two shells, away from the conic taper
    double tail = 0;
    for (std::size_t i = p.value.size() >= 2 ? p.value.size() - 2 : 0; i < p.value.size(); ++i) tail = std::max(tail, p.value[i]);
    p.negligible = qmax <= th.negligible || tail <= th.negligible;
    p.slope = fit_slope(p.j, p.value);
    if (!p.j.empty()) p.j_min = p.j.front(), p.j_max = p.j.back();
    return p;
}

// Unlocalized shell maxima; decides whether the whole cone is already smooth.
inline DecayProfile reference_profile(const CoeffField& u, const ShellSet& sh, const Thresholds& th) {
    DecayProfile p;
    double global = 0;
    for (int k1 = -u.safe1(); k1 <= u.safe1(); ++k1)
        for (int k2 = -u.safe2(); k2 <= u.safe2(); ++k2) global = std::max(global, std::abs(u.at(k1, k2)));
    double rmax = 0;
    for (auto& pts : sh.pts) {
        double r = 0;
        for (auto [k1, k2] : pts) r = std::max(r, std::abs(u.at(k1, k2)));
        p.reference.push_back(r);
        rmax = std::max(rmax, r);
    }
    p.reference_slope = fit_slope(sh.j, p.reference);
    p.reference_smooth = rmax <= 1e-12 * global || global == 0 || p.reference_slope <= th.reference;
    return p;
}

inline ProbeResult make_probe(std::string id, Flag where, DecayProfile prof, const Thresholds& th) {
    ProbeResult r;
    r.id = std::move(id);
    r.cls = classify(prof, th);
    r.margin = decision_margin(prof, th);
    where.slope = prof.reference_smooth || prof.negligible ? -kInf : prof.slope;
    r.where = where;
    r.profile = std::move(prof);
    return r;
}

inline void record(WFSet& w, ProbeResult r, bool keep) {
    if (r.cls == Cls::Singular) w.flags.push_back(r.where);
    if (r.cls == Cls::Indeterminate) w.indeterminate.push_back(r.where);
    if (keep) w.probes.push_back(std::move(r));
}

inline void check_shells(const ShellSet& sh, const DetectorConfig& cfg, const std::string& what) {
    if (int(sh.size()) < cfg.min_shells)
        throw InsufficientBand(what + ": " + std::to_string(sh.size()) + " usable shells, need " + std::to_string(cfg.min_shells));
}

inline std::string cell_str(int c) { return c == kAllCells ? std::string("all") : std::to_string(c); }

}  // namespace detail

// ---------------------------------------------------------------- probe engine

namespace detail {

// Labelled cones on the lattice: every point carries region*kMaxShells + shell or -1.
inline constexpr int kMaxShells = 40;

struct RegionSet {
    int N = 0, W = 0;
    std::vector<ShellSet> sh;
    std::vector<DecayProfile> ref;
    std::vector<int> label;
    std::vector<int> lo, hi;  // active k2 span per row (lo > hi: none)

    bool active() const {
        for (std::size_t r = 0; r < lo.size(); ++r)
            if (lo[r] <= hi[r]) return true;
        return false;
    }
};

inline RegionSet build_regions(const CoeffField& u, int b1, int b2, int j0, const std::vector<std::function<bool(int, int)>>& inside,
                               const std::function<double(int, int)>& radius, const DetectorConfig& cfg, const std::string& what) {
    RegionSet R;
    R.N = u.N();
    R.W = 2 * R.N + 1;
    R.label.assign(std::size_t(R.W) * std::size_t(R.W), -1);
    R.lo.assign(std::size_t(R.W), R.N + 1);
    R.hi.assign(std::size_t(R.W), -R.N - 1);
    for (std::size_t r = 0; r < inside.size(); ++r) {
        ShellSet sh = make_shells(b1, b2, j0, inside[r], radius);
        trim_below(sh, cfg.preferred_shell(R.N), cfg.min_shells);
        if (int(sh.size()) < cfg.min_shells)
            throw InsufficientBand(what + ": " + std::to_string(sh.size()) + " usable shells, need " + std::to_string(cfg.min_shells));
        DecayProfile ref = reference_profile(u, sh, cfg.th);
        if (!ref.reference_smooth)
            for (std::size_t i = 0; i < sh.size(); ++i)
                for (auto [k1, k2] : sh.pts[i]) {
                    std::size_t row = std::size_t(k1 + R.N);
                    R.label[row * std::size_t(R.W) + std::size_t(k2 + R.N)] = int(r) * kMaxShells + int(i);
                    R.lo[row] = std::min(R.lo[row], k2);
                    R.hi[row] = std::max(R.hi[row], k2);
                }
        R.sh.push_back(std::move(sh));
        R.ref.push_back(std::move(ref));
    }
    return R;
}

// Split-complex copy of the coefficient array.
struct Planes {
    int N = 0, W = 0;
    std::vector<double> re, im;
    explicit Planes(const CoeffField& u) : N(u.N()), W(u.width()), re(u.data().size()), im(u.data().size()) {
        for (std::size_t i = 0; i < u.data().size(); ++i) re[i] = u.data()[i].real(), im[i] = u.data()[i].imag();
    }
};

struct Taps {
    int B = 0;
    std::vector<double> re, im;  // j = -B..B
    explicit Taps(const std::vector<cplx>& c) : B(int(c.size() / 2)), re(c.size()), im(c.size()) {
        for (std::size_t i = 0; i < c.size(); ++i) re[i] = c[i].real(), im[i] = c[i].imag();
    }
};

// out[k2] = sum_j t_j psi(k1-j) u(k1-j, k2) for k2 in [lo, hi]; out indexed by k2 + off.
inline void localize_row(const Planes& u, const Taps& t, const std::vector<double>* psi, int k1, int lo, int hi, double* outr, double* outi,
                         int off) {
    const int N = u.N;
    for (int k2 = lo; k2 <= hi; ++k2) outr[k2 + off] = outi[k2 + off] = 0;
    for (int j = -t.B; j <= t.B; ++j) {
        int q = k1 - j;
        if (std::abs(q) > N) continue;
        double w = psi ? (*psi)[std::size_t(q + N)] : 1.0;
        if (w == 0) continue;
        const double cr = t.re[std::size_t(j + t.B)] * w, ci = t.im[std::size_t(j + t.B)] * w;
        const double* ur = &u.re[std::size_t(q + N) * std::size_t(u.W) + std::size_t(N)];
        const double* ui = &u.im[std::size_t(q + N) * std::size_t(u.W) + std::size_t(N)];
        double* orr = outr + off;
        double* oi = outi + off;
        for (int k2 = lo; k2 <= hi; ++k2) {
            orr[k2] += cr * ur[k2] - ci * ui[k2];
            oi[k2] += cr * ui[k2] + ci * ur[k2];
        }
    }
}

// out[k2] = sum_j t_j p(k2-j) for k2 in [lo, hi]; p indexed by k2 + poff with zero padding.
inline void convolve_row(const double* pr, const double* pi, int poff, const Taps& t, int lo, int hi, double* outr, double* outi) {
    for (int k2 = lo; k2 <= hi; ++k2) outr[k2 - lo] = outi[k2 - lo] = 0;
    for (int j = -t.B; j <= t.B; ++j) {
        const double cr = t.re[std::size_t(j + t.B)], ci = t.im[std::size_t(j + t.B)];
        const double* ar = pr + poff - j;
        const double* ai = pi + poff - j;
        for (int k2 = lo; k2 <= hi; ++k2) {
            outr[k2 - lo] += cr * ar[k2] - ci * ai[k2];
            outi[k2 - lo] += cr * ai[k2] + ci * ar[k2];
        }
    }
}

inline void update_max(const RegionSet& R, int k1, int lo, int hi, const double* outr, const double* outi, std::vector<double>& m2) {
    const int* lab = &R.label[std::size_t(k1 + R.N) * std::size_t(R.W) + std::size_t(R.N)];
    for (int k2 = lo; k2 <= hi; ++k2) {
        int l = lab[k2];
        if (l < 0) continue;
        double a = outr[k2 - lo] * outr[k2 - lo] + outi[k2 - lo] * outi[k2 - lo];
        if (a > m2[std::size_t(l)]) m2[std::size_t(l)] = a;
    }
}

inline std::vector<double> shell_max(const RegionSet& R, std::size_t r, const std::vector<double>& m2) {
    std::vector<double> m(R.sh[r].size());
    for (std::size_t i = 0; i < m.size(); ++i) m[i] = std::sqrt(m2[r * kMaxShells + i]);
    return m;
}

inline std::vector<Taps> cell_taps(int M, int power) {
    std::vector<Taps> t;
    for (int c = 0; c < M; ++c) t.emplace_back(cell_cutoff(M, c, power));
    return t;
}

inline std::vector<double> conic_table(int N, int s, double r0) {
    std::vector<double> v(std::size_t(2 * N + 1));
    for (int k = -N; k <= N; ++k) v[std::size_t(k + N)] = conic(k, s, r0);
    return v;
}

}  // namespace detail

// ---------------------------------------------------------------- component 1 and 2

// Factor-1 test: v = (chi_c(x1) psi_s(D1) (x) I) u, decay along k1 inside the axis cone
// |k2| <= tan(pi/4 - margin)|k1|, relative to the unlocalized field on the same shells.
inline WFSet detect_wf1(const CoeffField& u, const DetectorConfig& cfg = {}) {
    const int N = u.N(), M = cfg.cells_for(N), B = cfg.probe_bandwidth(N);
    WFSet w;
    w.component = Component::One;
    w.N = N, w.cells = M, w.thresholds = cfg.th;
    const double tau = std::tan(M_PI / 4 - cfg.margin);
    detail::Planes P(u);
    auto taps = detail::cell_taps(M, cfg.jackson_power);
    std::vector<double> orr(static_cast<std::size_t>(2 * N + 1)), oi(static_cast<std::size_t>(2 * N + 1));
    for (int s : {1, -1}) {
        auto R = detail::build_regions(
            u, u.safe1() - B, u.safe2(), cfg.first_shell(N), {[&](int k1, int k2) { return s * k1 > 0 && std::abs(k2) <= tau * std::abs(k1); }},
            [](int k1, int) { return double(std::abs(k1)); }, cfg, "detect_wf1");
        auto psi = detail::conic_table(N, s, cfg.r0);
        for (int c = 0; c < M; ++c) {
            std::vector<double> m2(std::size_t(detail::kMaxShells), 0.0);
            for (int k1 = -N; k1 <= N; ++k1) {
                int lo = R.lo[std::size_t(k1 + N)], hi = R.hi[std::size_t(k1 + N)];
                if (lo > hi) continue;
                detail::localize_row(P, taps[std::size_t(c)], &psi, k1, lo, hi, orr.data(), oi.data(), -lo);
                detail::update_max(R, k1, lo, hi, orr.data(), oi.data(), m2);
            }
            Flag f{c, kAllCells, axis_sector(1, s), 0};
            detail::record(w,
                           detail::make_probe("wf1:c" + std::to_string(c) + ":" + sector_name(f.sector), f,
                                              detail::finish_profile(R.sh[0], detail::shell_max(R, 0, m2), R.ref[0], cfg.th), cfg.th),
                           cfg.keep_probes);
        }
    }
    w.canonicalize();
    return w;
}

namespace detail {
inline Flag swap_flag(Flag f) {
    std::swap(f.c1, f.c2);
    f.sector = swap_sector(f.sector);
    return f;
}
inline WFSet swap_set(WFSet w, Component c) {
    w.component = c;
    for (auto& f : w.flags) f = swap_flag(f);
    for (auto& f : w.indeterminate) f = swap_flag(f);
    for (auto& p : w.probes) {
        p.where = swap_flag(p.where);
        p.id = "wf2:c" + cell_str(p.where.c2) + ":" + sector_name(p.where.sector);
    }
    w.canonicalize();
    return w;
}
}  // namespace detail

inline WFSet detect_wf2(const CoeffField& u, const DetectorConfig& cfg = {}) {
    return detail::swap_set(detect_wf1(u.swapped(), cfg), Component::Two);
}

// ---------------------------------------------------------------- component 12

namespace detail {

// Two-factor probe sweep: x1 localization by rows (with psi1), then per region set an
// x2 multiplier psi2 and convolution along k2. Calls emit(c1, c2, region set index, m2).
template <class Emit>
void sweep_pairs(const CoeffField& u, const std::vector<RegionSet>& sets, const std::vector<const std::vector<double>*>& psi2,
                 const std::vector<double>* psi1, const DetectorConfig& cfg, Emit&& emit) {
    const int N = u.N(), M = cfg.cells_for(N), B = cfg.probe_bandwidth(N), W = 2 * N + 1, Wp = W + 2 * B;
    Planes P(u);
    auto taps = cell_taps(M, cfg.jackson_power);
    bool any = false;
    int rlo = N + 1, rhi = -N - 1;  // rows touched
    for (auto& R : sets)
        for (int k1 = -N; k1 <= N; ++k1)
            if (R.lo[std::size_t(k1 + N)] <= R.hi[std::size_t(k1 + N)]) {
                any = true;
                rlo = std::min(rlo, k1);
                rhi = std::max(rhi, k1);
            }
    std::vector<double> ar(std::size_t(W) * std::size_t(Wp)), ai(ar.size());
    std::vector<std::vector<double>> pr(sets.size()), pi(sets.size());
    for (std::size_t g = 0; g < sets.size(); ++g) pr[g].assign(ar.size(), 0.0), pi[g].assign(ar.size(), 0.0);
    std::vector<double> orr(static_cast<std::size_t>(2 * N + 1)), oi(static_cast<std::size_t>(2 * N + 1));
    for (int c1 = 0; c1 < M; ++c1) {
        if (any)
            for (int k1 = rlo; k1 <= rhi; ++k1) {
                double* rr = &ar[std::size_t(k1 + N) * std::size_t(Wp)];
                double* ri = &ai[std::size_t(k1 + N) * std::size_t(Wp)];
                localize_row(P, taps[std::size_t(c1)], psi1, k1, -N, N, rr, ri, N + B);
                for (std::size_t g = 0; g < sets.size(); ++g) {
                    double* qr = &pr[g][std::size_t(k1 + N) * std::size_t(Wp)];
                    double* qi = &pi[g][std::size_t(k1 + N) * std::size_t(Wp)];
                    for (int k2 = -N; k2 <= N; ++k2) {
                        double wgt = psi2[g] ? (*psi2[g])[std::size_t(k2 + N)] : 1.0;
                        qr[k2 + N + B] = rr[k2 + N + B] * wgt;
                        qi[k2 + N + B] = ri[k2 + N + B] * wgt;
                    }
                }
            }
        for (int c2 = 0; c2 < M; ++c2)
            for (std::size_t g = 0; g < sets.size(); ++g) {
                const RegionSet& R = sets[g];
                std::vector<double> m2(R.sh.size() * std::size_t(kMaxShells), 0.0);
                if (any)
                    for (int k1 = rlo; k1 <= rhi; ++k1) {
                        int lo = R.lo[std::size_t(k1 + N)], hi = R.hi[std::size_t(k1 + N)];
                        if (lo > hi) continue;
                        convolve_row(&pr[g][std::size_t(k1 + N) * std::size_t(Wp)], &pi[g][std::size_t(k1 + N) * std::size_t(Wp)], N + B,
                                     taps[std::size_t(c2)], lo, hi, orr.data(), oi.data());
                        update_max(R, k1, lo, hi, orr.data(), oi.data(), m2);
                    }
                emit(c1, c2, g, m2);
            }
    }
}

}  // namespace detail

// Relaxed: rapid decay of (A1 (x) A2)u over the quadrant cone (margin from both axes).
inline WFSet detect_wf12_relaxed(const CoeffField& u, const DetectorConfig& cfg = {}) {
    const int N = u.N(), M = cfg.cells_for(N), B = cfg.probe_bandwidth(N);
    WFSet w;
    w.component = Component::Twelve;
    w.mode = Mode::Relaxed;
    w.N = N, w.cells = M, w.thresholds = cfg.th;
    auto psi_p = detail::conic_table(N, 1, cfg.r0), psi_m = detail::conic_table(N, -1, cfg.r0);
    for (int s1 : {1, -1}) {
        std::vector<detail::RegionSet> sets;
        for (int s2 : {1, -1})
            sets.push_back(detail::build_regions(
                u, u.safe1() - B, u.safe2() - B, cfg.first_shell(N),
                {[&, s2](int k1, int k2) {
                    if (s1 * k1 <= 0 || s2 * k2 <= 0) return false;
                    double th = std::atan2(double(std::abs(k2)), double(std::abs(k1)));
                    return th >= cfg.margin && th <= M_PI / 2 - cfg.margin;
                }},
                [](int k1, int k2) { return std::hypot(double(k1), double(k2)); }, cfg, "detect_wf12"));
        std::vector<ProbeResult> out;
        detail::sweep_pairs(u, sets, {&psi_p, &psi_m}, s1 > 0 ? &psi_p : &psi_m, cfg,
                            [&](int c1, int c2, std::size_t g, const std::vector<double>& m2) {
                                Flag f{c1, c2, quadrant_sector(s1, g == 0 ? 1 : -1), 0};
                                out.push_back(detail::make_probe(
                                    "wf12:c" + std::to_string(c1) + "," + std::to_string(c2) + ":" + sector_name(f.sector), f,
                                    detail::finish_profile(sets[g].sh[0], detail::shell_max(sets[g], 0, m2), sets[g].ref[0], cfg.th), cfg.th));
                            });
        for (auto& p : out) detail::record(w, std::move(p), cfg.keep_probes);
    }
    w.canonicalize();
    return w;
}

// Strict: quadrant decay failure or failure of either mixed-smoothness test at the probe's localizers.
inline WFSet strict_from(const WFSet& relaxed, const WFSet& wf1, const WFSet& wf2) {
    WFSet w = relaxed;
    w.mode = Mode::Strict;
    const int M = relaxed.cells;
    auto spread = [&](const std::vector<Flag>& src, std::vector<Flag>& dst, int factor) {
        for (auto& f : src) {
            int s = (factor == 1 ? f.sector == Axis1Pos : f.sector == Axis2Pos) ? 1 : -1;
            for (int other = 0; other < M; ++other)
                for (int t : {1, -1}) {
                    Flag g;
                    g.c1 = factor == 1 ? f.c1 : other;
                    g.c2 = factor == 1 ? other : f.c2;
                    g.sector = factor == 1 ? quadrant_sector(s, t) : quadrant_sector(t, s);
                    g.slope = f.slope;
                    dst.push_back(g);
                }
        }
    };
    spread(wf1.flags, w.flags, 1);
    spread(wf2.flags, w.flags, 2);
    spread(wf1.indeterminate, w.indeterminate, 1);
    spread(wf2.indeterminate, w.indeterminate, 2);
    // keep the first slope seen for duplicates, then drop indeterminate entries already flagged
    std::stable_sort(w.flags.begin(), w.flags.end());
    w.flags.erase(std::unique(w.flags.begin(), w.flags.end()), w.flags.end());
    std::vector<Flag> ind;
    for (auto& f : w.indeterminate)
        if (!std::binary_search(w.flags.begin(), w.flags.end(), f)) ind.push_back(f);
    w.indeterminate = ind;
    for (auto& p : wf1.probes) w.probes.push_back(p);
    for (auto& p : wf2.probes) w.probes.push_back(p);
    w.canonicalize();
    return w;
}

inline WFSet detect_wf12(const CoeffField& u, Mode mode, const DetectorConfig& cfg = {}) {
    WFSet r = detect_wf12_relaxed(u, cfg);
    if (mode == Mode::Relaxed) return r;
    return strict_from(r, detect_wf1(u, cfg), detect_wf2(u, cfg));
}

// ---------------------------------------------------------------- classical

// Tensor cutoff at (c1, c2), decay over each of 8 direction sectors of half-width pi/8.
inline WFSet detect_wf_cl(const CoeffField& u, const DetectorConfig& cfg = {}) {
    const int N = u.N(), M = cfg.cells_for(N), B = cfg.probe_bandwidth(N);
    WFSet w;
    w.component = Component::Cl;
    w.N = N, w.cells = M, w.thresholds = cfg.th;
    std::vector<std::function<bool(int, int)>> sectors;
    for (int s = 0; s < 8; ++s)
        sectors.push_back([s](int k1, int k2) {
            if (k1 == 0 && k2 == 0) return false;
            double d = std::remainder(std::atan2(double(k2), double(k1)) - s * M_PI / 4, 2 * M_PI);
            return d >= -M_PI / 8 && d < M_PI / 8;
        });
    std::vector<detail::RegionSet> sets{detail::build_regions(u, u.safe1() - B, u.safe2() - B, cfg.first_shell(N), sectors,
                                                              [](int k1, int k2) { return std::hypot(double(k1), double(k2)); }, cfg,
                                                              "detect_wf_cl")};
    const auto& R = sets[0];
    detail::sweep_pairs(u, sets, {nullptr}, nullptr, cfg, [&](int c1, int c2, std::size_t, const std::vector<double>& m2) {
        for (int s = 0; s < 8; ++s) {
            Flag f{c1, c2, s, 0};
            detail::record(w,
                           detail::make_probe("cl:c" + std::to_string(c1) + "," + std::to_string(c2) + ":" + sector_name(s), f,
                                              detail::finish_profile(R.sh[std::size_t(s)], detail::shell_max(R, std::size_t(s), m2),
                                                                     R.ref[std::size_t(s)], cfg.th),
                                              cfg.th),
                           cfg.keep_probes);
        }
    });
    w.canonicalize();
    return w;
}

// One-variable classical detector; flags carry c1 = cell, sector = axis1 +-.
inline WFSet detect_wf_cl_1d(const Field1D& f, const DetectorConfig& cfg = {}) {
    const int N = f.N, M = cfg.cells_for(N), B = cfg.probe_bandwidth(N);
    WFSet w;
    w.component = Component::Cl1D;
    w.N = N, w.cells = M, w.thresholds = cfg.th;
    CoeffField as2(N);  // f (x) delta-free embedding: row k2 = 0
    for (int k = -N; k <= N; ++k) as2.at(k, 0) = f.at(k);
    for (int s : {1, -1}) {
        ShellSet sh = make_shells(N - B, 0, cfg.first_shell(N), [&](int k1, int) { return s * k1 > 0; },
                                  [](int k1, int) { return double(std::abs(k1)); });
        trim_below(sh, cfg.preferred_shell(N), cfg.min_shells);
        detail::check_shells(sh, cfg, "detect_wf_cl_1d");
        DecayProfile ref = detail::reference_profile(as2, sh, cfg.th);
        for (int c = 0; c < M; ++c) {
            auto cut = detail::cell_cutoff(M, c, cfg.jackson_power);
            std::vector<double> m(sh.size(), 0.0);
            if (!ref.reference_smooth)
                for (std::size_t i = 0; i < sh.size(); ++i)
                    for (auto [k1, k2] : sh.pts[i]) {
                        cplx acc = 0;
                        for (int j = -B; j <= B; ++j) acc += detail::cmul(cut[std::size_t(j + B)], f.at(k1 - j));
                        m[i] = std::max(m[i], std::abs(acc));
                    }
            Flag fl{c, kAllCells, axis_sector(1, s), 0};
            detail::record(w, detail::make_probe("cl1d:c" + std::to_string(c) + ":" + sector_name(fl.sector), fl,
                                                 detail::finish_profile(sh, m, ref, cfg.th), cfg.th),
                           cfg.keep_probes);
        }
    }
    w.canonicalize();
    return w;
}

// ---------------------------------------------------------------- derived sets

// Axis flags are spread over every cell of the other factor; quadrant flags kept.
inline WFSet tilde_wf_transform(const WFSet& cl) {
    if (cl.component != Component::Cl) throw std::invalid_argument("tilde_wf_transform expects a classical set");
    WFSet w = cl;
    w.component = Component::Tilde;
    w.probes.clear();
    auto spread = [&](const std::vector<Flag>& src) {
        std::vector<Flag> out;
        for (auto f : src) {
            if (is_quadrant(f.sector)) {
                out.push_back(f);
                continue;
            }
            bool axis1 = f.sector == Axis1Pos || f.sector == Axis1Neg;
            for (int c = 0; c < cl.cells; ++c) {
                Flag g = f;
                (axis1 ? g.c2 : g.c1) = c;
                out.push_back(g);
            }
        }
        return out;
    };
    w.flags = spread(cl.flags);
    w.indeterminate = spread(cl.indeterminate);
    w.canonicalize();
    return w;
}

// Cells of the probe grid whose arc meets a support arc.
inline std::vector<int> cells_meeting(const std::vector<Arc>& arcs, int cells) {
    std::vector<int> out;
    const double h = 2 * M_PI / cells;
    for (int c = 0; c < cells; ++c) {
        double lo = c * h - h / 2, hi = c * h + h / 2;
        for (auto a : arcs) {
            bool hit = false;
            for (int wrap = -2; wrap <= 2 && !hit; ++wrap) {
                double alo = a.lo + 2 * M_PI * wrap, ahi = a.hi + 2 * M_PI * wrap;
                hit = alo < hi && ahi >= lo;
            }
            if (hit) {
                out.push_back(c);
                break;
            }
        }
    }
    return out;
}

// Predicted superset for WF_cl(u (x) v) from the factor sets and supports.
inline WFSet tensor_wf_bound(const WFSet& wf_u, const WFSet& wf_v, const std::vector<int>& supp_u, const std::vector<int>& supp_v) {
    WFSet w;
    w.component = Component::Cl;
    w.N = wf_u.N;
    w.cells = wf_u.cells;
    w.thresholds = wf_u.thresholds;
    auto sign = [](const Flag& f) { return f.sector == Axis1Pos ? 1 : -1; };
    for (auto& a : wf_u.flags)
        for (auto& b : wf_v.flags) w.flags.push_back({a.c1, b.c1, quadrant_sector(sign(a), sign(b)), 0});
    for (int c : supp_u)
        for (auto& b : wf_v.flags) w.flags.push_back({c, b.c1, axis_sector(2, sign(b)), 0});
    for (auto& a : wf_u.flags)
        for (int c : supp_v) w.flags.push_back({a.c1, c, axis_sector(1, sign(a)), 0});
    w.canonicalize();
    return w;
}

// ---------------------------------------------------------------- comparisons

inline bool cells_close(int a, int b, int cells, int dil) {
    if (a == kAllCells || b == kAllCells) return true;
    int d = std::abs(a - b) % cells;
    return std::min(d, cells - d) <= dil;
}

// Every flag of a has a flag of b in the same sector within dil cells per factor.
inline bool flags_subset(const std::vector<Flag>& a, const std::vector<Flag>& b, int cells, int dil = 1) {
    for (auto& f : a) {
        bool ok = false;
        for (auto& g : b)
            if (g.sector == f.sector && cells_close(f.c1, g.c1, cells, dil) && cells_close(f.c2, g.c2, cells, dil)) {
                ok = true;
                break;
            }
        if (!ok) return false;
    }
    return true;
}

inline bool flags_equal(const std::vector<Flag>& a, const std::vector<Flag>& b, int cells, int dil = 1) {
    return flags_subset(a, b, cells, dil) && flags_subset(b, a, cells, dil);
}

inline std::vector<Flag> swap_flags(const std::vector<Flag>& v) {
    std::vector<Flag> r;
    for (auto& f : v) r.push_back(detail::swap_flag(f));
    std::sort(r.begin(), r.end());
    return r;
}

// ---------------------------------------------------------------- full report

struct WFReport {
    Mode mode = Mode::Relaxed;
    WFSet wf1, wf2, wf12_relaxed, wf12_strict;

    const WFSet& wf12() const { return mode == Mode::Strict ? wf12_strict : wf12_relaxed; }
    WFReport with_mode(Mode m) const {
        WFReport r = *this;
        r.mode = m;
        return r;
    }
    bool empty() const { return wf1.empty() && wf2.empty() && wf12().empty(); }
    bool has_indeterminate() const { return wf1.has_indeterminate() || wf2.has_indeterminate() || wf12().has_indeterminate(); }
};

inline WFReport wf_bi(const CoeffField& u, Mode mode, const DetectorConfig& cfg = {}) {
    WFReport r;
    r.mode = mode;
    r.wf1 = detect_wf1(u, cfg);
    r.wf2 = detect_wf2(u, cfg);
    r.wf12_relaxed = detect_wf12_relaxed(u, cfg);
    r.wf12_strict = strict_from(r.wf12_relaxed, r.wf1, r.wf2);
    return r;
}

// ---------------------------------------------------------------- output

inline std::string format_e(double v) {
    if (std::isinf(v)) return v < 0 ? "-inf" : "inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6e", v);
    return buf;
}

inline nlohmann::ordered_json flag_json(const Flag& f) {
    nlohmann::ordered_json j;
    j["x1_cell"] = f.c1 == kAllCells ? nlohmann::ordered_json("all") : nlohmann::ordered_json(f.c1);
    j["x2_cell"] = f.c2 == kAllCells ? nlohmann::ordered_json("all") : nlohmann::ordered_json(f.c2);
    j["sector"] = sector_name(f.sector);
    j["slope"] = format_e(f.slope);
    return j;
}

inline nlohmann::ordered_json to_json(const WFSet& w) {
    nlohmann::ordered_json j;
    j["component"] = component_name(w.component);
    j["mode"] = mode_name(w.mode);
    j["N"] = w.N;
    j["cells"] = w.cells;
    j["thresholds"] = {{"smooth", w.thresholds.smooth}, {"singular", w.thresholds.singular}};
    j["flags"] = nlohmann::ordered_json::array();
    for (auto& f : w.flags) j["flags"].push_back(flag_json(f));
    j["indeterminate"] = nlohmann::ordered_json::array();
    for (auto& f : w.indeterminate) j["indeterminate"].push_back(flag_json(f));
    return j;
}

inline nlohmann::ordered_json to_json(const WFReport& r) {
    nlohmann::ordered_json j;
    j["schema"] = "wfreport/1";
    j["mode"] = mode_name(r.mode);
    j["empty"] = r.empty();
    j["components"] = {to_json(r.wf1), to_json(r.wf2), to_json(r.wf12())};
    return j;
}

// probe_id,shell_j,log2_max
inline std::string decay_csv(const std::vector<const WFSet*>& sets) {
    std::ostringstream os;
    os << "probe_id,shell_j,log2_max\n";
    for (auto* w : sets)
        for (auto& p : w->probes) {
            auto lg = p.profile.log2_values();
            for (std::size_t i = 0; i < p.profile.j.size(); ++i) os << p.id << "," << p.profile.j[i] << "," << format_e(lg[i]) << "\n";
        }
    return os.str();
}

}  // namespace bisingular
