#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "calculus.hpp"
#include "parser.hpp"
#include "torus_fields.hpp"
#include "wavefront.hpp"

namespace bisingular {

enum class Verdict { Pass, Fail, Indeterminate, Inapplicable };

inline const char* verdict_name(Verdict v) {
    switch (v) {
        case Verdict::Pass: return "pass";
        case Verdict::Fail: return "fail";
        case Verdict::Indeterminate: return "indeterminate";
        default: return "inapplicable";
    }
}

// Pass and fail are definite; indeterminate beats pass; fail beats everything.
inline Verdict combine(Verdict a, Verdict b) {
    if (a == Verdict::Fail || b == Verdict::Fail) return Verdict::Fail;
    if (a == Verdict::Indeterminate || b == Verdict::Indeterminate) return Verdict::Indeterminate;
    if (a == Verdict::Inapplicable || b == Verdict::Inapplicable) return Verdict::Inapplicable;
    return Verdict::Pass;
}
inline Verdict from_bool(bool ok) { return ok ? Verdict::Pass : Verdict::Fail; }

struct VerificationReport {
    std::string name;
    std::string relation;
    Verdict verdict = Verdict::Pass;
    nlohmann::ordered_json computed = nlohmann::ordered_json::object();
    nlohmann::ordered_json diagnostics = nlohmann::ordered_json::object();

    bool passed() const { return verdict == Verdict::Pass; }
};

struct VerifyConfig {
    int N = 256;
    std::uint64_t seed = 1;
    int dilation = 1;
    DetectorConfig det;
};

// ---------------------------------------------------------------- set relations with indeterminacy

inline std::vector<Flag> with_indeterminate(const WFSet& w) {
    std::vector<Flag> v = w.flags;
    v.insert(v.end(), w.indeterminate.begin(), w.indeterminate.end());
    return v;
}

// a subset of b: definite when the answer does not depend on any indeterminate probe.
inline Verdict subset_verdict(const WFSet& a, const WFSet& b, int cells, int dil) {
    if (flags_subset(with_indeterminate(a), b.flags, cells, dil)) return Verdict::Pass;
    if (!flags_subset(a.flags, with_indeterminate(b), cells, dil)) return Verdict::Fail;
    return Verdict::Indeterminate;
}

inline Verdict equal_verdict(const WFSet& a, const WFSet& b, int cells, int dil) {
    return combine(subset_verdict(a, b, cells, dil), subset_verdict(b, a, cells, dil));
}

inline Verdict empty_verdict(const WFSet& a, bool want_empty) {
    if (!a.flags.empty()) return from_bool(!want_empty);
    if (a.has_indeterminate()) return Verdict::Indeterminate;
    return from_bool(want_empty);
}

inline nlohmann::ordered_json summary_json(const WFReport& r) {
    nlohmann::ordered_json j;
    auto one = [](const WFSet& w) {
        nlohmann::ordered_json c;
        c["flags"] = w.flags.size();
        c["indeterminate"] = w.indeterminate.size();
        return c;
    };
    j["wf1"] = one(r.wf1);
    j["wf2"] = one(r.wf2);
    j["wf12"] = one(r.wf12());
    return j;
}

// ---------------------------------------------------------------- session with caching

// Holds synthesized fields and their detections so sweeps reuse work.
class Session {
public:
    explicit Session(VerifyConfig cfg = {}) : cfg_(cfg) {}
    const VerifyConfig& config() const { return cfg_; }
    int cells() const { return cfg_.det.cells_for(cfg_.N); }

    const CoeffField& field(const std::string& dist) {
        auto it = fields_.find(dist);
        if (it != fields_.end()) return it->second;
        return fields_.emplace(dist, synthesize(dist, cfg_.N, cfg_.seed)).first->second;
    }
    const CoeffField& applied(const std::string& op, const std::string& dist) {
        std::string key = op + "\x1f" + dist;
        auto it = fields_.find(key);
        if (it != fields_.end()) return it->second;
        return fields_.emplace(key, apply_operator(parse_symbol(op), field(dist))).first->second;
    }
    // mode-independent detections; the report is returned in the requested mode
    WFReport wf(const std::string& key_or_dist, const CoeffField& u, Mode mode) {
        auto it = wf_.find(key_or_dist);
        if (it == wf_.end()) it = wf_.emplace(key_or_dist, wf_bi(u, Mode::Relaxed, cfg_.det)).first;
        return it->second.with_mode(mode);
    }
    WFReport wf_of(const std::string& dist, Mode mode) { return wf(dist, field(dist), mode); }
    WFReport wf_applied(const std::string& op, const std::string& dist, Mode mode) {
        return wf(op + "\x1f" + dist, applied(op, dist), mode);
    }

private:
    VerifyConfig cfg_;
    std::map<std::string, CoeffField> fields_;
    std::map<std::string, WFReport> wf_;
};

// ---------------------------------------------------------------- checks

// WF_bi(Cu) within WF_bi(u), componentwise, up to dilation.
inline VerificationReport check_microlocality(Session& s, const std::string& op, const std::string& dist, Mode mode) {
    VerificationReport r;
    r.name = "microlocality";
    r.relation = "WF_bi(Cu) ⊆ WF_bi(u)";
    const int M = s.cells(), d = s.config().dilation;
    WFReport wu = s.wf_of(dist, mode);
    WFReport wc = s.wf_applied(op, dist, mode);
    Verdict v1 = subset_verdict(wc.wf1, wu.wf1, M, d), v2 = subset_verdict(wc.wf2, wu.wf2, M, d),
            v12 = subset_verdict(wc.wf12(), wu.wf12(), M, d);
    r.verdict = combine(combine(v1, v2), v12);
    r.computed["u"] = summary_json(wu);
    r.computed["Cu"] = summary_json(wc);
    r.diagnostics["components"] = {{"1", verdict_name(v1)}, {"2", verdict_name(v2)}, {"12", verdict_name(v12)}};
    return r;
}

namespace detail {

// Characteristic region of one component as detector flags on the probe grid.
inline std::vector<Flag> char_flags(const Region& reg, int component, int cells) {
    std::vector<Flag> out;
    auto axis = [&](int s) { return axis_sector(component, s); };
    if (reg.kind == Region::Kind::Empty) return out;
    if (reg.kind == Region::Kind::Full) {
        for (int c = 0; c < cells; ++c)
            for (int s : {1, -1}) {
                if (component == 1) out.push_back({c, kAllCells, axis(s), 0});
                if (component == 2) out.push_back({kAllCells, c, axis(s), 0});
                if (component == 12)
                    for (int c2 = 0; c2 < cells; ++c2)
                        for (int t : {1, -1}) out.push_back({c, c2, quadrant_sector(s, t), 0});
            }
        return out;
    }
    for (auto& f : reg.flags) {
        if (component == 1) out.push_back({f.c1, kAllCells, axis(f.s1), 0});
        else if (component == 2) out.push_back({kAllCells, f.c2, axis(f.s2), 0});
        else out.push_back({f.c1, f.c2, quadrant_sector(f.s1, f.s2), 0});
    }
    return out;
}

}  // namespace detail

// WF^i(u) within Char^i(C) ∪ WF^i(Cu).
inline VerificationReport check_microellipticity(Session& s, const std::string& op, const std::string& dist, int i, Mode mode) {
    VerificationReport r;
    r.name = "microellipticity";
    r.relation = "WF^" + std::to_string(i) + "(u) ⊆ Char^" + std::to_string(i) + "(C) ∪ WF^" + std::to_string(i) + "(Cu)";
    const int M = s.cells(), d = s.config().dilation;
    EllipticityConfig ec;
    ec.cells = M;
    CharReport ch = char_sets(parse_symbol(op), ec);
    const Region& reg = i == 1 ? ch.char1 : (i == 2 ? ch.char2 : ch.char12);
    WFReport wu = s.wf_of(dist, mode), wc = s.wf_applied(op, dist, mode);
    const WFSet& a = i == 1 ? wu.wf1 : (i == 2 ? wu.wf2 : wu.wf12());
    WFSet b = i == 1 ? wc.wf1 : (i == 2 ? wc.wf2 : wc.wf12());
    auto cf = detail::char_flags(reg, i, M);
    b.flags.insert(b.flags.end(), cf.begin(), cf.end());
    b.canonicalize();
    r.verdict = subset_verdict(a, b, M, d);
    r.computed["char"] = region_label(reg, i);
    r.computed["wf_u"] = a.flags.size();
    r.computed["wf_Cu"] = (i == 1 ? wc.wf1 : (i == 2 ? wc.wf2 : wc.wf12())).flags.size();
    return r;
}

// C = ξ1²ξ2², u = δ⊗1 + 1⊗δ: Char¹²(C) = ∅ and Cu = 0, yet WF¹²(u) ≠ ∅ (strict).
inline VerificationReport check_no_full_microellipticity(Session& s, Mode mode) {
    const std::string op = "(* (sq xi1) (sq xi2))", dist = "sum (tensor delta one) (tensor one delta)";
    VerificationReport r;
    r.name = "no_full_microellipticity";
    r.relation = "Char¹²(C) = ∅, Cu = 0, WF¹²(u) ≠ ∅";
    EllipticityConfig ec;
    ec.cells = s.cells();
    CharReport ch = char_sets(parse_symbol(op), ec);
    const CoeffField& cu = s.applied(op, dist);
    bool zero = cu.is_zero();
    WFReport wu = s.wf_of(dist, mode);
    bool char_empty = ch.char12.kind == Region::Kind::Empty;
    r.computed["char12_empty"] = char_empty;
    r.computed["Cu_zero"] = zero;
    r.computed["wf12_u_flags"] = wu.wf12().flags.size();
    if (!char_empty || !zero) {
        r.verdict = Verdict::Fail;
        return r;
    }
    if (mode == Mode::Relaxed) {
        // the relaxed component only tests the joint condition and sees nothing here
        r.verdict = wu.wf12().empty() && !wu.wf12().has_indeterminate() ? Verdict::Inapplicable : Verdict::Fail;
        return r;
    }
    r.verdict = empty_verdict(wu.wf12(), false);
    return r;
}

// WF_bi(Au) = WF_bi(u) and the same for the modified classical set.
inline VerificationReport check_bielliptic_invariance(Session& s, const std::string& op, const std::string& dist, Mode mode,
                                                      bool with_tilde = true) {
    VerificationReport r;
    r.name = "bielliptic_invariance";
    r.relation = "WF_bi(Au) = WF_bi(u)";
    const int M = s.cells(), d = s.config().dilation;
    if (!is_bielliptic(parse_symbol(op)).bielliptic()) {
        r.verdict = Verdict::Inapplicable;
        r.diagnostics["reason"] = "operator is not bi-elliptic";
        return r;
    }
    WFReport wu = s.wf_of(dist, mode), wa = s.wf_applied(op, dist, mode);
    Verdict v = combine(combine(equal_verdict(wa.wf1, wu.wf1, M, d), equal_verdict(wa.wf2, wu.wf2, M, d)),
                        equal_verdict(wa.wf12(), wu.wf12(), M, d));
    r.computed["u"] = summary_json(wu);
    r.computed["Au"] = summary_json(wa);
    if (with_tilde) {
        WFSet tu = tilde_wf_transform(detect_wf_cl(s.field(dist), s.config().det));
        WFSet ta = tilde_wf_transform(detect_wf_cl(s.applied(op, dist), s.config().det));
        Verdict vt = equal_verdict(ta, tu, M, d);
        r.diagnostics["tilde"] = verdict_name(vt);
        v = combine(v, vt);
    }
    r.verdict = v;
    return r;
}

struct Membership {
    bool smooth_in_x1;  // u in C^∞(Ω₁, D′(Ω₂))
    bool smooth_in_x2;  // u in C^∞(Ω₂, D′(Ω₁))
    bool smooth;        // u in C^∞(Ω₁×Ω₂)
};

// Emptiness of WF¹, WF², WF_bi against known membership.
inline VerificationReport check_regularity_equivalences(Session& s, const std::string& dist, Membership known, Mode mode) {
    VerificationReport r;
    r.name = "regularity_equivalences";
    r.relation = "WF¹ = ∅ ⇔ C^∞(Ω₁,D′), WF² = ∅ ⇔ C^∞(Ω₂,D′), WF_bi = ∅ ⇔ C^∞";
    WFReport w = s.wf_of(dist, mode);
    Verdict v1 = empty_verdict(w.wf1, known.smooth_in_x1);
    Verdict v2 = empty_verdict(w.wf2, known.smooth_in_x2);
    Verdict vf;
    if (!w.wf1.empty() || !w.wf2.empty() || !w.wf12().empty()) vf = from_bool(!known.smooth);
    else if (w.has_indeterminate()) vf = Verdict::Indeterminate;
    else vf = from_bool(known.smooth);
    r.verdict = combine(combine(v1, v2), vf);
    r.computed = summary_json(w);
    r.diagnostics["components"] = {{"1", verdict_name(v1)}, {"2", verdict_name(v2)}, {"full", verdict_name(vf)}};
    return r;
}

// ---------------------------------------------------------------- scenario files

// Scenario fields: name, kind, operator, input, mode, factor, expect, allow_indeterminate.
inline int cell_of(const nlohmann::json& x, int cells) {
    if (x.is_string() && x.get<std::string>() == "all") return kAllCells;
    double v = x.get<double>();
    double h = 2 * M_PI / cells;
    int c = int(std::lround(v / h)) % cells;
    return c < 0 ? c + cells : c;
}

inline VerificationReport run_scenario(Session& s, const nlohmann::json& sc, const std::string& base_dir = "") {
    const std::string kind = sc.at("kind");
    Mode mode = mode_from_name(sc.value("mode", std::string("relaxed")));
    const std::string op = sc.value("operator", std::string("1"));
    const std::string dist = sc.value("input", std::string("smooth"));
    VerificationReport r;
    if (kind == "microlocality") r = check_microlocality(s, op, dist, mode);
    else if (kind == "microellipticity") r = check_microellipticity(s, op, dist, sc.value("factor", 1), mode);
    else if (kind == "no_full_microellipticity") r = check_no_full_microellipticity(s, mode);
    else if (kind == "bielliptic_invariance") r = check_bielliptic_invariance(s, op, dist, mode, sc.value("tilde", true));
    else if (kind == "regularity") {
        auto e = sc.at("expect");
        r = check_regularity_equivalences(s, dist, {e.at("smooth_in_x1"), e.at("smooth_in_x2"), e.at("smooth")}, mode);
    } else if (kind == "wf_expect") {
        // explicit flag set (positions in x, mapped to cells) or emptiness for one component
        r.name = "wf_expect";
        const auto& e = sc.at("expect");
        std::string comp = e.at("component");
        WFReport w = sc.contains("operator") ? s.wf_applied(op, dist, mode) : s.wf_of(dist, mode);
        WFSet got;
        if (comp == "1") got = w.wf1;
        else if (comp == "2") got = w.wf2;
        else if (comp == "12") got = w.wf12();
        else if (comp == "cl") got = detect_wf_cl(sc.contains("operator") ? s.applied(op, dist) : s.field(dist), s.config().det);
        else throw std::invalid_argument("unknown component " + comp);
        r.relation = "WF^" + comp + " matches expectation";
        if (e.contains("empty")) {
            r.verdict = empty_verdict(got, e.at("empty").get<bool>());
        } else {
            WFSet want = got;
            want.flags.clear();
            want.indeterminate.clear();
            for (auto& f : e.at("flags")) want.flags.push_back({cell_of(f.at("x1"), s.cells()), cell_of(f.at("x2"), s.cells()),
                                                                sector_from_name(f.at("sector")), 0});
            want.canonicalize();
            r.verdict = equal_verdict(got, want, s.cells(), s.config().dilation);
        }
        r.computed["flags"] = got.flags.size();
        r.computed["indeterminate"] = got.indeterminate.size();
    } else if (kind == "tables") {
        r.name = "tables";
        r.relation = "table output equals golden file";
        std::string which = sc.at("table");
        CharReading reading = sc.value("reading", std::string("A")) == "B" ? CharReading::B : CharReading::A;
        std::string got = which == "1" ? table1_markdown() : table2_markdown(reading);
        std::string path = sc.at("golden");
        if (!base_dir.empty() && !path.empty() && path[0] != '/') path = base_dir + "/" + path;
        std::ifstream in(path);
        if (!in) {
            r.verdict = Verdict::Fail;
            r.diagnostics["error"] = "cannot read " + path;
        } else {
            std::stringstream want;
            want << in.rdbuf();
            r.verdict = from_bool(got == want.str());
        }
    } else {
        throw std::invalid_argument("unknown scenario kind " + kind);
    }
    if (sc.contains("name")) r.name = sc.at("name");
    if (r.verdict == Verdict::Indeterminate && sc.value("allow_indeterminate", false)) r.diagnostics["documented_indeterminate"] = true;
    return r;
}

struct SuiteSummary {
    std::vector<VerificationReport> reports;
    int pass = 0, fail = 0, indeterminate = 0, inapplicable = 0;

    // nonzero on any fail, or on an indeterminate not documented in the scenario
    int exit_code() const {
        for (auto& r : reports) {
            if (r.verdict == Verdict::Fail) return 1;
            if (r.verdict == Verdict::Indeterminate && !r.diagnostics.contains("documented_indeterminate")) return 1;
        }
        return 0;
    }

    nlohmann::ordered_json to_json(const VerifyConfig& cfg) const {
        nlohmann::ordered_json j;
        j["schema"] = "suite-summary/1";
        j["N"] = cfg.N;
        j["seed"] = cfg.seed;
        j["counts"] = {{"pass", pass}, {"fail", fail}, {"indeterminate", indeterminate}, {"inapplicable", inapplicable}};
        j["results"] = nlohmann::ordered_json::array();
        for (auto& r : reports) {
            nlohmann::ordered_json e;
            e["name"] = r.name;
            e["relation"] = r.relation;
            e["verdict"] = verdict_name(r.verdict);
            e["computed"] = r.computed;
            e["diagnostics"] = r.diagnostics;
            j["results"].push_back(e);
        }
        return j;
    }

    std::string table() const {
        std::ostringstream os;
        for (auto& r : reports) os << verdict_name(r.verdict) << "\t" << r.name << "\n";
        return os.str();
    }
};

// Scenario list: a JSON array, or an object with a "scenarios" array.
inline SuiteSummary run_suite(const nlohmann::json& suite, const VerifyConfig& cfg, const std::string& base_dir = "") {
    Session s(cfg);
    const nlohmann::json& list = suite.is_array() ? suite : suite.at("scenarios");
    SuiteSummary sum;
    for (auto& sc : list) {
        VerificationReport r = run_scenario(s, sc, base_dir);
        switch (r.verdict) {
            case Verdict::Pass: ++sum.pass; break;
            case Verdict::Fail: ++sum.fail; break;
            case Verdict::Indeterminate: ++sum.indeterminate; break;
            default: ++sum.inapplicable;
        }
        sum.reports.push_back(std::move(r));
    }
    std::stable_sort(sum.reports.begin(), sum.reports.end(), [](auto& a, auto& b) { return a.name < b.name; });
    return sum;
}

inline SuiteSummary run_suite_file(const std::string& path, const VerifyConfig& cfg) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read suite " + path);
    auto slash = path.find_last_of('/');
    return run_suite(nlohmann::json::parse(in), cfg, slash == std::string::npos ? "." : path.substr(0, slash));
}

}  // namespace bisingular
