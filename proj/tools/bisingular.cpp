// Command-line driver: symbols, compose, char, biell, tables, analyze, apply, verify.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include <bisingular/calculus.hpp>
#include <bisingular/parser.hpp>
#include <bisingular/torus_fields.hpp>
#include <bisingular/verifier.hpp>
#include <bisingular/wavefront.hpp>

#ifndef BISINGULAR_SUITE_DIR
#define BISINGULAR_SUITE_DIR "suites"
#endif

namespace fs = std::filesystem;
using namespace bisingular;
using ojson = nlohmann::ordered_json;

namespace {

constexpr const char* kSchema = "bisingular-cli/1";

struct RunConfig {
    int band = 256;
    int cells = 0;  // 0: max(4, N/16)
    std::string mode = "relaxed";
    double smooth = -3, singular = -1;
    std::uint64_t seed = 1;
    std::string out;
    bool json = false;
    std::string reading = "A";

    DetectorConfig detector() const {
        DetectorConfig d;
        d.cells = cells;
        d.th.smooth = smooth;
        d.th.singular = singular;
        return d;
    }
    ojson to_json() const {
        ojson j;
        j["schema"] = kSchema;
        j["band"] = band;
        j["cells"] = DetectorConfig{.cells = cells}.cells_for(band);
        j["mode"] = mode;
        j["thresholds"] = {smooth, singular};
        j["seed"] = seed;
        j["out"] = out;
        j["reading"] = reading;
        return j;
    }
};

void apply_config_file(const std::string& path, RunConfig& rc) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read config " + path);
    auto j = nlohmann::json::parse(in);
    rc.band = j.value("band", rc.band);
    rc.cells = j.value("cells", rc.cells);
    rc.mode = j.value("mode", rc.mode);
    if (j.contains("thresholds")) {
        rc.smooth = j["thresholds"].at(0);
        rc.singular = j["thresholds"].at(1);
    }
    rc.seed = j.value("seed", rc.seed);
    rc.out = j.value("out", rc.out);
    rc.reading = j.value("reading", rc.reading);
}

std::string fmt(double v) { return format_e(v); }

// Writes a file under --out (if set) and the resolved config next to it.
void emit_file(const RunConfig& rc, const std::string& name, const std::string& content) {
    if (rc.out.empty()) return;
    fs::create_directories(rc.out);
    std::ofstream(fs::path(rc.out) / name) << content;
    std::ofstream(fs::path(rc.out) / "config.json") << rc.to_json().dump(2) << "\n";
}

void print(const RunConfig& rc, const ojson& j, const std::string& text) {
    if (rc.json) std::cout << j.dump(2) << "\n";
    else std::cout << text;
}

ojson triple_json(const PrincipalTriple& t) {
    return {{"sigma1", t.sigma1.str()}, {"sigma2", t.sigma2.str()}, {"sigma12", t.sigma12.str()}};
}

int cmd_symbols(const RunConfig& rc, const std::string& expr) {
    BiSymbol a = parse_symbol(expr);
    ojson j;
    j["schema"] = kSchema;
    j["command"] = "symbols";
    j["symbol"] = a.str();
    j["bi_order"] = a.bi_order().str();
    j["class"] = to_string(a.class_tag());
    std::ostringstream os;
    os << "symbol:   " << a.str() << "\n"
       << "bi-order: " << a.bi_order().str() << "\n"
       << "class:    " << to_string(a.class_tag()) << "\n";
    try {
        auto t = principal_triple(a);
        j["principal"] = triple_json(t);
        os << "sigma1:   " << t.sigma1.str() << "\n"
           << "sigma2:   " << t.sigma2.str() << "\n"
           << "sigma12:  " << t.sigma12.str() << "\n";
    } catch (const NotClassical& e) {
        j["principal"] = nullptr;
        j["note"] = e.what();
        os << "principal triple: unavailable (" << e.what() << ")\n";
    }
    print(rc, j, os.str());
    emit_file(rc, "symbols.json", j.dump(2) + "\n");
    return 0;
}

int cmd_compose(const RunConfig& rc, const std::string& lhs, const std::string& rhs, int order, bool bracket) {
    BiSymbol a = parse_symbol(lhs), b = parse_symbol(rhs);
    CompositionExpansion c = bracket ? commutator(a, b, order) : compose(a, b, order);
    ojson j;
    j["schema"] = kSchema;
    j["command"] = bracket ? "commutator" : "compose";
    j["exact"] = c.exact;
    j["truncation"] = c.truncation;
    j["blocks"] = ojson::array();
    std::ostringstream os;
    os << (bracket ? "commutator" : "composition") << " (" << (c.exact ? "exact" : "truncated") << ", J=" << c.truncation
       << ")\n";
    for (std::size_t k = 0; k < c.terms.size(); ++k) {
        auto& t = c.terms[k];
        j["blocks"].push_back({{"j", k}, {"c1", t.c1.str()}, {"c2", t.c2.str()}, {"c12", t.c12.str()}});
        os << "j=" << k << "  c1: " << t.c1.str() << "\n     c2: " << t.c2.str() << "\n     c12: " << t.c12.str() << "\n";
    }
    j["total"] = c.total().str();
    os << "total: " << c.total().str() << "\n";
    j["remainder_orders"] = ojson::array();
    for (auto& o : c.remainder_orders) j["remainder_orders"].push_back(o.str());
    print(rc, j, os.str());
    emit_file(rc, "compose.json", j.dump(2) + "\n");
    return 0;
}

CharReading reading_of(const RunConfig& rc) {
    if (rc.reading == "A") return CharReading::A;
    if (rc.reading == "B") return CharReading::B;
    throw std::invalid_argument("reading must be A or B");
}

int cmd_tables(const RunConfig& rc, const std::string& which) {
    CharReading reading = reading_of(rc);
    std::string t1 = table1_markdown(), t2 = table2_markdown(reading);
    ojson j;
    j["schema"] = kSchema;
    j["command"] = "tables";
    j["reading"] = rc.reading;
    ojson rows1 = ojson::array(), rows2 = ojson::array();
    int row = 0;
    for (auto& op : model_operators()) {
        ++row;
        BiSymbol a = parse_symbol(op.literal);
        auto jc = joint_classical(a);
        rows1.push_back({{"operator", op.name},
                         {"psido_order", jc ? ojson(jc->order) : ojson(nullptr)},
                         {"psido_elliptic", jc ? ojson(jc->elliptic) : ojson(nullptr)},
                         {"bi_order", a.bi_order().str()},
                         {"bielliptic", is_bielliptic(a).bielliptic()}});
        EllipticityConfig ec;
        ec.reading = reading;
        auto ch = char_sets(a, ec);
        rows2.push_back({{"operator", op.name},
                         {"char1", region_label(ch.char1, 1)},
                         {"char2", region_label(ch.char2, 2)},
                         {"char12", region_label(ch.char12, 12)},
                         {"transposed_vs_reference", row == kTransposedRow}});
    }
    std::string text;
    if (which == "1" || which == "all") {
        j["table1"] = rows1;
        text += t1;
        emit_file(rc, "table1.md", t1);
    }
    if (which == "all") text += "\n";
    if (which == "2" || which == "all") {
        j["table2"] = rows2;
        text += t2;
        emit_file(rc, "table2.md", t2);
    }
    print(rc, j, text);
    emit_file(rc, "tables.json", j.dump(2) + "\n");
    return 0;
}

int cmd_char(const RunConfig& rc, const std::string& expr, bool verdict_only) {
    BiSymbol a = parse_symbol(expr);
    EllipticityConfig ec;
    ec.reading = reading_of(rc);
    CharReport ch = char_sets(a, ec);
    const BiellipticReport& e = ch.ellipticity;
    ojson j;
    j["schema"] = kSchema;
    j["command"] = verdict_only ? "biell" : "char";
    j["operator"] = expr;
    j["bi_order"] = a.bi_order().str();
    j["bielliptic"] = e.bielliptic();
    j["verdict"] = to_string(e.verdict);
    j["cond_i"] = e.cond_i;
    j["cond_ii"] = e.cond_ii;
    j["cond_iii"] = e.cond_iii;
    j["conclusive"] = e.conclusive;
    j["char1"] = region_label(ch.char1, 1);
    j["char2"] = region_label(ch.char2, 2);
    j["char12"] = region_label(ch.char12, 12);
    j["reading"] = rc.reading;
    std::ostringstream os;
    os << "operator: " << expr << "\nbi-order: " << a.bi_order().str() << "\nverdict:  " << to_string(e.verdict)
       << " (i " << e.cond_i << ", ii " << e.cond_ii << ", iii " << e.cond_iii << ")\n";
    if (!verdict_only)
        os << "Char1:  " << j["char1"].get<std::string>() << "\nChar2:  " << j["char2"].get<std::string>()
           << "\nChar12: " << j["char12"].get<std::string>() << "\n";
    print(rc, j, os.str());
    emit_file(rc, verdict_only ? "biell.json" : "char.json", j.dump(2) + "\n");
    return 0;
}

std::string set_text(const std::string& label, const WFSet& w) {
    std::ostringstream os;
    os << label << ": ";
    if (w.flags.empty() && w.indeterminate.empty()) return os.str() + "∅\n";
    os << w.flags.size() << " flag(s)";
    if (!w.indeterminate.empty()) os << ", " << w.indeterminate.size() << " indeterminate";
    os << "\n";
    auto cell = [](int c) { return c == kAllCells ? std::string("all") : std::to_string(c); };
    for (auto& f : w.flags)
        os << "  (" << cell(f.c1) << ", " << cell(f.c2) << ") " << sector_name(f.sector) << "  slope " << fmt(f.slope) << "\n";
    for (auto& f : w.indeterminate)
        os << "  ? (" << cell(f.c1) << ", " << cell(f.c2) << ") " << sector_name(f.sector) << "  slope " << fmt(f.slope) << "\n";
    return os.str();
}

int cmd_analyze(const RunConfig& rc, const std::string& dist, bool classical) {
    DetectorConfig dc = rc.detector();
    CoeffField u = synthesize(dist, rc.band, rc.seed);
    WFReport r = wf_bi(u, mode_from_name(rc.mode), dc);
    ojson j = to_json(r);
    j["input"] = dist;
    j["N"] = rc.band;
    j["min_margin"] = fmt(std::min({r.wf1.min_margin(), r.wf2.min_margin(), r.wf12().min_margin()}));
    std::vector<const WFSet*> sets{&r.wf1, &r.wf2, &r.wf12_relaxed};
    std::string text = "input: " + dist + "  (N=" + std::to_string(rc.band) + ", mode " + rc.mode + ")\n" +
                       set_text("WF1", r.wf1) + set_text("WF2", r.wf2) + set_text("WF12", r.wf12());
    std::optional<WFSet> cl;
    if (classical) {
        cl = detect_wf_cl(u, dc);
        j["classical"] = to_json(*cl);
        text += set_text("WFcl", *cl);
        sets.push_back(&*cl);
    }
    print(rc, j, text);
    emit_file(rc, "wfreport.json", j.dump(2) + "\n");
    emit_file(rc, "decay.csv", decay_csv(sets));
    return 0;
}

int cmd_apply(const RunConfig& rc, const std::vector<std::string>& ops, const std::string& dist, const std::string& save) {
    CoeffField u = synthesize(dist, rc.band, rc.seed);
    CoeffField v = u;
    for (auto& op : ops) v = apply_operator(parse_symbol(op), v);
    double nu = u.norm(v.safe1(), v.safe2());
    CoeffField diff = v - u;
    double change = diff.norm(v.safe1(), v.safe2());
    ojson j;
    j["schema"] = kSchema;
    j["command"] = "apply";
    j["input"] = dist;
    j["operators"] = ops;
    j["N"] = rc.band;
    j["safe_band"] = {v.safe1(), v.safe2()};
    j["growth_order"] = fmt(v.growth_order);
    j["zero"] = v.is_zero();
    j["max_abs"] = fmt(v.max_abs());
    j["norm_safe"] = fmt(v.norm(v.safe1(), v.safe2()));
    j["relative_change"] = fmt(nu > 0 ? change / nu : change);
    std::ostringstream os;
    os << "input: " << dist << "\n";
    for (auto& op : ops) os << "apply: " << op << "\n";
    os << "safe band: (" << v.safe1() << ", " << v.safe2() << ")\n"
       << "zero field: " << (v.is_zero() ? "yes" : "no") << "\n"
       << "max |coeff|: " << fmt(v.max_abs()) << "\n"
       << "relative change on safe band: " << j["relative_change"].get<std::string>() << "\n";
    print(rc, j, os.str());
    emit_file(rc, "apply.json", j.dump(2) + "\n");
    if (!save.empty()) save_field(v, rc.out.empty() ? save : (fs::path(rc.out) / save).string(), {{"input", dist}, {"operators", ops}});
    return 0;
}

int cmd_verify(const RunConfig& rc, std::string suite) {
    if (suite == "default" || suite.find('/') == std::string::npos && !fs::exists(suite))
        suite = std::string(BISINGULAR_SUITE_DIR) + "/" + suite + (suite.ends_with(".json") ? "" : ".json");
    VerifyConfig vc;
    vc.N = rc.band;
    vc.seed = rc.seed;
    vc.det = rc.detector();
    SuiteSummary s = run_suite_file(suite, vc);
    ojson j = s.to_json(vc);
    j["suite"] = fs::path(suite).filename().string();
    std::ostringstream os;
    os << s.table() << "pass " << s.pass << ", fail " << s.fail << ", indeterminate " << s.indeterminate << ", inapplicable "
       << s.inapplicable << "\n";
    print(rc, j, os.str());
    emit_file(rc, "summary.json", j.dump(2) + "\n");
    emit_file(rc, "summary.txt", os.str());
    return s.exit_code();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Bisingular symbol calculus and bi-wave-front detection"};
    app.require_subcommand(1);
    RunConfig rc;
    std::string config_path, thresholds;

    app.add_option("--config", config_path, "JSON file with defaults (command-line flags take precedence)");
    app.add_option("--band", rc.band, "lattice band N (coefficients for |k| <= N)")->check(CLI::Range(16, 1 << 14));
    app.add_option("--cells", rc.cells, "x-cells per factor (default max(4, N/16))");
    app.add_option("--mode", rc.mode, "joint-component mode")->check(CLI::IsMember({"relaxed", "strict"}));
    app.add_option("--thresholds", thresholds, "smooth,singular slope thresholds (default -3,-1)");
    app.add_option("--seed", rc.seed, "seed for random fields");
    app.add_option("--out", rc.out, "output directory");
    app.add_flag("--json", rc.json, "machine-readable output");
    app.add_option("--reading", rc.reading, "Char reading")->check(CLI::IsMember({"A", "B"}));

    std::string expr, lhs, rhs, dist = "smooth", table = "all", suite = "default", save;
    std::vector<std::string> ops;
    int order = 4;
    bool bracket = false, classical = false;

    auto* sym = app.add_subcommand("symbols", "bi-order, class and principal triple of a symbol");
    sym->add_option("expr", expr, "symbol expression")->required();
    auto* comp = app.add_subcommand("compose", "composition or commutator expansion");
    comp->add_option("lhs", lhs)->required();
    comp->add_option("rhs", rhs)->required();
    comp->add_option("--order", order, "truncation J");
    comp->add_flag("--commutator", bracket, "expand [a, b] instead of a o b");
    auto* chr = app.add_subcommand("char", "characteristic sets of a symbol");
    chr->add_option("expr", expr)->required();
    auto* bie = app.add_subcommand("biell", "bi-ellipticity verdict of a symbol");
    bie->add_option("expr", expr)->required();
    auto* tab = app.add_subcommand("tables", "model-operator tables");
    tab->add_option("--table", table)->check(CLI::IsMember({"1", "2", "all"}));
    auto* an = app.add_subcommand("analyze", "detect the bi-wave-front set of a builtin field");
    an->add_option("--dist", dist, "field descriptor");
    an->add_flag("--classical", classical, "also detect the classical wave-front set");
    auto* ap = app.add_subcommand("apply", "apply operators to a builtin field");
    ap->add_option("--op", ops, "operator symbol; repeat to apply in sequence")->required();
    ap->add_option("--dist", dist, "field descriptor");
    ap->add_option("--save", save, "write the result as <stem>.bin/<stem>.json");
    auto* ve = app.add_subcommand("verify", "run a scenario suite");
    ve->add_option("--suite", suite, "suite name or path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (!config_path.empty()) {
            RunConfig file;
            apply_config_file(config_path, file);
            // re-apply explicit flags over file values
            auto keep = [&](const char* flag, auto& dst, const auto& src) {
                if (app.count(flag) == 0) dst = src;
            };
            keep("--band", rc.band, file.band);
            keep("--cells", rc.cells, file.cells);
            keep("--mode", rc.mode, file.mode);
            keep("--seed", rc.seed, file.seed);
            keep("--out", rc.out, file.out);
            keep("--reading", rc.reading, file.reading);
            if (app.count("--thresholds") == 0) {
                rc.smooth = file.smooth;
                rc.singular = file.singular;
            }
        }
        if (!thresholds.empty()) {
            auto comma = thresholds.find(',');
            if (comma == std::string::npos) throw CLI::ValidationError("--thresholds", "expected two values a,b");
            rc.smooth = std::stod(thresholds.substr(0, comma));
            rc.singular = std::stod(thresholds.substr(comma + 1));
            if (!(rc.smooth < rc.singular)) throw CLI::ValidationError("--thresholds", "need smooth < singular");
        }

        if (*sym) return cmd_symbols(rc, expr);
        if (*comp) return cmd_compose(rc, lhs, rhs, order, bracket);
        if (*chr) return cmd_char(rc, expr, false);
        if (*bie) return cmd_char(rc, expr, true);
        if (*tab) return cmd_tables(rc, table);
        if (*an) return cmd_analyze(rc, dist, classical);
        if (*ap) return cmd_apply(rc, ops, dist, save);
        if (*ve) return cmd_verify(rc, suite);
    } catch (const ParseError& e) {
        std::cerr << e.what() << "\n";
        return 2;
    } catch (const CLI::ValidationError& e) {
        std::cerr << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
