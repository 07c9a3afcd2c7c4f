#include "acx/cli.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <ostream>

#include "CLI11.hpp"

#include "acx/metrics.hpp"
#include "acx/parallel.hpp"
#include "acx/suites.hpp"

namespace acx {

namespace fs = std::filesystem;

namespace {

struct RunConfig {
    std::string command;
    std::string config_path;
    std::string out_dir = "acx-out";
    std::optional<std::uint64_t> seed;
    std::optional<double> tol;
    std::optional<double> c, r;
    bool quiet = false;
};

Json base_report(const std::string& command) { return Json{{"schema", kSchema}, {"command", command}}; }

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw InputError("cannot write '" + path.string() + "'");
    f << text;
}

void emit(const RunConfig& rc, const Json& report, double seconds) {
    fs::create_directories(rc.out_dir);
    write_text(fs::path(rc.out_dir) / "report.json", report.dump(2) + "\n");
    const Json meta = {{"schema", kSchema},
                       {"command", rc.command},
                       {"wall_seconds", seconds},
                       {"threads", worker_count()},
                       {"unix_time", std::chrono::duration_cast<std::chrono::seconds>(
                                         std::chrono::system_clock::now().time_since_epoch())
                                         .count()}};
    write_text(fs::path(rc.out_dir) / "metadata.json", meta.dump(2) + "\n");
}

/// Relative "csv" paths are taken relative to the config file.
void resolve_paths(Json& j, const fs::path& base) {
    if (j.is_object()) {
        for (auto& [k, v] : j.items()) {
            if (k == "csv" && v.is_string()) {
                const fs::path p(v.get<std::string>());
                if (p.is_relative()) v = (base / p).string();
            } else {
                resolve_paths(v, base);
            }
        }
    } else if (j.is_array()) {
        for (auto& v : j) resolve_paths(v, base);
    }
}

Json load_config(const RunConfig& rc, bool required) {
    if (rc.config_path.empty()) {
        if (required) throw InputError("command '" + rc.command + "' needs --config");
        return Json::object();
    }
    Json j = load_json_file(rc.config_path);
    if (!j.is_object()) throw InputError("config must be a JSON object");
    resolve_paths(j, fs::path(rc.config_path).parent_path());
    return j;
}

Subequation parse_subequation(const Json& j, int n) {
    const AcxPtr acx = parse_structure(j.contains("structure") ? j.at("structure") : Json(), n);
    ScalarFn f = parse_rhs(j.contains("f") ? &j.at("f") : nullptr);
    return f ? inhomogeneous(acx, f) : homogeneous(acx);
}

Json node_json(const ScalarField& u, NodeId id) {
    if (id < 0) return nullptr;
    return {{"node", id}, {"x", to_json(u.domain->position(id))}};
}

Json psh_json(const ScalarField& u, const PshReport& r) {
    Json j = {{"verdict", r.verdict ? "PASS" : "FAIL"}, {"margin", r.margin}, {"tol", r.tol}};
    j["worst"] = node_json(u, r.worst);
    if (r.witness.size() > 0) j["witness_b"] = to_json(r.witness);
    return j;
}

double tolerance_of(const RunConfig& rc, const Json& cfg) {
    if (rc.tol) return *rc.tol;
    if (cfg.contains("tol")) return cfg.at("tol").get<double>();
    return -1.0;
}

int cmd_solve(const RunConfig& rc, std::ostream& out) {
    Json cfg = load_config(rc, true);
    DirichletProblem prob = parse_problem(cfg);
    if (rc.tol) prob.scheme.tol_res = *rc.tol;
    const SolveResult res = solve(prob);
    const SolveReport& s = res.report;
    Json rep = base_report("solve");
    rep["problem"] = {{"n", prob.domain->n()},
                      {"h", prob.domain->h()},
                      {"nodes", prob.domain->size()},
                      {"interior_nodes", prob.domain->interior().size()},
                      {"structure", prob.sub.acx->id()}};
    rep["converged"] = s.converged;
    rep["iterations"] = s.iterations;
    rep["residual"] = s.residual;
    rep["tol_res"] = s.tol_res;
    rep["tau"] = s.tau;
    rep["subsolution_margin"] = s.subsolution_margin;
    rep["dual_margin"] = s.dual_margin;
    rep["init_constant"] = s.init_constant;
    rep["init_ok"] = s.init_ok;
    fs::create_directories(rc.out_dir);
    {
        std::ofstream csv(fs::path(rc.out_dir) / "solution.csv", std::ios::binary);
        write_csv(res.u, csv);
    }
    emit(rc, rep, s.wall_seconds);
    if (!rc.quiet)
        out << (s.converged ? "converged" : "NOT converged") << " after " << s.iterations
            << " iterations, residual " << s.residual << " (tol " << s.tol_res << ")\n";
    return s.converged ? kExitOk : kExitNoConvergence;
}

int cmd_check(const RunConfig& rc, std::ostream& out, std::string mode) {
    Json cfg = load_config(rc, true);
    const DomainPtr dom = parse_domain(cfg.contains("domain") ? cfg.at("domain") : throw InputError("missing field \"domain\""));
    const Subequation sub = parse_subequation(cfg, dom->n());
    if (!cfg.contains("field")) throw InputError("missing field \"field\"");
    const ScalarField u = parse_field(cfg.at("field"), dom);
    if (mode.empty()) mode = cfg.contains("mode") ? cfg.at("mode").get<std::string>() : "direct";
    const double tol = tolerance_of(rc, cfg);
    Json rep = base_report(rc.command);
    rep["mode"] = mode;
    bool pass = false;
    if (mode == "direct") {
        const PshReport r = psh_margin(u, sub, tol);
        rep["result"] = psh_json(u, r);
        pass = r.verdict;
    } else if (mode == "blaplacian") {
        const PshReport r = psh_via_blaplacians(u, sub, fixed_b_family(dom->n()), tol);
        rep["result"] = psh_json(u, r);
        pass = r.verdict;
    } else if (mode == "restriction") {
        const int m = cfg.contains("m") ? cfg.at("m").get<int>() : 1;
        const double slack = cfg.contains("slack_per_h") ? cfg.at("slack_per_h").get<double>() : 1.0;
        const RestrictionReport r = restriction_check(u, sub, m, tol, slack);
        rep["m"] = m;
        rep["ambient"] = psh_json(u, r.ambient);
        rep["slice"] = {{"verdict", r.slice.verdict ? "PASS" : "FAIL"}, {"margin", r.slice.margin},
                        {"tol", r.slice.tol}, {"slack", r.slack}};
        rep["result"] = {{"verdict", r.pass ? "PASS" : "FAIL"}};
        pass = r.pass;
    } else {
        throw InputError("unknown mode '" + mode + "'");
    }
    emit(rc, rep, 0.0);
    if (!rc.quiet) out << rc.command << " (" << mode << "): " << (pass ? "PASS" : "FAIL") << "\n";
    return pass ? kExitOk : kExitFail;
}

int cmd_dual_check(const RunConfig& rc, std::ostream& out) {
    Json cfg = load_config(rc, true);
    const DomainPtr dom = parse_domain(cfg.contains("domain") ? cfg.at("domain") : throw InputError("missing field \"domain\""));
    const Subequation sub = parse_subequation(cfg, dom->n());
    if (!cfg.contains("field")) throw InputError("missing field \"field\"");
    const ScalarField u = parse_field(cfg.at("field"), dom);
    const double tol_cfg = tolerance_of(rc, cfg);
    double worst = std::numeric_limits<double>::infinity(), worst_tol = 0.0;
    NodeId at = -1;
    bool pass = true;
    for (NodeId id : dom->interior()) {
        const double t = tol_cfg >= 0.0 ? tol_cfg : local_tolerance(u, id);
        const Membership mb = dual_contains(sub, dom->position(id), fd_jet(u, id), t);
        if (!mb.inside) pass = false;
        if (mb.margin < worst) {
            worst = mb.margin;
            worst_tol = t;
            at = id;
        }
    }
    if (at < 0) throw InputError("domain has no interior nodes");
    Json rep = base_report("dual-check");
    rep["result"] = {{"verdict", pass ? "PASS" : "FAIL"}, {"margin", worst}, {"tol", worst_tol}};
    rep["result"]["worst"] = node_json(u, at);
    emit(rc, rep, 0.0);
    if (!rc.quiet) out << "dual-check: " << (pass ? "PASS" : "FAIL") << ", dual margin " << worst << "\n";
    return pass ? kExitOk : kExitFail;
}

int cmd_metric_demo(const RunConfig& rc, std::ostream& out) {
    Json cfg = load_config(rc, false);
    const double c = rc.c ? *rc.c : (cfg.contains("C") ? cfg.at("C").get<double>() : 2.0);
    const double r = rc.r ? *rc.r : (cfg.contains("r") ? cfg.at("r").get<double>() : 1.0);
    const SphereDemoReport e = sphere_demo_report(c, r);
    const bool pass = e.deviation <= 1e-2;
    Json rep = base_report("metric-demo");
    rep["inputs"] = {{"C", c}, {"r", r}};
    rep["computed"] = e.laplacian;
    rep["identity_value"] = e.identity_value;
    rep["expected"] = e.expected;
    rep["deviation"] = e.deviation;
    rep["hermitian_margin"] = e.hermitian_margin;
    rep["hermitian_psh"] = e.hermitian_psh;
    rep["standard_psh_fails"] = e.standard_psh_fails;
    rep["mean_curvature"] = to_json(e.mean_curvature);
    rep["verdict"] = pass ? "PASS" : "FAIL";
    emit(rc, rep, 0.0);
    if (!rc.quiet)
        out << "C = " << c << ", r = " << r << ": Laplacian on the sphere at 0 = " << e.laplacian
            << ", expected 2 - 2C/r = " << e.expected << ", deviation " << e.deviation << "\n";
    return pass ? kExitOk : kExitFail;
}

int cmd_regularize(const RunConfig& rc, std::ostream& out) {
    Json cfg = load_config(rc, false);
    Json rep = base_report("regularize");
    if (!cfg.contains("field")) {
        bool pass = true;
        rep["examples"] = Json::array();
        for (const RegularizationCase& c : regularization_examples()) {
            rep["examples"].push_back({{"name", c.name}, {"max_deviation", c.max_deviation}, {"exact", c.exact}});
            pass = pass && c.exact;
        }
        emit(rc, rep, 0.0);
        if (!rc.quiet) out << "regularization examples: " << (pass ? "PASS" : "FAIL") << "\n";
        return pass ? kExitOk : kExitFail;
    }
    const DomainPtr dom = parse_domain(cfg.contains("domain") ? cfg.at("domain") : throw InputError("missing field \"domain\""));
    ScalarField u = parse_field(cfg.at("field"), dom);
    if (cfg.contains("mask")) {
        const Json& m = cfg.at("mask");
        if (!u.has_mask()) u.mask.assign(dom->size(), 0);
        const double value = m.contains("value") ? m.at("value").get<double>() : std::nan("");
        auto mark = [&](NodeId id) {
            if (id < 0 || dom->node_class(id) == NodeClass::exterior) throw InputError("mask node is not in the domain");
            u.mask[id] = 1;
            if (!std::isnan(value)) u.values[id] = value;
        };
        if (m.contains("nodes"))
            for (const Json& x : m.at("nodes")) {
                const auto v = x.get<std::vector<double>>();
                if (static_cast<int>(v.size()) != dom->dim()) throw InputError("mask node has wrong dimension");
                mark(dom->locate(Eigen::Map<const Eigen::VectorXd>(v.data(), v.size())));
            }
        if (m.contains("hyperplane")) {
            const int axis = m.at("hyperplane").at("axis").get<int>();
            const double at = m.at("hyperplane").value("at", 0.0);
            if (axis < 0 || axis >= dom->dim()) throw InputError("hyperplane axis out of range");
            for (NodeId id = 0; id < dom->size(); ++id)
                if (dom->node_class(id) != NodeClass::exterior &&
                    std::abs(dom->position(id)(axis) - at) <= 1e-9 * dom->h())
                    mark(id);
        }
    }
    const ScalarField reg = ess_usc_regularize(u);
    long masked = 0;
    double change = 0.0;
    for (NodeId id = 0; id < dom->size(); ++id) {
        if (dom->node_class(id) == NodeClass::exterior) continue;
        masked += u.masked(id);
        change = std::max(change, std::abs(reg[id] - u[id]));
    }
    fs::create_directories(rc.out_dir);
    {
        std::ofstream csv(fs::path(rc.out_dir) / "regularized.csv", std::ios::binary);
        write_csv(reg, csv);
    }
    rep["masked_nodes"] = masked;
    rep["max_change"] = change;
    emit(rc, rep, 0.0);
    if (!rc.quiet) out << "regularized " << masked << " masked nodes, max change " << change << "\n";
    return kExitOk;
}

int cmd_equivalence_suite(const RunConfig& rc, std::ostream& out) {
    Json cfg = load_config(rc, false);
    std::uint64_t seed = kDefaultSeed;
    if (cfg.contains("seed")) seed = cfg.at("seed").get<std::uint64_t>();
    if (rc.seed) seed = *rc.seed;
    bool pass = false;
    const Json rep = equivalence_suite(cfg, seed, pass);
    emit(rc, rep, 0.0);
    if (!rc.quiet) out << "equivalence suite (seed " << seed << "): " << (pass ? "PASS" : "FAIL") << "\n";
    return pass ? kExitOk : kExitFail;
}

}  // namespace

Json equivalence_suite(const Json& config, std::uint64_t seed, bool& pass) {
    const Json agr = config.value("agreement", Json::object());
    const Json tri = config.value("triangle", Json::object());
    const int count = agr.value("count", 50);
    const std::vector<int> dims = agr.value("dims", std::vector<int>{1, 2});
    const int fields = tri.value("fields", 20);
    const int bumps = tri.value("bumps", 5);
    const bool corrupt = config.value("inject_corrupted", false);

    Json rep = base_report("equivalence-suite");
    rep["seed"] = seed;

    const AgreementBattery a = agreement_battery(dims, count, seed, corrupt);
    Json cases = Json::array();
    for (const AgreementCase& c : a.cases)
        cases.push_back({{"n", c.n},
                         {"label", c.label},
                         {"expect_psh", c.expect_psh},
                         {"psh_margin", c.psh_margin},
                         {"blaplacian_margin", c.blap_margin},
                         {"tol", c.tol},
                         {"psh_verdict", c.psh_verdict},
                         {"blaplacian_verdict", c.blap_verdict},
                         {"undecided", c.undecided},
                         {"agree", c.agree}});
    rep["agreement"] = {{"pass", a.pass},
                        {"decided", a.decided},
                        {"disagreements", a.disagreements},
                        {"label_mismatches", a.label_mismatches},
                        {"cases", cases}};

    const TriangleBattery t = triangle_battery(fields, bumps, seed);
    Json tcases = Json::array();
    for (const TriangleCase& c : t.cases)
        tcases.push_back({{"field", c.field},
                          {"operator", c.op},
                          {"viscosity", c.viscosity},
                          {"classical", c.classical},
                          {"viscosity_margin", c.viscosity_margin},
                          {"classical_excess", c.classical_excess},
                          {"pairings", c.pairings},
                          {"pairing_ok", c.pairing_ok},
                          {"consistent", c.consistent}});
    rep["triangle"] = {{"pass", t.pass}, {"rejected_samples", t.rejected_samples}, {"cases", tcases}};

    bool reg_pass = true;
    Json reg = Json::array();
    for (const RegularizationCase& c : regularization_examples()) {
        reg.push_back({{"name", c.name}, {"max_deviation", c.max_deviation}, {"exact", c.exact}});
        reg_pass = reg_pass && c.exact;
    }
    rep["regularization"] = {{"pass", reg_pass}, {"cases", reg}};

    pass = a.pass && t.pass && reg_pass;
    rep["pass"] = pass;
    return rep;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    RunConfig rc;
    CLI::App app{"acx: plurisubharmonic analysis and Monge-Ampere solves for almost complex structures"};
    app.add_option("command", rc.command, "solve | check-psh | restrict-check | dual-check | equivalence-suite | "
                                          "metric-demo | regularize")
        ->required()
        ->check(CLI::IsMember({"solve", "check-psh", "restrict-check", "dual-check", "equivalence-suite",
                               "metric-demo", "regularize"}));
    app.add_option("--config", rc.config_path, "JSON config file");
    app.add_option("--out", rc.out_dir, "output directory (default acx-out)");
    app.add_option("--seed", rc.seed, "seed for randomized batteries");
    app.add_option("--tol", rc.tol, "tolerance override (tol_res for solve)");
    app.add_option("--C", rc.c, "metric-demo: C");
    app.add_option("--r", rc.r, "metric-demo: sphere radius");
    app.add_flag("--quiet", rc.quiet, "suppress the human-readable summary");
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "acx: " << e.what() << "\n";
        return kExitInput;
    }
    try {
        if (rc.command == "solve") return cmd_solve(rc, out);
        if (rc.command == "check-psh") return cmd_check(rc, out, "");
        if (rc.command == "restrict-check") return cmd_check(rc, out, "restriction");
        if (rc.command == "dual-check") return cmd_dual_check(rc, out);
        if (rc.command == "metric-demo") return cmd_metric_demo(rc, out);
        if (rc.command == "regularize") return cmd_regularize(rc, out);
        return cmd_equivalence_suite(rc, out);
    } catch (const InputError& e) {
        err << "acx: input error: " << e.what() << "\n";
        return kExitInput;
    } catch (const Json::exception& e) {
        err << "acx: input error: " << e.what() << "\n";
        return kExitInput;
    } catch (const fs::filesystem_error& e) {
        err << "acx: input error: " << e.what() << "\n";
        return kExitInput;
    } catch (const ChartTooLarge& e) {
        err << "acx: numerical error: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const NumericalError& e) {
        err << "acx: numerical error: " << e.what() << "\n";
        return kExitNumerical;
    }
}

}  // namespace acx
