#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "acx/cli.hpp"

using namespace acx;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string out, err;
};

Run run(std::vector<std::string> args) {
    args.insert(args.begin(), "acx");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("acx_cli_test_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string write_config(const fs::path& dir, const Json& j, const std::string& name = "config.json") {
    const fs::path p = dir / name;
    std::ofstream(p) << j.dump(2);
    return p.string();
}

Json read_json(const fs::path& p) {
    std::ifstream f(p);
    return Json::parse(f);
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

Json disc_config(double h) {
    return {{"domain", {{"shape", "ball"}, {"n", 1}, {"radius", 1.0}, {"h", h}}},
            {"structure", "standard"},
            {"f", 1.0},
            {"phi", "abs2"}};
}

}  // namespace

TEST_CASE("solve: converged run, forced non-convergence and input errors") {
    const fs::path dir = scratch("solve");
    const Run ok = run({"solve", "--config", write_config(dir, disc_config(1.0 / 32)), "--out", (dir / "ok").string()});
    CHECK(ok.code == kExitOk);
    const Json rep = read_json(dir / "ok" / "report.json");
    CHECK(rep.at("schema") == "acx/1");
    CHECK(rep.at("converged") == true);
    CHECK(rep.at("residual").get<double>() <= rep.at("tol_res").get<double>());
    CHECK(fs::exists(dir / "ok" / "solution.csv"));
    CHECK(fs::exists(dir / "ok" / "metadata.json"));
    CHECK_FALSE(rep.contains("wall_seconds"));

    Json capped = disc_config(1.0 / 16);
    capped["scheme"] = {{"max_iterations", 1}};
    CHECK(run({"solve", "--config", write_config(dir, capped, "capped.json"), "--out", (dir / "capped").string(), "--quiet"}).code ==
          kExitNoConvergence);

    Json missing = disc_config(1.0 / 16);
    missing.erase("domain");
    const Run bad = run({"solve", "--config", write_config(dir, missing, "missing.json"), "--out", (dir / "bad").string()});
    CHECK(bad.code == kExitInput);
    CHECK(bad.err.find("domain") != std::string::npos);

    std::ofstream(dir / "broken.json") << "{\"domain\": ";
    const Run broken = run({"solve", "--config", (dir / "broken.json").string(), "--out", (dir / "broken").string()});
    CHECK(broken.code == kExitInput);
    CHECK_FALSE(broken.err.empty());

    CHECK(run({"solve", "--out", (dir / "none").string()}).code == kExitInput);
    CHECK(run({"frobnicate"}).code == kExitInput);
}

TEST_CASE("check-psh verdicts and the CSV round trip") {
    const fs::path dir = scratch("check");
    Json cfg = {{"domain", {{"shape", "box"}, {"n", 1}, {"lo", -1.0}, {"hi", 1.0}, {"h", 0.125}}}, {"field", "abs2"}};
    CHECK(run({"check-psh", "--config", write_config(dir, cfg, "pos.json"), "--out", (dir / "pos").string()}).code == kExitOk);
    cfg["field"] = "neg-abs2";
    CHECK(run({"check-psh", "--config", write_config(dir, cfg, "neg.json"), "--out", (dir / "neg").string()}).code == kExitFail);
    const Json neg = read_json(dir / "neg" / "report.json");
    CHECK(neg.at("result").at("verdict") == "FAIL");
    CHECK(neg.at("result").at("worst").at("node").get<long>() >= 0);
    CHECK(neg.at("result").at("worst").at("x").size() == 2);

    cfg["mode"] = "blaplacian";
    CHECK(run({"check-psh", "--config", write_config(dir, cfg, "negb.json"), "--out", (dir / "negb").string()}).code == kExitFail);
    CHECK(read_json(dir / "negb" / "report.json").at("result").contains("witness_b"));

    Json inc = {{"domain", {{"shape", "box"}, {"n", 2}, {"lo", -0.5}, {"hi", 0.5}, {"h", 0.25}}},
                {"structure", {{"preset", "antilinear-linear-eps"}, {"params", {{"eps", 0.1}}}}},
                {"field", "abs2"},
                {"mode", "restriction"},
                {"m", 1}};
    const Run r = run({"check-psh", "--config", write_config(dir, inc, "inc.json"), "--out", (dir / "inc").string()});
    CHECK(r.code == kExitInput);
    CHECK(r.err.find("not J-compatible") != std::string::npos);
    inc["structure"] = {{"preset", "antilinear-slice-compatible"}, {"params", {{"eps", 0.1}, {"m", 1}}}};
    CHECK(run({"restrict-check", "--config", write_config(dir, inc, "comp.json"), "--out", (dir / "comp").string()}).code == kExitOk);

    // Re-ingest a solution and recover the solver's subsolution margin.
    Json sc = disc_config(1.0 / 16);
    sc["structure"] = {{"preset", "antilinear-linear-eps"}, {"params", {{"eps", 0.1}}}};
    REQUIRE(run({"solve", "--config", write_config(dir, sc, "solve.json"), "--out", (dir / "sol").string(), "--quiet"}).code == kExitOk);
    const double solver_margin = read_json(dir / "sol" / "report.json").at("subsolution_margin").get<double>();
    Json cc = sc;
    cc["field"] = {{"csv", "sol/solution.csv"}};
    cc["tol"] = 0.0;
    run({"check-psh", "--config", write_config(dir, cc, "round.json"), "--out", (dir / "round").string(), "--quiet"});
    const double margin = read_json(dir / "round" / "report.json").at("result").at("margin").get<double>();
    CHECK(std::abs(margin - solver_margin) <= 1e-12);

    cc["field"] = {{"csv", "sol/missing.csv"}};
    CHECK(run({"check-psh", "--config", write_config(dir, cc, "nofile.json"), "--out", (dir / "nofile").string()}).code == kExitInput);
}

TEST_CASE("dual-check") {
    const fs::path dir = scratch("dual");
    Json cfg = disc_config(0.125);
    cfg["field"] = "abs2";
    CHECK(run({"dual-check", "--config", write_config(dir, cfg, "eq.json"), "--out", (dir / "eq").string()}).code == kExitOk);
    cfg["field"] = {{"preset", "quadratic"}, {"Q", {{6.0, 0.0}, {0.0, 6.0}}}};
    CHECK(run({"dual-check", "--config", write_config(dir, cfg, "inside.json"), "--out", (dir / "inside").string()}).code == kExitOk);
    // -u strictly inside F puts u outside the dual.
    cfg["field"] = {{"preset", "quadratic"}, {"Q", {{-6.0, 0.0}, {0.0, -6.0}}}};
    CHECK(run({"dual-check", "--config", write_config(dir, cfg, "outside.json"), "--out", (dir / "outside").string()}).code == kExitFail);
}

TEST_CASE("metric-demo") {
    const fs::path dir = scratch("metric");
    const Run a = run({"metric-demo", "--C", "2", "--r", "1", "--out", (dir / "a").string()});
    CHECK(a.code == kExitOk);
    CHECK(a.out.find("-2") != std::string::npos);
    const Json rep = read_json(dir / "a" / "report.json");
    CHECK(std::abs(rep.at("computed").get<double>() + 2.0) <= 1e-2);
    CHECK(rep.at("expected").get<double>() == -2.0);
    CHECK(rep.at("inputs").at("C").get<double>() == 2.0);
    const Run b = run({"metric-demo", "--C", "1", "--r", "1", "--out", (dir / "b").string(), "--quiet"});
    CHECK(b.code == kExitOk);
    CHECK(b.out.empty());
    CHECK(run({"metric-demo", "--C", "-1", "--r", "1", "--out", (dir / "c").string()}).code == kExitInput);
    CHECK(run({"metric-demo", "--config", write_config(dir, {{"C", 0.5}, {"r", 1.0}}), "--out", (dir / "d").string()}).code == kExitOk);
}

TEST_CASE("equivalence-suite exit codes and determinism") {
    const fs::path dir = scratch("suite");
    const Json small = {{"agreement", {{"count", 5}}}, {"triangle", {{"fields", 3}, {"bumps", 2}}}};
    const std::string cfg = write_config(dir, small);
    CHECK(run({"equivalence-suite", "--config", cfg, "--seed", "7", "--out", (dir / "a").string()}).code == kExitOk);
    CHECK(run({"equivalence-suite", "--config", cfg, "--seed", "7", "--out", (dir / "b").string()}).code == kExitOk);
    CHECK(slurp(dir / "a" / "report.json") == slurp(dir / "b" / "report.json"));
    CHECK(read_json(dir / "a" / "report.json").at("seed") == 7);

    Json empty = small;
    empty["agreement"]["count"] = 0;
    CHECK(run({"equivalence-suite", "--config", write_config(dir, empty, "empty.json"), "--out", (dir / "e").string()}).code == kExitInput);

    Json corrupt = small;
    corrupt["inject_corrupted"] = true;
    CHECK(run({"equivalence-suite", "--config", write_config(dir, corrupt, "corrupt.json"), "--out", (dir / "c").string()}).code == kExitFail);
    const Json rep = read_json(dir / "c" / "report.json");
    CHECK(rep.at("pass") == false);
    CHECK(rep.at("agreement").at("label_mismatches").get<int>() >= 1);
}

TEST_CASE("regularize") {
    const fs::path dir = scratch("reg");
    CHECK(run({"regularize", "--out", (dir / "builtin").string()}).code == kExitOk);
    const Json cfg = {{"domain", {{"shape", "box"}, {"n", 1}, {"lo", -1.0}, {"hi", 1.0}, {"h", 0.25}}},
                      {"field", "max-x1"},
                      {"mask", {{"hyperplane", {{"axis", 1}, {"at", 0.0}}}, {"value", 7.0}}}};
    CHECK(run({"regularize", "--config", write_config(dir, cfg), "--out", (dir / "row").string()}).code == kExitOk);
    const Json rep = read_json(dir / "row" / "report.json");
    CHECK(rep.at("masked_nodes").get<long>() == 9);
    CHECK(rep.at("max_change").get<double>() == doctest::Approx(7.0));
    std::ifstream csv(dir / "row" / "regularized.csv");
    std::string line;
    std::getline(csv, line);
    CHECK(line == "x1,y1,value,class,mask");
    int rows = 0;
    while (std::getline(csv, line)) {
        double x = 0, y = 0, v = 0;
        CHECK(std::sscanf(line.c_str(), "%lf,%lf,%lf", &x, &y, &v) == 3);
        CHECK(v == std::max(x, 0.0));
        ++rows;
    }
    CHECK(rows == 81);
}
