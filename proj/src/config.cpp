#include "acx/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

namespace acx {

namespace {

const Json& require(const Json& j, const char* key) {
    if (!j.is_object() || !j.contains(key)) throw InputError(std::string("missing field \"") + key + "\"");
    return j.at(key);
}

double number_or(const Json& j, const char* key, double fallback) {
    if (!j.is_object() || !j.contains(key)) return fallback;
    if (!j.at(key).is_number()) throw InputError(std::string("field \"") + key + "\" must be a number");
    return j.at(key).get<double>();
}

Vec vec_from(const Json& j, int dim, const char* what) {
    if (!j.is_array() || static_cast<int>(j.size()) != dim)
        throw InputError(std::string(what) + " must be an array of length " + std::to_string(dim));
    Vec v(dim);
    for (int k = 0; k < dim; ++k) v(k) = j.at(k).get<double>();
    return v;
}

}  // namespace

DomainPtr parse_domain(const Json& j) {
    const std::string shape = require(j, "shape").get<std::string>();
    const int n = require(j, "n").get<int>();
    const double h = require(j, "h").get<double>();
    const int rho = static_cast<int>(number_or(j, "rho", 2));
    if (n < 1 || n > kMaxComplexDim) throw InputError("domain.n must be in {1,2,3}");
    if (shape == "ball") {
        const Vec c = j.contains("center") ? vec_from(j.at("center"), 2 * n, "domain.center") : Vec::Zero(2 * n);
        return LatticeDomain::ball(n, c, number_or(j, "radius", 1.0), h, rho);
    }
    if (shape == "box") return LatticeDomain::box(n, number_or(j, "lo", -1.0), number_or(j, "hi", 1.0), h, rho);
    throw InputError("domain.shape must be \"ball\" or \"box\"");
}

AcxPtr parse_structure(const Json& j, int n) {
    if (j.is_null()) return make_standard(n);
    if (j.is_string()) return make_preset(j.get<std::string>(), n, {});
    const std::string id = j.contains("preset") ? j.at("preset").get<std::string>() : "standard";
    ParamMap params;
    if (j.contains("params")) {
        for (const auto& [k, v] : j.at("params").items()) params[k] = v.get<double>();
    }
    return make_preset(id, n, params);
}

ScalarFn parse_rhs(const Json* j) {
    if (j == nullptr || j->is_null()) return {};
    if (j->is_number()) {
        const double v = j->get<double>();
        if (!(v >= 0.0)) throw InputError("f must be non-negative");
        return [v](const Vec&) { return v; };
    }
    const std::string type = require(*j, "type").get<std::string>();
    if (type == "constant") {
        const double v = require(*j, "value").get<double>();
        if (!(v >= 0.0)) throw InputError("f must be non-negative");
        return [v](const Vec&) { return v; };
    }
    if (type == "radial") {
        const auto r = require(*j, "r").get<std::vector<double>>();
        const auto f = require(*j, "f").get<std::vector<double>>();
        if (r.size() != f.size() || r.empty()) throw InputError("radial table needs matching non-empty r and f");
        if (!std::is_sorted(r.begin(), r.end())) throw InputError("radial table r must be increasing");
        for (double v : f)
            if (!(v >= 0.0)) throw InputError("f must be non-negative");
        return [r, f](const Vec& x) {
            const double t = x.norm();
            if (t <= r.front()) return f.front();
            if (t >= r.back()) return f.back();
            const size_t k = std::upper_bound(r.begin(), r.end(), t) - r.begin();
            const double w = (t - r[k - 1]) / (r[k] - r[k - 1]);
            return (1 - w) * f[k - 1] + w * f[k];
        };
    }
    throw InputError("unknown f type '" + type + "'");
}

ScalarFn parse_function(const Json& j, int dim) {
    const Json spec = j.is_string() ? Json{{"preset", j.get<std::string>()}} : j;
    const std::string id = require(spec, "preset").get<std::string>();
    if (id == "zero") return [](const Vec&) { return 0.0; };
    if (id == "constant") {
        const double v = number_or(spec, "value", 0.0);
        return [v](const Vec&) { return v; };
    }
    if (id == "abs2") return [](const Vec& x) { return x.squaredNorm(); };
    if (id == "neg-abs2") return [](const Vec& x) { return -x.squaredNorm(); };
    if (id == "abs2-z1") return [](const Vec& x) { return x(0) * x(0) + x(1) * x(1); };
    if (id == "re-z1-squared") return [](const Vec& x) { return x(0) * x(0) - x(1) * x(1); };
    if (id == "re-z1z2") {
        if (dim < 4) throw InputError("re-z1z2 needs n >= 2");
        return [](const Vec& x) { return x(0) * x(2) - x(1) * x(3); };
    }
    if (id == "max-x1") return [](const Vec& x) { return std::max(x(0), 0.0); };
    if (id == "sphere-demo") {
        const double c = number_or(spec, "C", 2.0);
        return [c](const Vec& x) { return 0.5 * x.squaredNorm() - c * x(0); };
    }
    if (id == "quadratic") {
        Mat q(dim, dim);
        const Json& jq = require(spec, "Q");
        if (!jq.is_array() || static_cast<int>(jq.size()) != dim) throw InputError("quadratic.Q has wrong shape");
        for (int r = 0; r < dim; ++r) q.row(r) = vec_from(jq.at(r), dim, "quadratic.Q row").transpose();
        const Vec p = spec.contains("p") ? vec_from(spec.at("p"), dim, "quadratic.p") : Vec::Zero(dim);
        const double c = number_or(spec, "c", 0.0);
        const Mat qs = symmetrize(q);
        return [qs, p, c](const Vec& x) { return 0.5 * x.dot(qs * x) + p.dot(x) + c; };
    }
    if (id == "trig") {
        struct Term {
            double a;
            Vec k;
            bool cosine;
        };
        std::vector<Term> terms;
        for (const Json& t : require(spec, "terms")) {
            const std::string kind = t.contains("kind") ? t.at("kind").get<std::string>() : "cos";
            if (kind != "cos" && kind != "sin") throw InputError("trig term kind must be cos or sin");
            terms.push_back({number_or(t, "a", 1.0), vec_from(require(t, "k"), dim, "trig.k"), kind == "cos"});
        }
        return [terms](const Vec& x) {
            double s = 0.0;
            for (const Term& t : terms) s += t.a * (t.cosine ? std::cos(t.k.dot(x)) : std::sin(t.k.dot(x)));
            return s;
        };
    }
    throw InputError("unknown function preset '" + id + "'");
}

ScalarField parse_field(const Json& j, const DomainPtr& domain) {
    if (j.is_object() && j.contains("csv")) {
        const std::string path = j.at("csv").get<std::string>();
        std::ifstream in(path);
        if (!in) throw InputError("cannot open field CSV '" + path + "'");
        return read_csv(domain, in);
    }
    return sample(domain, parse_function(j, domain->dim()));
}

SchemeParams parse_scheme(const Json* j) {
    SchemeParams sp;
    if (j == nullptr || j->is_null()) return sp;
    sp.tol_res = number_or(*j, "tol_res", sp.tol_res);
    sp.max_iterations = static_cast<long>(number_or(*j, "max_iterations", static_cast<double>(sp.max_iterations)));
    sp.tau = number_or(*j, "tau", sp.tau);
    sp.policy_refresh = static_cast<int>(number_or(*j, "policy_refresh", sp.policy_refresh));
    sp.adapted_cap = number_or(*j, "adapted_cap", sp.adapted_cap);
    sp.init_constant = number_or(*j, "init_constant", sp.init_constant);
    if (j->contains("fixed_family")) sp.use_fixed_family = j->at("fixed_family").get<bool>();
    return sp;
}

DirichletProblem parse_problem(const Json& j) {
    DirichletProblem p;
    p.domain = parse_domain(require(j, "domain"));
    const int n = p.domain->n();
    const AcxPtr acx = parse_structure(j.contains("structure") ? j.at("structure") : Json(), n);
    ScalarFn f = parse_rhs(j.contains("f") ? &j.at("f") : nullptr);
    p.sub = f ? inhomogeneous(acx, f) : inhomogeneous(acx, 0.0);
    const Json& phi = require(j, "phi");
    if (phi.is_object() && phi.contains("csv")) {
        const ScalarField table = parse_field(phi, p.domain);
        const DomainPtr dom = p.domain;
        p.phi = [table, dom](const Vec& x) {
            const NodeId id = dom->locate(x);
            if (id < 0) throw InputError("boundary CSV has no value at a boundary node");
            return table[id];
        };
    } else {
        p.phi = parse_function(phi, p.domain->dim());
    }
    p.scheme = parse_scheme(j.contains("scheme") ? &j.at("scheme") : nullptr);
    return p;
}

Json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open config '" + path + "'");
    try {
        return Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw InputError(std::string("malformed JSON: ") + e.what());
    }
}

Json to_json(const Vec& v) {
    Json a = Json::array();
    for (int k = 0; k < v.size(); ++k) a.push_back(v(k));
    return a;
}

Json to_json(const CMat& m) {
    Json rows = Json::array();
    for (int r = 0; r < m.rows(); ++r) {
        Json row = Json::array();
        for (int c = 0; c < m.cols(); ++c) row.push_back(Json::array({m(r, c).real(), m(r, c).imag()}));
        rows.push_back(row);
    }
    return rows;
}

}  // namespace acx
