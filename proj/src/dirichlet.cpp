#include "acx/dirichlet.hpp"

#include <chrono>
#include <cmath>
#include <optional>

#include "acx/parallel.hpp"

namespace acx {

double DirichletProblem::tol_res() const {
    return scheme.tol_res >= 0.0 ? scheme.tol_res : 0.1 * domain->h() * domain->h();
}

const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::pass: return "PASS";
        case Verdict::fail: return "FAIL";
        default: return "INCONCLUSIVE";
    }
}

namespace {

double rhs_term(const Subequation& sub, const Vec& x) {
    const int n = sub.acx->n();
    return n * std::pow(sub.rhs(x), 1.0 / n);
}

CMat adapted_at(const ScalarField& u, const Subequation& sub, NodeId node, double cap) {
    const Vec x = u.domain->position(node);
    return adapted_b(complexify(transported_form(*sub.acx, x, fd_jet(u, node)), 1e-8), 1e-8, cap);
}

/// Precompiled Bellman family on the interior nodes of a domain.
class Scheme {
public:
    Scheme(const DomainPtr& dom, const Subequation& sub, const SchemeParams& params)
        : dom_(dom), sub_(sub), params_(params), n_(sub.acx->n()) {
        const auto& nodes = dom->interior();
        if (nodes.empty()) throw InputError("domain has no interior nodes");
        family_ = params.use_fixed_family ? fixed_b_family(n_) : std::vector<CMat>{CMat::Identity(n_, n_)};
        with_adapted_ = n_ > 1;
        rhs_.resize(nodes.size());
        base_.resize(nodes.size());
        adapted_.resize(with_adapted_ ? nodes.size() : 0);
        if (sub.acx->is_constant()) {
            shared_ = point_geometry(*sub.acx, dom->position(nodes.front()));
            std::vector<int> first(dom->rho() + 1, -1);
            for (size_t k = 0; k < nodes.size(); ++k) {
                const int r = dom->stencil_radius(nodes[k]);
                if (first[r] < 0) {
                    first[r] = static_cast<int>(pool_.size());
                    for (const CMat& b : family_) pool_.push_back(compile_blaplacian(*dom, r, *shared_, b));
                }
                base_[k] = first[r];
            }
        } else {
            pool_.resize(nodes.size() * family_.size());
            parallel_for(static_cast<std::int64_t>(nodes.size()), [&](std::int64_t k) {
                const PointGeometry geo = point_geometry(*sub.acx, dom->position(nodes[k]));
                for (size_t q = 0; q < family_.size(); ++q)
                    pool_[k * family_.size() + q] = compile_blaplacian(*dom, dom->stencil_radius(nodes[k]), geo, family_[q]);
            });
            for (size_t k = 0; k < nodes.size(); ++k) base_[k] = static_cast<int>(k * family_.size());
        }
        for (size_t k = 0; k < nodes.size(); ++k) rhs_[k] = rhs_term(sub, dom->position(nodes[k]));
    }

    void refresh(const ScalarField& u) {
        if (!with_adapted_) return;
        const auto& nodes = dom_->interior();
        parallel_for(static_cast<std::int64_t>(nodes.size()), [&](std::int64_t k) {
            const NodeId id = nodes[k];
            const PointGeometry geo = shared_ ? *shared_ : point_geometry(*sub_.acx, dom_->position(id));
            adapted_[k] = compile_blaplacian(*dom_, dom_->stencil_radius(id), geo,
                                             adapted_at(u, sub_, id, params_.adapted_cap));
        });
    }

    /// theta[k] and the active diagonal (already scaled by 1/4).
    void evaluate(const std::vector<double>& u, std::vector<double>& theta, std::vector<double>& diag) const {
        const auto& nodes = dom_->interior();
        const size_t nf = family_.size();
        parallel_for(static_cast<std::int64_t>(nodes.size()), [&](std::int64_t k) {
            const NodeId id = nodes[k];
            double best = std::numeric_limits<double>::infinity(), d = 0.0;
            for (size_t q = 0; q < nf; ++q) {
                const Stencil& st = pool_[base_[k] + q];
                const double v = st.apply(u, id);
                if (v < best) {
                    best = v;
                    d = st.diag;
                }
            }
            if (with_adapted_) {
                const double v = adapted_[k].apply(u, id);
                if (v < best) {
                    best = v;
                    d = adapted_[k].diag;
                }
            }
            theta[k] = 0.25 * best - rhs_[k];
            diag[k] = 0.25 * d;
        });
    }

private:
    DomainPtr dom_;
    Subequation sub_;
    SchemeParams params_;
    int n_;
    std::vector<CMat> family_;
    bool with_adapted_ = false;
    std::optional<PointGeometry> shared_;
    std::vector<Stencil> pool_;
    std::vector<int> base_;
    std::vector<Stencil> adapted_;
    std::vector<double> rhs_;
};

double sup_norm(const std::vector<double>& v) {
    double m = 0.0;
    for (double t : v) {
        if (!std::isfinite(t)) throw NumericalError("non-finite residual in the Bellman iteration");
        m = std::max(m, std::abs(t));
    }
    return m;
}

}  // namespace

double bellman_residual(const ScalarField& u, const Subequation& sub, NodeId node) {
    const LatticeDomain& dom = *u.domain;
    if (node < 0 || node >= dom.size() || dom.node_class(node) != NodeClass::interior)
        throw InputError("bellman_residual needs an interior node");
    const Vec x = dom.position(node);
    const PointGeometry geo = point_geometry(*sub.acx, x);
    const int r = dom.stencil_radius(node);
    const int n = sub.acx->n();
    double best = std::numeric_limits<double>::infinity();
    std::vector<CMat> family = fixed_b_family(n);
    if (n > 1) family.push_back(adapted_at(u, sub, node, 0.0));
    for (const CMat& b : family) best = std::min(best, compile_blaplacian(dom, r, geo, b).apply(u.values, node));
    return 0.25 * best - rhs_term(sub, x);
}

void certify(const ScalarField& u, const Subequation& sub, double& sub_margin, double& dual_margin) {
    const auto& nodes = u.domain->interior();
    std::vector<double> m(nodes.size());
    parallel_for(static_cast<std::int64_t>(nodes.size()), [&](std::int64_t k) {
        m[k] = contains(sub, u.domain->position(nodes[k]), fd_jet(u, nodes[k])).margin;
    });
    sub_margin = std::numeric_limits<double>::infinity();
    double top = -std::numeric_limits<double>::infinity();
    for (double v : m) {
        sub_margin = std::min(sub_margin, v);
        top = std::max(top, v);
    }
    dual_margin = -top;
}

SolveResult solve(const DirichletProblem& problem) {
    const auto start = std::chrono::steady_clock::now();
    if (!problem.domain) throw InputError("problem has no domain");
    if (!problem.sub.acx) throw InputError("problem has no structure");
    if (!problem.phi) throw InputError("problem has no boundary datum");
    if (problem.sub.acx->n() != problem.domain->n()) throw InputError("structure and domain dimensions differ");
    const SchemeParams& sp = problem.scheme;
    if (sp.max_iterations < 0 || sp.policy_refresh < 1) throw InputError("invalid scheme parameters");
    const LatticeDomain& dom = *problem.domain;
    const auto& nodes = dom.interior();

    SolveResult res{ScalarField{problem.domain, std::vector<double>(dom.size(), std::nan("")), {}}, {}};
    SolveReport& rep = res.report;
    rep.tol_res = problem.tol_res();
    std::vector<double>& u = res.u.values;

    double phi_min = std::numeric_limits<double>::infinity();
    for (NodeId id : dom.boundary()) {
        const double v = problem.phi(dom.position(id));
        if (!std::isfinite(v)) throw InputError("boundary datum is not finite");
        u[id] = v;
        phi_min = std::min(phi_min, v);
    }
    if (dom.boundary().empty()) throw InputError("domain has no boundary nodes");

    const Vec x0 = dom.shape() == Shape::ball ? dom.center() : Vec::Constant(dom.dim(), 0.5 * (dom.lo() + dom.hi()));
    double r2 = 0.0;
    for (NodeId id : dom.boundary()) r2 = std::max(r2, (dom.position(id) - x0).squaredNorm());

    Scheme scheme(problem.domain, problem.sub, sp);
    std::vector<double> theta(nodes.size()), diag(nodes.size());

    double c = sp.init_constant > 0.0 ? sp.init_constant : 1.0;
    constexpr double kInitCap = 1048576.0;
    for (;;) {
        for (NodeId id : nodes) u[id] = phi_min + c * ((dom.position(id) - x0).squaredNorm() - r2);
        scheme.refresh(res.u);
        scheme.evaluate(u, theta, diag);
        double worst = std::numeric_limits<double>::infinity();
        for (double t : theta) worst = std::min(worst, t);
        if (worst >= -1e-12 * std::max(1.0, c)) {
            rep.init_ok = true;
            break;
        }
        if (c >= kInitCap) break;
        c *= 2.0;
    }
    rep.init_constant = c;

    std::vector<double> next = u;
    long it = 0;
    double resid = sup_norm(theta);
    bool fresh = true;
    while (true) {
        if (resid <= rep.tol_res) {
            if (fresh) {
                rep.converged = true;
                break;
            }
            scheme.refresh(res.u);
            scheme.evaluate(u, theta, diag);
            resid = sup_norm(theta);
            fresh = true;
            continue;
        }
        if (it >= sp.max_iterations) break;
        double dmax = 0.0;
        for (double d : diag) dmax = std::max(dmax, d);
        const double tau = sp.tau > 0.0 ? sp.tau : (dmax > 0.0 ? 0.9 / dmax : 0.0);
        rep.tau = tau;
        for (size_t k = 0; k < nodes.size(); ++k) next[nodes[k]] = u[nodes[k]] + tau * theta[k];
        u.swap(next);
        ++it;
        fresh = false;
        if (it % sp.policy_refresh == 0) {
            scheme.refresh(res.u);
            fresh = true;
        }
        scheme.evaluate(u, theta, diag);
        resid = sup_norm(theta);
    }
    rep.iterations = it;
    rep.residual = resid;
    certify(res.u, problem.sub, rep.subsolution_margin, rep.dual_margin);
    rep.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return res;
}

ComparisonReport comparison_check(const ScalarField& u, const ScalarField& w, const Subequation& sub,
                                  double tol_res) {
    if (u.domain != w.domain && (u.domain->size() != w.domain->size()))
        throw InputError("comparison fields live on different domains");
    const LatticeDomain& dom = *u.domain;
    ComparisonReport rep;
    rep.tol_cmp = 10.0 * (tol_res + dom.h());
    rep.max_excess = -std::numeric_limits<double>::infinity();
    rep.boundary_excess = -std::numeric_limits<double>::infinity();
    rep.w_margin = -std::numeric_limits<double>::infinity();
    for (NodeId id : dom.interior())
        rep.w_margin = std::max(rep.w_margin, contains(sub, dom.position(id), fd_jet(w, id)).margin);
    for (NodeId id : dom.boundary()) rep.boundary_excess = std::max(rep.boundary_excess, u[id] - w[id]);
    for (NodeId id = 0; id < dom.size(); ++id)
        if (dom.node_class(id) != NodeClass::exterior) rep.max_excess = std::max(rep.max_excess, u[id] - w[id]);
    if (rep.w_margin > rep.tol_cmp || rep.boundary_excess > rep.tol_cmp) {
        rep.verdict = Verdict::inconclusive;
        return rep;
    }
    rep.verdict = rep.max_excess <= rep.tol_cmp ? Verdict::pass : Verdict::fail;
    return rep;
}

MaximalityReport maximality_check(const ScalarField& u, const DirichletProblem& problem, double tol_res) {
    const LatticeDomain& dom = *u.domain;
    const double tol_cmp = 10.0 * (tol_res + dom.h());
    const Subequation hom = homogeneous(problem.sub.acx);
    std::vector<ScalarField> battery;
    for (double c : {0.0, 0.1, 0.5}) {
        ScalarField v = u;
        for (double& t : v.values) t -= c;
        battery.push_back(v);
    }
    {
        ScalarField v = u;
        for (double& t : v.values) t += 0.25;
        battery.push_back(v);
    }
    const Vec x0 = dom.shape() == Shape::ball ? dom.center() : Vec::Constant(dom.dim(), 0.5 * (dom.lo() + dom.hi()));
    for (double a : {0.25, 1.0, 4.0}) {
        for (int axis = 0; axis < std::min(dom.dim(), 2); ++axis) {
            auto shape = [&](const Vec& x) { return a * (x - x0).squaredNorm() + 0.1 * x(axis); };
            double shift = std::numeric_limits<double>::infinity();
            for (NodeId id : dom.boundary()) shift = std::min(shift, u[id] - shape(dom.position(id)));
            ScalarField q = sample(problem.domain, [&](const Vec& x) { return shape(x) + shift - 0.01; });
            if (!psh_margin(q, hom).verdict) continue;
            ScalarField v = u;
            for (NodeId id = 0; id < dom.size(); ++id)
                if (dom.node_class(id) != NodeClass::exterior) v.values[id] = std::max(u[id] - 0.05, q[id]);
            battery.push_back(v);
        }
    }
    MaximalityReport rep;
    for (const ScalarField& v : battery) {
        bool dominated = true;
        for (NodeId id : dom.boundary())
            if (v[id] > u[id] + 1e-12) dominated = false;
        if (!dominated) {
            ++rep.skipped;
            continue;
        }
        ++rep.tested;
        double excess = -std::numeric_limits<double>::infinity();
        for (NodeId id = 0; id < dom.size(); ++id)
            if (dom.node_class(id) != NodeClass::exterior) excess = std::max(excess, v[id] - u[id]);
        rep.worst_excess = std::max(rep.worst_excess, excess);
        if (excess > tol_cmp) ++rep.violations;
    }
    rep.verdict = rep.tested == 0 ? Verdict::inconclusive : (rep.violations == 0 ? Verdict::pass : Verdict::fail);
    return rep;
}

}  // namespace acx
