#include "acx/potential.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "acx/parallel.hpp"

namespace acx {

Stencil LinearOperator::stencil(const LatticeDomain& dom, NodeId node) const {
    const Vec x = dom.position(node);
    const int r = dom.stencil_radius(node);
    if (sub) return compile_blaplacian(dom, r, point_geometry(*sub->acx, x), bform);
    return compile_linear(dom, r, a(x), b(x));
}

LinearOperator laplacian(int n) {
    const int d = 2 * n;
    return {[d](const Vec&) -> Mat { return Mat::Identity(d, d); }, [d](const Vec&) -> Vec { return Vec::Zero(d); },
            "laplacian", std::nullopt, {}};
}

LinearOperator anisotropic(const Vec& weights) {
    if (!(weights.minCoeff() > 0.0)) throw InputError("anisotropic weights must be positive");
    const int d = static_cast<int>(weights.size());
    return {[weights](const Vec&) -> Mat { return Mat(weights.asDiagonal()); },
            [d](const Vec&) -> Vec { return Vec::Zero(d); }, "anisotropic", std::nullopt, {}};
}

LinearOperator from_blaplacian(const Subequation& sub, const CMat& b) {
    check_unit_hermitian(b);
    auto acx = sub.acx;
    LinearOperator op;
    op.a = [acx, b](const Vec& x) -> Mat { return blaplacian_symbol(point_geometry(*acx, x), b); };
    op.b = [acx, b](const Vec& x) -> Vec {
        const PointGeometry geo = point_geometry(*acx, x);
        return blaplacian_drift(geo, blaplacian_symbol(geo, b));
    };
    op.provenance = "derived-from-B";
    op.sub = sub;
    op.bform = b;
    return op;
}

void check_operator(const LinearOperator& op, const LatticeDomain& dom) {
    for (NodeId id : dom.interior())
        if (!(min_eigenvalue(op.a(dom.position(id))) > 0.0))
            throw InputError("operator coefficient a is not positive definite");
}

LinearReport viscosity_subharmonic(const ScalarField& u, const LinearOperator& op, double tol) {
    const auto& nodes = u.domain->interior();
    if (nodes.empty()) throw InputError("domain has no interior nodes");
    std::vector<double> vals(nodes.size());
    parallel_for(static_cast<std::int64_t>(nodes.size()), [&](std::int64_t k) {
        const Vec x = u.domain->position(nodes[k]);
        const ReducedJet jet = fd_jet(u, nodes[k]);
        vals[k] = (op.a(x).cwiseProduct(jet.a)).sum() + op.b(x).dot(jet.p);
    });
    LinearReport rep;
    rep.margin = std::numeric_limits<double>::infinity();
    for (size_t k = 0; k < nodes.size(); ++k)
        if (vals[k] < rep.margin) {
            rep.margin = vals[k];
            rep.worst = nodes[k];
        }
    rep.verdict = rep.margin >= -tol;
    return rep;
}

namespace {

DomainPtr ball_domain(const LatticeDomain& dom, const LatticeBall& ball) {
    if (dom.locate(ball.center) < 0) throw InputError("ball center must be a lattice node");
    DomainPtr bd = LatticeDomain::ball(dom.n(), ball.center, ball.radius, dom.h(), dom.rho());
    for (NodeId id = 0; id < bd->size(); ++id) {
        if (bd->node_class(id) == NodeClass::exterior) continue;
        const NodeId src = dom.locate(bd->position(id));
        if (src < 0 || dom.node_class(src) == NodeClass::exterior) throw InputError("ball leaves the domain");
    }
    if (bd->interior().empty()) throw InputError("ball has no interior nodes");
    return bd;
}

}  // namespace

ScalarField harmonic_replacement(const ScalarField& u, const LinearOperator& op, const LatticeBall& ball,
                                 double tol_res, long max_sweeps) {
    const DomainPtr bd = ball_domain(*u.domain, ball);
    ScalarField out{bd, std::vector<double>(bd->size(), std::nan("")), {}};
    std::vector<NodeId> src(bd->size(), -1);
    for (NodeId id = 0; id < bd->size(); ++id) {
        if (bd->node_class(id) == NodeClass::exterior) continue;
        src[id] = u.domain->locate(bd->position(id));
        out.values[id] = u[src[id]];
    }
    const auto& nodes = bd->interior();
    std::vector<Stencil> st(nodes.size());
    for (size_t k = 0; k < nodes.size(); ++k) {
        st[k] = op.stencil(*bd, nodes[k]);
        if (!(st[k].diag > 0.0)) throw NumericalError("degenerate operator stencil");
    }
    // Start from the boundary mean so the sweep count does not depend on interior samples.
    double mean = 0.0;
    for (NodeId id : bd->boundary()) mean += out.values[id];
    mean /= static_cast<double>(bd->boundary().size());
    for (NodeId id : nodes) out.values[id] = mean;
    std::vector<double> next = out.values;
    for (long sweep = 0;; ++sweep) {
        double resid = 0.0;
        for (size_t k = 0; k < nodes.size(); ++k) {
            const double lv = st[k].apply(out.values, nodes[k]);
            resid = std::max(resid, std::abs(lv) / st[k].diag);
            next[nodes[k]] = out.values[nodes[k]] + lv / st[k].diag;
        }
        if (!std::isfinite(resid)) throw NumericalError("harmonic replacement diverged");
        if (resid <= tol_res) break;
        if (sweep >= max_sweeps) throw NumericalError("harmonic replacement did not converge");
        out.values.swap(next);
    }
    return out;
}

ClassicalReport classical_subharmonic(const ScalarField& u, const LinearOperator& op,
                                      const std::vector<LatticeBall>& balls, double tol_cmp) {
    if (balls.empty()) throw InputError("ball battery is empty");
    ClassicalReport rep;
    rep.worst_excess = -std::numeric_limits<double>::infinity();
    for (size_t q = 0; q < balls.size(); ++q) {
        const ScalarField h = harmonic_replacement(u, op, balls[q]);
        for (NodeId id = 0; id < h.domain->size(); ++id) {
            if (h.domain->node_class(id) == NodeClass::exterior) continue;
            const double excess = u[u.domain->locate(h.domain->position(id))] - h[id];
            if (excess > rep.worst_excess) {
                rep.worst_excess = excess;
                rep.witness_ball = static_cast<int>(q);
            }
        }
    }
    rep.verdict = rep.worst_excess <= tol_cmp;
    return rep;
}

double Bump::operator()(const Vec& x) const {
    const double t = 1.0 - (x - center).squaredNorm() / (radius * radius);
    return t > 0.0 ? t * t * t : 0.0;
}

double Bump::mass() const {
    const double d = static_cast<double>(center.size());
    const double sphere = 2.0 * std::pow(std::numbers::pi, d / 2.0) / std::tgamma(d / 2.0);
    const double beta = std::tgamma(d / 2.0) * std::tgamma(4.0) / std::tgamma(d / 2.0 + 4.0);
    return sphere * std::pow(radius, d) * 0.5 * beta;
}

double distributional_pairing(const ScalarField& u, const LinearOperator& op, const Bump& bump) {
    const LatticeDomain& dom = *u.domain;
    const int d = dom.dim();
    const double h = dom.h();
    const double reach = bump.radius + 2.0 * h * std::sqrt(static_cast<double>(d));
    for (NodeId id = 0; id < dom.size(); ++id) {
        if ((dom.position(id) - bump.center).norm() <= reach && dom.node_class(id) != NodeClass::interior)
            throw InputError("bump support is too close to the boundary");
    }
    auto coef = [&](const Vec& x, int i, int j) { return op.a(x)(i, j) * bump(x); };
    auto drift = [&](const Vec& x, int i) { return op.b(x)(i) * bump(x); };
    double total = 0.0;
    for (NodeId id = 0; id < dom.size(); ++id) {
        const Vec x = dom.position(id);
        if ((x - bump.center).norm() > bump.radius + 1.5 * h * std::sqrt(static_cast<double>(d))) continue;
        double lt = 0.0;
        for (int i = 0; i < d; ++i) {
            const Vec ei = h * Vec::Unit(d, i);
            lt += (coef(x + ei, i, i) - 2.0 * coef(x, i, i) + coef(x - ei, i, i)) / (h * h);
            for (int j = 0; j < d; ++j) {
                if (j == i) continue;
                const Vec ej = h * Vec::Unit(d, j);
                lt += (coef(x + ei + ej, i, j) - coef(x + ei - ej, i, j) - coef(x - ei + ej, i, j) +
                       coef(x - ei - ej, i, j)) /
                      (4.0 * h * h);
            }
            lt -= (drift(x + ei, i) - drift(x - ei, i)) / (2.0 * h);
        }
        if (lt != 0.0) total += u[id] * lt;
    }
    return total * std::pow(h, d);
}

ScalarField ess_usc_regularize(const ScalarField& u) {
    const LatticeDomain& dom = *u.domain;
    ScalarField out = u;
    if (!u.has_mask()) return out;
    const int d = dom.dim();
    int max_r = 0;
    for (int k = 0; k < d; ++k) max_r = std::max(max_r, dom.axis_count(k));
    for (NodeId id = 0; id < dom.size(); ++id) {
        if (dom.node_class(id) == NodeClass::exterior || !u.masked(id)) continue;
        bool found = false;
        for (int rad = 1; rad <= max_r && !found; ++rad) {
            // Every offset with |w|^2 <= rad^2 lies in the cube |w|_inf <= rad.
            int best_r2 = rad * rad + 1;
            double best = -std::numeric_limits<double>::infinity();
            const int side = 2 * rad + 1;
            long total = 1;
            for (int k = 0; k < d; ++k) total *= side;
            for (long code = 0; code < total; ++code) {
                Offset w(d);
                long c = code;
                for (int k = d - 1; k >= 0; --k) {
                    w(k) = static_cast<int>(c % side) - rad;
                    c /= side;
                }
                const int r2 = w.squaredNorm();
                if (r2 == 0 || r2 > best_r2) continue;
                const NodeId nb = dom.neighbor(id, w);
                if (nb < 0 || u.masked(nb)) continue;
                if (r2 < best_r2) {
                    best_r2 = r2;
                    best = u[nb];
                } else {
                    best = std::max(best, u[nb]);
                }
            }
            if (best_r2 <= rad * rad) {
                out.values[id] = best;
                found = true;
            }
        }
        if (!found) throw InputError("node has no unmasked neighbours at any radius");
    }
    return out;
}

}  // namespace acx
