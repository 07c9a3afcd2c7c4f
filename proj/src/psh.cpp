#include "acx/psh.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <optional>

#include "acx/parallel.hpp"

namespace acx {

double local_tolerance(const ScalarField& u, NodeId node) {
    const LatticeDomain& dom = *u.domain;
    double scale = std::abs(u.values[node]);
    for (int i = 0; i < dom.dim(); ++i) {
        scale = std::max(scale, std::abs(u.values[node + dom.stride(i)]));
        scale = std::max(scale, std::abs(u.values[node - dom.stride(i)]));
    }
    return 10.0 * dom.h() * dom.h() * scale;
}

namespace {

struct NodeScore {
    double value;
    double tol;
    int witness = -1;
};

PshReport reduce(const ScalarField& u, const std::vector<NodeScore>& scores) {
    const auto& nodes = u.domain->interior();
    PshReport rep;
    rep.verdict = true;
    rep.margin = std::numeric_limits<double>::infinity();
    for (size_t k = 0; k < nodes.size(); ++k) {
        if (scores[k].value < -scores[k].tol) rep.verdict = false;
        if (scores[k].value < rep.margin) {
            rep.margin = scores[k].value;
            rep.worst = nodes[k];
            rep.tol = scores[k].tol;
        }
    }
    if (rep.worst >= 0) rep.worst_x = u.domain->position(rep.worst);
    return rep;
}

void require_interior_nodes(const ScalarField& u) {
    if (u.domain->interior().empty()) throw InputError("domain too coarse: no interior nodes");
}

}  // namespace

PshReport psh_margin(const ScalarField& u, const Subequation& sub, double tol) {
    require_interior_nodes(u);
    if (sub.acx->n() != u.domain->n()) throw InputError("field and structure dimensions differ");
    const auto& nodes = u.domain->interior();
    std::vector<NodeScore> scores(nodes.size());
    parallel_for(static_cast<std::int64_t>(nodes.size()), [&](std::int64_t k) {
        const NodeId id = nodes[k];
        const Vec x = u.domain->position(id);
        const double t = tol >= 0.0 ? tol : local_tolerance(u, id);
        scores[k] = {contains(sub, x, fd_jet(u, id), t).margin, t};
    });
    return reduce(u, scores);
}

SliceCompatibility slice_compatibility(const AlmostComplexField& acx, int m, const std::vector<Vec>& points,
                                       double tol) {
    const int n = acx.n();
    if (m < 1 || m > n) throw InputError("slice dimension must satisfy 1 <= m <= n");
    const int ds = 2 * m, d = 2 * n;
    SliceCompatibility out;
    out.compatible = true;
    for (const Vec& x : points) {
        const AntilinearFactor fac = antilinear_normalize(acx, x);
        double f21 = 0.0, eterm = 0.0;
        if (ds < d) f21 = fac.f.bottomLeftCorner(d - ds, ds).cwiseAbs().maxCoeff();
        for (int k = ds; k < d; ++k)
            eterm = std::max(eterm, lower_order_e(acx, x, Vec::Unit(d, k)).topLeftCorner(ds, ds).cwiseAbs().maxCoeff());
        if (f21 > out.f21 || eterm > out.e_term) out.worst_x = x;
        out.f21 = std::max(out.f21, f21);
        out.e_term = std::max(out.e_term, eterm);
    }
    out.compatible = out.f21 <= tol && out.e_term <= tol;
    return out;
}

namespace {

SliceCompatibility slice_scan(const AlmostComplexField& acx, int m, const LatticeDomain& domain, double tol) {
    const DomainPtr sd = domain.slice(m);
    std::vector<Vec> points;
    for (NodeId id = 0; id < sd->size(); ++id) {
        if (sd->node_class(id) == NodeClass::exterior) continue;
        Vec x = Vec::Zero(acx.dim());
        x.head(2 * m) = sd->position(id);
        points.push_back(x);
    }
    return slice_compatibility(acx, m, points, tol);
}

}  // namespace

bool slice_compatible(const AlmostComplexField& acx, int m, const LatticeDomain& domain, double tol) {
    return slice_scan(acx, m, domain, tol).compatible;
}

RestrictionReport restriction_check(const ScalarField& u, const Subequation& sub, int m, double tol,
                                    double slack_per_h) {
    const SliceCompatibility sc = slice_scan(*sub.acx, m, *u.domain, 1e-8);
    if (!sc.compatible) {
        char buf[256];
        std::snprintf(buf, sizeof buf,
                      "slice C^%d x {0} is not J-compatible: max |f21| = %.3g, max slice E term = %.3g "
                      "(both must vanish on the slice)",
                      m, sc.f21, sc.e_term);
        throw IncompatibleSlice(buf);
    }
    RestrictionReport rep;
    const Subequation amb = homogeneous(sub.acx);
    rep.ambient = psh_margin(u, amb, tol);
    const ScalarField us = restrict_to_slice(u, m);
    const Subequation ss = homogeneous(m == sub.acx->n() ? sub.acx : make_slice_structure(sub.acx, m));
    rep.slice = psh_margin(us, ss, tol);
    rep.slack = slack_per_h * u.domain->h();
    rep.pass = !rep.ambient.verdict || rep.slice.margin >= -rep.slice.tol - rep.slack;
    return rep;
}

double blaplacian(const ScalarField& u, const Subequation& sub, NodeId node, const CMat& b) {
    const LatticeDomain& dom = *u.domain;
    if (node < 0 || node >= dom.size() || dom.node_class(node) != NodeClass::interior)
        throw InputError("blaplacian needs an interior node");
    const PointGeometry geo = point_geometry(*sub.acx, dom.position(node));
    return compile_blaplacian(dom, dom.stencil_radius(node), geo, b).apply(u.values, node);
}

PshReport psh_via_blaplacians(const ScalarField& u, const Subequation& sub, const std::vector<CMat>& family,
                              double tol) {
    if (family.empty()) throw InputError("B family is empty");
    for (const CMat& b : family) check_unit_hermitian(b);
    require_interior_nodes(u);
    const LatticeDomain& dom = *u.domain;
    const auto& nodes = dom.interior();
    std::optional<PointGeometry> shared;
    if (sub.acx->is_constant()) shared = point_geometry(*sub.acx, dom.position(nodes.front()));
    std::vector<NodeScore> scores(nodes.size());
    std::vector<CMat> adapted(nodes.size());
    parallel_for(static_cast<std::int64_t>(nodes.size()), [&](std::int64_t k) {
        const NodeId id = nodes[k];
        const Vec x = dom.position(id);
        const PointGeometry geo = shared ? *shared : point_geometry(*sub.acx, x);
        const int r = dom.stencil_radius(id);
        double best = std::numeric_limits<double>::infinity();
        int arg = -1;
        for (size_t q = 0; q < family.size(); ++q) {
            const double v = 0.25 * compile_blaplacian(dom, r, geo, family[q]).apply(u.values, id);
            if (v < best) {
                best = v;
                arg = static_cast<int>(q);
            }
        }
        const CMat hc = complexify(transported_form(*sub.acx, x, fd_jet(u, id)), 1e-8);
        adapted[k] = adapted_b(hc);
        const double v = 0.25 * compile_blaplacian(dom, r, geo, adapted[k]).apply(u.values, id);
        if (v < best) {
            best = v;
            arg = -1;
        }
        scores[k] = {best, tol >= 0.0 ? tol : local_tolerance(u, id), arg};
    });
    PshReport rep = reduce(u, scores);
    for (size_t k = 0; k < nodes.size(); ++k) {
        if (nodes[k] != rep.worst) continue;
        rep.witness = scores[k].witness >= 0 ? family[scores[k].witness] : adapted[k];
    }
    return rep;
}

}  // namespace acx
