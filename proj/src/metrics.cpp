#include "acx/metrics.hpp"

#include <cmath>

namespace acx {

HermitianMetric euclidean_metric(int n) {
    const int d = 2 * n;
    return {[d](const Vec&) -> Mat { return Mat::Identity(d, d); },
            [d](const Vec&) { return std::vector<Mat>(d, Mat::Zero(d, d)); }, "euclidean"};
}

HermitianMetric spherical_metric() {
    auto g = [](const Vec& x) -> Mat {
        const double s = 1.0 + x.squaredNorm();
        return Mat::Identity(4, 4) / (s * s);
    };
    auto gamma = [](const Vec& x) {
        const Vec psi = -2.0 * x / (1.0 + x.squaredNorm());
        std::vector<Mat> out(4, Mat::Zero(4, 4));
        for (int k = 0; k < 4; ++k)
            for (int i = 0; i < 4; ++i)
                for (int j = 0; j < 4; ++j)
                    out[k](i, j) = (i == k ? psi(j) : 0.0) + (j == k ? psi(i) : 0.0) - (i == j ? psi(k) : 0.0);
        return out;
    };
    return {g, gamma, "spherical"};
}

namespace {

Mat hessian_from_jet(const HermitianMetric& metric, const Vec& x, const ReducedJet& jet) {
    const std::vector<Mat> gam = metric.christoffel(x);
    Mat hess = jet.a;
    for (size_t k = 0; k < gam.size(); ++k) hess -= jet.p(static_cast<int>(k)) * gam[k];
    return symmetrize(hess);
}

Vec christoffel_apply(const std::vector<Mat>& gam, const Vec& a, const Vec& b) {
    Vec out(static_cast<int>(gam.size()));
    for (size_t k = 0; k < gam.size(); ++k) out(static_cast<int>(k)) = a.dot(gam[k] * b);
    return out;
}

struct Frame {
    Vec x, xs, xt, xss, xst, xtt;
};

Frame frame(const Surface& surf, double s, double t, double e) {
    Frame f;
    f.x = surf(s, t);
    const Vec sp = surf(s + e, t), sm = surf(s - e, t), tp = surf(s, t + e), tm = surf(s, t - e);
    f.xs = (sp - sm) / (2 * e);
    f.xt = (tp - tm) / (2 * e);
    f.xss = (sp - 2 * f.x + sm) / (e * e);
    f.xtt = (tp - 2 * f.x + tm) / (e * e);
    f.xst = (surf(s + e, t + e) - surf(s + e, t - e) - surf(s - e, t + e) + surf(s - e, t - e)) / (4 * e * e);
    return f;
}

}  // namespace

Mat riemannian_hessian(const HermitianMetric& metric, const ScalarField& u, NodeId node) {
    return hessian_from_jet(metric, u.domain->position(node), fd_jet(u, node));
}

HermitianForm hermitian_hessian(const HermitianMetric& metric, const Mat& j, const ScalarField& u, NodeId node) {
    const Vec x = u.domain->position(node);
    const Mat g = metric.g(x);
    if ((j.transpose() * g * j - g).cwiseAbs().maxCoeff() > 1e-8 * std::max(1.0, g.cwiseAbs().maxCoeff()))
        throw InputError("J is not orthogonal for the metric");
    return hermitian_part(riemannian_hessian(metric, u, node), j);
}

Surface round_sphere(double r) {
    if (!(r > 0.0)) throw InputError("sphere radius must be positive");
    return [r](double s, double t) -> Vec {
        const double rho2 = s * s + t * t;
        const double den = 4 * r * r + rho2;
        const double lam = 4 * r * r / den;
        Vec p(4);
        p << 2 * r * rho2 / den, 0.0, lam * s, lam * t;
        return p;
    };
}

Surface coordinate_line(const Vec& x0, int k) {
    if (k < 0 || 2 * k + 1 >= x0.size()) throw InputError("complex line index out of range");
    return [x0, k](double s, double t) -> Vec {
        Vec p = x0;
        p(2 * k) += s;
        p(2 * k + 1) += t;
        return p;
    };
}

Vec mean_curvature(const HermitianMetric& metric, const Surface& surf, double s, double t, double step) {
    const Frame f = frame(surf, s, t, step);
    const Mat g = metric.g(f.x);
    Eigen::Matrix2d gab;
    gab << f.xs.dot(g * f.xs), f.xs.dot(g * f.xt), f.xt.dot(g * f.xs), f.xt.dot(g * f.xt);
    if (!(std::abs(gab.determinant()) > 1e-14)) throw InputError("degenerate tangent frame");
    const Eigen::Matrix2d ginv = gab.inverse();
    const std::vector<Mat> gam = metric.christoffel(f.x);
    const Vec* tang[2] = {&f.xs, &f.xt};
    const Vec second[2][2] = {{f.xss, f.xst}, {f.xst, f.xtt}};
    auto normal = [&](const Vec& v) {
        Vec out = v;
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b) out -= ginv(a, b) * v.dot(g * *tang[a]) * *tang[b];
        return out;
    };
    Vec h = Vec::Zero(f.x.size());
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
            h += ginv(a, b) * normal(second[a][b] + christoffel_apply(gam, *tang[a], *tang[b]));
    return h;
}

SphereDemoReport sphere_demo_report(double c, double r) {
    if (!(c >= 0.0) || !(r > 0.0) || !std::isfinite(c) || !std::isfinite(r))
        throw InputError("sphere demo needs C >= 0 and r > 0");
    SphereDemoReport rep;
    rep.c = c;
    rep.r = r;
    const HermitianMetric metric = spherical_metric();
    const Surface sphere = round_sphere(r);
    auto u = [c](const Vec& x) { return 0.5 * x.squaredNorm() - c * x(0); };
    const double e = r / 64.0;

    // Conformal parametrization: Delta_Sigma = (U_ss + U_tt) / omega with omega = sigma(P) |P_s|^2.
    const Frame f = frame(sphere, 0.0, 0.0, e);
    const double omega = metric.g(f.x)(0, 0) * f.xs.squaredNorm();
    const double uss = (u(sphere(e, 0)) - 2 * u(f.x) + u(sphere(-e, 0))) / (e * e);
    const double utt = (u(sphere(0, e)) - 2 * u(f.x) + u(sphere(0, -e))) / (e * e);
    rep.laplacian = (uss + utt) / omega;

    // Same quantity through tr_{T Sigma} Hess u + H . Du on a lattice patch at the origin.
    const double h = 1.0 / 64.0;
    const DomainPtr patch = LatticeDomain::box(2, -2 * h, 2 * h, h, 1);
    const ScalarField us = sample(patch, u);
    const NodeId origin = patch->locate(Vec::Zero(4));
    const Mat hess = riemannian_hessian(metric, us, origin);
    const Vec p = fd_jet(us, origin).p;
    const Mat g0 = metric.g(f.x);
    const Vec es = f.xs / std::sqrt(f.xs.dot(g0 * f.xs));
    const Vec et = f.xt / std::sqrt(f.xt.dot(g0 * f.xt));
    rep.mean_curvature = mean_curvature(metric, sphere, 0.0, 0.0, e);
    rep.identity_value = es.dot(hess * es) + et.dot(hess * et) + rep.mean_curvature.dot(p);

    rep.expected = 2.0 - 2.0 * c / r;
    rep.deviation = std::abs(rep.laplacian - rep.expected);

    const AcxPtr acx = make_spherical_rotation(r);
    rep.hermitian_margin = std::numeric_limits<double>::infinity();
    for (NodeId id : patch->interior()) {
        const HermitianForm hc = hermitian_hessian(metric, acx->J(patch->position(id)), us, id);
        rep.hermitian_margin = std::min(rep.hermitian_margin, 0.5 * min_eigenvalue(hc.real));
    }
    rep.hermitian_psh = rep.hermitian_margin > 0.0;
    rep.standard_psh_fails = rep.laplacian < 0.0;
    return rep;
}

double curve_hessian_residual(const HermitianMetric& metric, const AlmostComplexField& acx, const ScalarField& phi,
                        const Surface& surf, double s, double t, double step) {
    const Frame f = frame(surf, s, t, step);
    const NodeId node = phi.domain->locate(f.x);
    if (node < 0 || phi.domain->node_class(node) != NodeClass::interior)
        throw InputError("surface point must be an interior lattice node");
    const Mat j = acx.J(f.x);
    Eigen::Matrix<double, Eigen::Dynamic, 2, 0, kMaxRealDim, 2> tangent(f.x.size(), 2);
    tangent << f.xs, f.xt;
    const Vec jv = j * f.xs;
    const Vec along = tangent * tangent.colPivHouseholderQr().solve(jv);
    if ((jv - along).norm() > 1e-6 * std::max(1.0, jv.norm()))
        throw InputError("surface is not a holomorphic curve for J at this point");
    const Mat g = metric.g(f.x);
    const Vec v = f.xs / std::sqrt(f.xs.dot(g * f.xs));
    const ReducedJet jet = fd_jet(phi, node);
    const double lhs = v.dot(real_hessian(acx, f.x, jet).real * v);
    const double rhs = v.dot(hermitian_hessian(metric, j, phi, node).real * v) +
                       v.dot(g * v) * mean_curvature(metric, surf, s, t, step).dot(jet.p);
    return std::abs(lhs - rhs);
}

}  // namespace acx
