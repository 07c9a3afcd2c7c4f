#include "acx/jets.hpp"

#include <cmath>
#include <limits>

namespace acx {

double Subequation::rhs(const Vec& x) const {
    if (!f) return 0.0;
    const double v = f(x);
    if (!(v >= 0.0)) throw InputError("right-hand side f must be finite and non-negative");
    return acx->beta(x) * v;
}

Subequation homogeneous(AcxPtr acx) { return {std::move(acx), {}}; }

Subequation inhomogeneous(AcxPtr acx, ScalarFn f) {
    if (!f) throw InputError("inhomogeneous subequation needs f");
    return {std::move(acx), std::move(f)};
}

Subequation inhomogeneous(AcxPtr acx, double f) {
    if (!(f >= 0.0)) throw InputError("f must be non-negative");
    return {std::move(acx), [f](const Vec&) { return f; }};
}

Mat transported_form(const AlmostComplexField& acx, const Vec& x, const ReducedJet& jet) {
    const Mat b = jet.a + lower_order_e(acx, x, jet.p);
    return hermitian_part(symmetrize(pullback(b, acx.g(x))), standard_j(acx.n())).real;
}

namespace {

struct Spectrum {
    Eigen::VectorXd mu;
    double rhs;
};

Spectrum spectrum(const Subequation& sub, const Vec& x, const ReducedJet& jet) {
    const Mat h = transported_form(*sub.acx, x, jet);
    return {eigenvalues(complexify(h, 1e-8)), sub.rhs(x)};
}

Membership evaluate(const Subequation& sub, const Vec& x, const ReducedJet& jet, double tol) {
    const Spectrum s = spectrum(sub, x, jet);
    const int n = sub.acx->n();
    Membership m;
    m.eig_margin = 2.0 * s.mu(0);
    if (sub.homogeneous()) {
        m.det_slack = std::numeric_limits<double>::infinity();
        m.margin = m.eig_margin;
    } else {
        double prod = 1.0;
        for (int i = 0; i < n; ++i) prod *= std::max(s.mu(i), 0.0);
        m.det_slack = 2.0 * (std::pow(prod, 1.0 / n) - std::pow(s.rhs, 1.0 / n));
        m.margin = std::min(m.eig_margin, m.det_slack);
    }
    m.inside = m.margin >= -tol;
    return m;
}

}  // namespace

Membership contains(const Subequation& sub, const Vec& x, const ReducedJet& jet, double tol) {
    return evaluate(sub, x, jet, tol);
}

Membership dual_contains(const Subequation& sub, const Vec& x, const ReducedJet& jet, double tol) {
    const Membership neg = evaluate(sub, x, -jet, tol);
    Membership m;
    m.eig_margin = -neg.eig_margin;
    m.det_slack = -neg.det_slack;
    m.margin = -neg.margin;
    m.inside = !(neg.margin > tol);
    return m;
}

bool strict_contains(const Subequation& sub, const Vec& x, const ReducedJet& jet, double c) {
    if (!(c > 0.0)) throw InputError("strictness radius c must be positive");
    const double gn = operator_norm(sub.acx->g(x));
    const double nu = gn * gn;
    const Spectrum s = spectrum(sub, x, jet);
    const int n = sub.acx->n();
    if (2.0 * s.mu(0) < c * nu) return false;
    if (sub.homogeneous()) return true;
    double shrunk = 1.0, prod = 1.0;
    for (int i = 0; i < n; ++i) {
        shrunk *= s.mu(i) - 0.5 * c * nu;
        prod *= s.mu(i);
    }
    return shrunk >= s.rhs && prod >= s.rhs + std::pow(c / std::sqrt(static_cast<double>(n)), n);
}

bool positivity_closed(const Subequation& sub, const Vec& x, const ReducedJet& jet, const Mat& pform,
                       double tol) {
    if (symmetry_residual(pform) > kTolAlg || min_eigenvalue(pform) < -kTolAlg)
        throw InputError("positivity_closed: P must be positive semidefinite");
    if (!contains(sub, x, jet, tol).inside) return true;
    return contains(sub, x, {jet.p, jet.a + pform}, tol).inside;
}

}  // namespace acx
