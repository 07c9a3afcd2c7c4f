#pragma once

// Fibre-wise membership in F(J), F(J,f), the Dirichlet dual and uniform strictness.

#include <functional>

#include "acx/structure.hpp"

namespace acx {

using ScalarFn = std::function<double(const Vec&)>;

struct Subequation {
    AcxPtr acx;
    ScalarFn f;  ///< empty => homogeneous F(J)

    bool homogeneous() const { return !f; }
    double rhs(const Vec& x) const;  ///< beta(x) f(x), 0 when homogeneous
};

Subequation homogeneous(AcxPtr acx);
Subequation inhomogeneous(AcxPtr acx, ScalarFn f);
Subequation inhomogeneous(AcxPtr acx, double f);

struct Membership {
    bool inside = false;
    double margin = 0.0;      ///< binding slack, >= -tol iff inside
    double eig_margin = 0.0;  ///< half the smallest eigenvalue of H'
    double det_slack = 0.0;   ///< 2 (det^{1/n} - (beta f)^{1/n}); +inf when homogeneous
};

/// H' = (g^T (A + E(p)) g)^{J0}, the jet transported to the standard model.
Mat transported_form(const AlmostComplexField& acx, const Vec& x, const ReducedJet& jet);

Membership contains(const Subequation& sub, const Vec& x, const ReducedJet& jet, double tol = 1e-9);
/// Membership in the dual ~(-Int F); margin is -(margin of -jet).
Membership dual_contains(const Subequation& sub, const Vec& x, const ReducedJet& jet, double tol = 1e-9);
/// Sufficient test for the ball of radius c (operator norm on A) around the jet lying in F_x.
bool strict_contains(const Subequation& sub, const Vec& x, const ReducedJet& jet, double c);
/// contains(jet) => contains(jet + (0, P)); rejects P that is not positive semidefinite.
bool positivity_closed(const Subequation& sub, const Vec& x, const ReducedJet& jet, const Mat& pform,
                       double tol = 1e-9);

}  // namespace acx
