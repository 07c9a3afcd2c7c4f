#pragma once

// Linear operators L = a.D^2 + b.D: viscosity, classical and distributional subharmonicity.

#include <optional>

#include "acx/stencil.hpp"

namespace acx {

struct LinearOperator {
    std::function<Mat(const Vec&)> a;
    std::function<Vec(const Vec&)> b;
    std::string provenance = "generic";
    /// Set when the operator is the B-Laplacian of `sub`; discretized through the same stencil.
    std::optional<Subequation> sub;
    CMat bform;

    Stencil stencil(const LatticeDomain& dom, NodeId node) const;
};

LinearOperator laplacian(int n);
/// a = diag(weights), b = 0.
LinearOperator anisotropic(const Vec& weights);
/// a = g realify(B) g^T, b_i = <a, E(e_i)>.
LinearOperator from_blaplacian(const Subequation& sub, const CMat& b);

/// Positive definiteness of a at every interior node.
void check_operator(const LinearOperator& op, const LatticeDomain& dom);

struct LinearReport {
    bool verdict = false;
    double margin = 0.0;
    NodeId worst = -1;
};

/// min over interior nodes of <a, A> + <b, p> from fd jets, >= -tol.
LinearReport viscosity_subharmonic(const ScalarField& u, const LinearOperator& op, double tol = 1e-9);

struct LatticeBall {
    Vec center;  ///< must be a lattice node
    double radius;
};

/// Discrete L h = 0 on the ball, h = u on its boundary layer, by Jacobi sweeps to `tol_res`.
ScalarField harmonic_replacement(const ScalarField& u, const LinearOperator& op, const LatticeBall& ball,
                                 double tol_res = 1e-11, long max_sweeps = 2000000);

struct ClassicalReport {
    bool verdict = false;
    double worst_excess = 0.0;  ///< max over balls and nodes of u - h
    int witness_ball = -1;
};

ClassicalReport classical_subharmonic(const ScalarField& u, const LinearOperator& op,
                                      const std::vector<LatticeBall>& balls, double tol_cmp = 1e-8);

struct Bump {
    Vec center;
    double radius;

    double operator()(const Vec& x) const;
    /// Integral over R^d of (1 - |x - c|^2 / radius^2)_+^3.
    double mass() const;
};

/// h^{2n} sum u . (L^t bump) with L^t phi = sum D_ij(a_ij phi) - sum D_i(b_i phi), centered differences.
double distributional_pairing(const ScalarField& u, const LinearOperator& op, const Bump& bump);

/// Masked nodes take the max of unmasked values in the smallest punctured lattice ball holding any;
/// unmasked nodes keep their value.
ScalarField ess_usc_regularize(const ScalarField& u);

}  // namespace acx
