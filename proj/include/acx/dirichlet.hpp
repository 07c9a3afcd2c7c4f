#pragma once

// Dirichlet problem for F(J,f): monotone Bellman iteration over the B-Laplacian family.

#include <limits>

#include "acx/psh.hpp"

namespace acx {

struct SchemeParams {
    double tol_res = -1.0;         ///< < 0 selects 0.1 h^2
    long max_iterations = 200000;
    double tau = 0.0;              ///< 0 selects 0.9 / (largest active diagonal)
    int policy_refresh = 10;       ///< iterations between refreshes of the adapted B
    double adapted_cap = 16.0;     ///< eigenvalue cap of the adapted B (0 disables)
    double init_constant = 1.0;    ///< starting C of the initial quadric
    bool use_fixed_family = true;
};

struct DirichletProblem {
    DomainPtr domain;
    Subequation sub;
    ScalarFn phi;                  ///< boundary datum, sampled on boundary nodes
    SchemeParams scheme;

    double tol_res() const;
};

struct SolveReport {
    long iterations = 0;
    double residual = 0.0;
    double subsolution_margin = 0.0;
    double dual_margin = 0.0;
    double wall_seconds = 0.0;
    bool converged = false;
    double init_constant = 0.0;
    bool init_ok = false;
    double tol_res = 0.0;
    double tau = 0.0;
};

struct SolveResult {
    ScalarField u;
    SolveReport report;
};

/// Theta(u)(x) = min over family and adapted B of [L_B u / 4 - n (beta f)^{1/n}].
double bellman_residual(const ScalarField& u, const Subequation& sub, NodeId node);

SolveResult solve(const DirichletProblem& problem);

/// Subsolution certificate: smallest contains-margin; supersolution: -(largest contains-margin).
void certify(const ScalarField& u, const Subequation& sub, double& sub_margin, double& dual_margin);

enum class Verdict { pass, fail, inconclusive };
const char* to_string(Verdict v);

struct ComparisonReport {
    Verdict verdict = Verdict::inconclusive;
    double max_excess = 0.0;       ///< max of u - w over K
    double boundary_excess = 0.0;  ///< max of u - w over the boundary of K
    double w_margin = 0.0;         ///< largest contains-margin of w's jets
    double tol_cmp = 0.0;
};

/// Comparison on the domain of u with tol_cmp = 10 (tol_res + h). Inconclusive unless w is a verified
/// supersolution (no jet strictly inside F) and u <= w + tol_cmp on the boundary.
ComparisonReport comparison_check(const ScalarField& u, const ScalarField& w, const Subequation& sub,
                                  double tol_res);

struct MaximalityReport {
    Verdict verdict = Verdict::inconclusive;
    int tested = 0;
    int skipped = 0;
    int violations = 0;
    double worst_excess = -std::numeric_limits<double>::infinity();
};

/// Competitors: u - c, u + c (skipped by the boundary filter), and max(u - d, q) with q a psh quadric
/// lying below u on the boundary.
MaximalityReport maximality_check(const ScalarField& u, const DirichletProblem& problem, double tol_res);

}  // namespace acx
