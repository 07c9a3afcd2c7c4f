#pragma once

// Plurisubharmonicity verdicts for sampled fields.

#include "acx/stencil.hpp"

namespace acx {

/// The slice C^m x {0} is not an almost complex submanifold with block-triangular normal form.
class IncompatibleSlice : public InputError {
public:
    using InputError::InputError;
};

struct PshReport {
    bool verdict = false;
    double margin = 0.0;  ///< worst (smallest) margin over interior nodes
    NodeId worst = -1;
    Vec worst_x;
    double tol = 0.0;     ///< tolerance applied at the worst node
    CMat witness;         ///< B attaining the worst value (B-Laplacian test only)
};

/// 10 h^2 max |u| over the node and its axis neighbours.
double local_tolerance(const ScalarField& u, NodeId node);

/// Minimum contains-margin of fd jets over interior nodes. tol < 0 selects local_tolerance.
PshReport psh_margin(const ScalarField& u, const Subequation& sub, double tol = -1.0);

struct SliceCompatibility {
    bool compatible = false;
    double f21 = 0.0;       ///< largest |f_21| entry over the points
    double e_term = 0.0;    ///< largest slice-block entry of E((0, p''))
    Vec worst_x;
};

SliceCompatibility slice_compatibility(const AlmostComplexField& acx, int m, const std::vector<Vec>& points,
                                       double tol = 1e-8);
/// Checks every non-exterior node of the slice of `domain`.
bool slice_compatible(const AlmostComplexField& acx, int m, const LatticeDomain& domain, double tol = 1e-8);

struct RestrictionReport {
    PshReport ambient;
    PshReport slice;
    double slack = 0.0;
    bool pass = false;  ///< ambient psh => slice margin >= -tol - slack
};

/// Throws IncompatibleSlice when the slice fails slice_compatible. slack = slack_per_h * h.
RestrictionReport restriction_check(const ScalarField& u, const Subequation& sub, int m, double tol = -1.0,
                                    double slack_per_h = 1.0);

/// Discrete L_B u at an interior node.
double blaplacian(const ScalarField& u, const Subequation& sub, NodeId node, const CMat& b);

/// min over the family (plus the per-node adapted B) and interior nodes of L_B u / 4 >= -tol.
PshReport psh_via_blaplacians(const ScalarField& u, const Subequation& sub, const std::vector<CMat>& family,
                              double tol = -1.0);

}  // namespace acx
