#pragma once

// Monotone wide-stencil discretizations of a.D^2 u + b.Du and of the B-Laplacians.

#include <vector>

#include "acx/lattice.hpp"

namespace acx {

/// value(u, x) = sum_k coef_k (u[x + offset_k] - u[x]), every coef_k >= 0.
struct Stencil {
    std::vector<NodeId> offsets;  ///< relative node ids
    std::vector<double> coefs;
    double diag = 0.0;            ///< sum of coefs

    double apply(const std::vector<double>& u, NodeId node) const {
        const double u0 = u[node];
        double s = 0.0;
        for (size_t k = 0; k < offsets.size(); ++k) s += coefs[k] * (u[node + offsets[k]] - u0);
        return s;
    }
};

/// Second-order term weight * (d/dv)^2 with v a unit vector, before snapping.
struct DirectionalTerm {
    Vec dir;
    double weight;
};

/// Lattice direction w (|w|_inf <= r) maximizing cos^2(v, w); ties resolved by enumeration order.
Offset snap_direction(const Vec& v, int r);
/// Direction w maximizing the projection of the complex line span(v, J0 v) onto span(w, J0 w).
Offset snap_complex_line(const Vec& v, int r);

/// Assembles sum of snapped second-difference terms plus the drift. Drift is centered on an axis
/// where the second-order coefficients already dominate it, and upwind otherwise.
Stencil assemble(const LatticeDomain& dom, const std::vector<std::pair<Offset, double>>& second,
                 const Vec& drift);

/// Stencil of a.D^2 + b.D at a node with stencil radius r: eigen-decompose a, snap each direction.
Stencil compile_linear(const LatticeDomain& dom, int r, const Mat& a, const Vec& b);

/// Per-point data the B-Laplacians need: g(x), E(e_i) and whether g is complex linear.
struct PointGeometry {
    Mat g;
    std::vector<Mat> e_basis;
    bool complex_linear = false;
};

PointGeometry point_geometry(const AlmostComplexField& acx, const Vec& x);

/// S = g realify(B) g^T, and drift b_i = <S, E(e_i)>.
Mat blaplacian_symbol(const PointGeometry& geo, const CMat& b);
Vec blaplacian_drift(const PointGeometry& geo, const Mat& s);

/// Rejects B that is not hermitian positive definite with unit determinant.
void check_unit_hermitian(const CMat& b);

/// Monotone stencil of L_B u = <S, D^2 u> + <b, Du> at a node with stencil radius r.
Stencil compile_blaplacian(const LatticeDomain& dom, int r, const PointGeometry& geo, const CMat& b);

/// Fixed part of the Bellman family: I and U diag(t, 1/t, 1, ...) U* for t in {2, 4} with
/// four quasi-random unitaries; for n = 1 only {1}.
std::vector<CMat> fixed_b_family(int n);

/// det(H)^{1/n} H^{-1} with eigenvalues of H floored at `floor` (H hermitian), optionally with the
/// eigenvalues of the result clamped to [1/cap, cap] and renormalized to unit determinant.
CMat adapted_b(const CMat& h, double floor = 1e-8, double cap = 0.0);

}  // namespace acx
