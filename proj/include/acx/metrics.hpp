#pragma once

// Riemannian and hermitian hessians, mean curvature of parametrized surfaces.

#include "acx/lattice.hpp"

namespace acx {

struct HermitianMetric {
    std::function<Mat(const Vec&)> g;
    /// gamma(x)[k](i, j) = Gamma^k_ij
    std::function<std::vector<Mat>(const Vec&)> christoffel;
    std::string id;
};

HermitianMetric euclidean_metric(int n);
/// ds^2 = |dX|^2 / (1 + |X|^2)^2 on R^4.
HermitianMetric spherical_metric();

/// Hess_ij = D_ij u - Gamma^k_ij D_k u from the fd jet at an interior node.
Mat riemannian_hessian(const HermitianMetric& metric, const ScalarField& u, NodeId node);
/// Hess + J^T Hess J; rejects J that is not orthogonal for the metric at the node.
HermitianForm hermitian_hessian(const HermitianMetric& metric, const Mat& j, const ScalarField& u, NodeId node);

/// Parametrized surface (s, t) -> R^{2n}.
using Surface = std::function<Vec(double, double)>;

/// Stereographic parametrization from the antipode of the sphere (x - r)^2 + u^2 + v^2 = r^2, y = 0;
/// (0, 0) maps to the origin with unit tangents e_u, e_v.
Surface round_sphere(double r);
/// x0 + s e_{2k} + t e_{2k+1}.
Surface coordinate_line(const Vec& x0, int k);

/// G^{ab} (X_ab + Gamma(X_a, X_b))^N with centered differences of the given step.
Vec mean_curvature(const HermitianMetric& metric, const Surface& surf, double s, double t, double step);

struct SphereDemoReport {
    double c = 0.0, r = 0.0;
    double laplacian = 0.0;       ///< Delta_Sigma u at 0 from the conformal parametrization
    double identity_value = 0.0;  ///< tr_{T Sigma} Hess u + H_Sigma . u at 0
    double expected = 0.0;     ///< 2 - 2C/r
    double deviation = 0.0;
    double hermitian_margin = 0.0;
    bool hermitian_psh = false;
    bool standard_psh_fails = false;
    Vec mean_curvature;
};

/// u = |X|^2 / 2 - C x on the sphere of radius r through 0 in the spherical metric.
SphereDemoReport sphere_demo_report(double c, double r);

/// |H(phi)(v,v) - Hess^C(phi)(v,v) - |v|^2 H_Sigma . phi| at a node on the surface, v = the unit
/// tangent X_s at parameter (s, t). Rejects surfaces that are not J-complex at the node.
double curve_hessian_residual(const HermitianMetric& metric, const AlmostComplexField& acx, const ScalarField& phi,
                        const Surface& surf, double s, double t, double step);

}  // namespace acx
