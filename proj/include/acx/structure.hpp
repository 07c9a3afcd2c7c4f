#pragma once

// Linear algebra of almost complex structures J = g J0 g^{-1} given in local coordinates.

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>

#include "acx/linalg.hpp"

namespace acx {

/// Normalization of complexify: the complex form of a J0-hermitian real form B has
/// entries kComplexScale * (B(2j,2k) + i B(2j+1,2k)). Pinned so that the real hessian
/// of |z|^2 under J0 (which is 4I) maps to the identity.
inline constexpr double kComplexScale = 0.25;

/// det_R(B) = kappa_det(n) * det_C(complexify(B))^2 for J0-hermitian B.
double det_relation_constant(int n);

using ParamMap = std::map<std::string, double>;

class AlmostComplexField {
public:
    using Generator = std::function<Mat(const Vec&)>;
    using Derivative = std::function<Mat(const Vec&, int)>;

    /// `derivative`, when empty, is replaced by centered differences with step `fd_step`.
    AlmostComplexField(int n, Generator g, Derivative derivative = {}, bool constant = false,
                       std::string id = "custom", double fd_step = 1e-4);

    int n() const { return n_; }
    int dim() const { return 2 * n_; }
    bool is_constant() const { return constant_; }
    const std::string& id() const { return id_; }

    /// The transform g(x); throws NumericalError if det g(x) <= 0.
    Mat g(const Vec& x) const;
    /// Coordinate derivative d g / d t_k at x.
    Mat dg(const Vec& x, int k) const;
    Mat J(const Vec& x) const;
    /// Coordinate derivative of J = [dg g^{-1}, J].
    Mat dJ(const Vec& x, int k) const;
    /// Volume density: g* lambda0 = beta lambda0.
    double beta(const Vec& x) const;

    bool has_analytic_derivative() const { return static_cast<bool>(derivative_); }

private:
    int n_;
    Generator generator_;
    Derivative derivative_;
    bool constant_;
    std::string id_;
    double fd_step_;
};

using AcxPtr = std::shared_ptr<const AlmostComplexField>;

/// Complex antilinear generator number `index` of R^{2n}: v -> M conj(v) with M = E_{ij} or i E_{ij},
/// index = 2 * (i * n + j) + phase.
Mat antilinear_generator(int n, int index);
int antilinear_generator_count(int n);

AcxPtr make_standard(int n);
/// g(x) = I + eps * x_1 * F with F = antilinear_generator(n, generator).
AcxPtr make_antilinear_linear(int n, double eps, int generator);
/// g(x) = I + eps * (x_1 F_A + (sum of coordinates beyond C^m) F_B); F_A has vanishing 21-block for
/// the splitting C^m x C^{n-m}, so the antilinear factor is block upper triangular on C^m x {0}.
AcxPtr make_antilinear_slice_compatible(int n, double eps, int m);
/// Structure pushed forward from J0 by the rotation of S^4 (in stereographic coordinates on R^4)
/// that carries (a,0,0,0) to the origin, a = 1/(2r). It maps the complex line {(a,0)} x C onto the
/// round sphere (x - r)^2 + u^2 + v^2 = r^2 in the 3-plane y = 0.
AcxPtr make_spherical_rotation(double r);
/// Structure induced on C^m x {0} by a slice-compatible field: g restricted to the 11-block.
AcxPtr make_slice_structure(const AcxPtr& ambient, int m);

/// Registry: "standard", "antilinear-linear-eps", "antilinear-slice-compatible", "spherical-rotation".
AcxPtr make_preset(const std::string& id, int n, const ParamMap& params);

struct HermitianForm {
    Mat real;       ///< symmetric 2n x 2n
    Mat structure;  ///< the J it is hermitian for
};

/// B + J^T B J (no 1/2). Rejects asymmetric B or J with J^2 != -I.
HermitianForm hermitian_part(const Mat& b, const Mat& j);

/// Polarized symmetric form with E(p)(v,v) = <(nabla_{Jv} J)(v), p>.
Mat lower_order_e(const AlmostComplexField& acx, const Vec& x, const Vec& p);

/// (Du, D^2 u) at a point.
struct ReducedJet {
    Vec p;
    Mat a;

    ReducedJet operator+(const ReducedJet& o) const { return {p + o.p, a + o.a}; }
    ReducedJet operator-() const { return {-p, -a}; }
    ReducedJet operator*(double t) const { return {t * p, t * a}; }
};

/// H = (A + E(p))^J at x.
HermitianForm real_hessian(const AlmostComplexField& acx, const Vec& x, const ReducedJet& jet);

/// n x n hermitian counterpart of a J0-hermitian form.
CMat complexify(const Mat& b, double tol = 1e-9);
/// Real form of a hermitian matrix; inverse of complexify.
Mat decomplexify(const CMat& m);

/// g^T B g; rejects singular g.
Mat pullback(const Mat& b, const Mat& g);

struct AntilinearFactor {
    Mat h;  ///< complex-linear part of g
    Mat f;  ///< antilinear, (I + f) h = g
};

/// Error raised when the complex-linear part of g is singular: the chart must be shrunk.
class ChartTooLarge : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

AntilinearFactor antilinear_normalize(const AlmostComplexField& acx, const Vec& x);
AntilinearFactor antilinear_normalize(const Mat& g);

/// ||J^2 + I|| (max abs entry).
double complex_structure_residual(const Mat& j);

}  // namespace acx
