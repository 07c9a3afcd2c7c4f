#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace acx {

// Ambient real dimension is 2n with n <= 3, so storage is bounded at 6x6.
inline constexpr int kMaxComplexDim = 3;
inline constexpr int kMaxRealDim = 2 * kMaxComplexDim;

using Complex = std::complex<double>;
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxRealDim, kMaxRealDim>;
using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMaxRealDim, 1>;
using CMat = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxComplexDim, kMaxComplexDim>;
using CVec = Eigen::Matrix<Complex, Eigen::Dynamic, 1, 0, kMaxComplexDim, 1>;

inline constexpr double kTolAlg = 1e-10;

/// Caller supplied malformed data (wrong shape, asymmetric form, out-of-range parameter).
class InputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A numerical procedure failed in a way the caller must see (NaN, overflow, singular solve).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Standard complex structure on R^{2n} with coordinates ordered (x1, y1, ..., xn, yn).
Mat standard_j(int n);

/// Block diagonal complex conjugation (x, y) -> (x, -y).
Mat conjugation(int n);

/// Real 2n x 2n matrix of the complex-linear map z -> M z. For hermitian M this is also the
/// symmetric matrix of the real quadratic form Re(z* M z).
Mat realify(const CMat& m);

/// Inverse of realify on the J0-commuting subspace (no normalization).
CMat unrealify(const Mat& b);

/// Complex vector -> interleaved real vector (Re z1, Im z1, ...).
Vec realify(const CVec& z);
CVec unrealify_vec(const Vec& v);

double symmetry_residual(const Mat& a);
Mat symmetrize(const Mat& a);

double min_eigenvalue(const Mat& symmetric);
double min_eigenvalue(const CMat& hermitian);
Eigen::VectorXd eigenvalues(const CMat& hermitian);

/// Spectral norm (largest singular value).
double operator_norm(const Mat& a);

}  // namespace acx
