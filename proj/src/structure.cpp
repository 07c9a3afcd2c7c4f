#include "acx/structure.hpp"

#include <cmath>
#include <utility>

namespace acx {

namespace {

constexpr double kDetFloor = 1e-14;

Mat centered_dg(const AlmostComplexField::Generator& gen, const Vec& x, int k, double h) {
    Vec xp = x, xm = x;
    xp(k) += h;
    xm(k) -= h;
    return (gen(xp) - gen(xm)) / (2.0 * h);
}

double param(const ParamMap& params, const std::string& key, double fallback) {
    auto it = params.find(key);
    return it == params.end() ? fallback : it->second;
}

void check_dim(const Mat& m, int dim, const char* what) {
    if (m.rows() != dim || m.cols() != dim)
        throw InputError(std::string(what) + ": expected a " + std::to_string(dim) + "x" +
                         std::to_string(dim) + " matrix");
}

}  // namespace

double det_relation_constant(int n) { return std::pow(1.0 / kComplexScale, 2 * n); }

AlmostComplexField::AlmostComplexField(int n, Generator g, Derivative derivative, bool constant,
                                       std::string id, double fd_step)
    : n_(n),
      generator_(std::move(g)),
      derivative_(std::move(derivative)),
      constant_(constant),
      id_(std::move(id)),
      fd_step_(fd_step) {
    if (n < 1 || n > kMaxComplexDim) throw InputError("complex dimension must be in {1,2,3}");
    if (!generator_) throw InputError("almost complex field needs a generator");
    if (!(fd_step_ > 0.0)) throw InputError("finite-difference step must be positive");
}

Mat AlmostComplexField::g(const Vec& x) const {
    if (x.size() != dim()) throw InputError("point has wrong dimension");
    Mat m = generator_(x);
    check_dim(m, dim(), "generator");
    const double d = m.determinant();
    if (!(d > 0.0)) throw NumericalError("det g(x) <= 0: transform is not orientation preserving");
    return m;
}

Mat AlmostComplexField::dg(const Vec& x, int k) const {
    if (k < 0 || k >= dim()) throw InputError("derivative index out of range");
    if (constant_) return Mat::Zero(dim(), dim());
    if (derivative_) return derivative_(x, k);
    return centered_dg(generator_, x, k, fd_step_);
}

Mat AlmostComplexField::J(const Vec& x) const {
    const Mat gx = g(x);
    return gx * standard_j(n_) * gx.inverse();
}

Mat AlmostComplexField::dJ(const Vec& x, int k) const {
    const Mat gx = g(x);
    const Mat ginv = gx.inverse();
    const Mat jx = gx * standard_j(n_) * ginv;
    const Mat a = dg(x, k) * ginv;
    return a * jx - jx * a;
}

double AlmostComplexField::beta(const Vec& x) const { return g(x).determinant(); }

int antilinear_generator_count(int n) { return 2 * n * n; }

Mat antilinear_generator(int n, int index) {
    if (index < 0 || index >= antilinear_generator_count(n))
        throw InputError("antilinear generator index out of range");
    const int phase = index % 2;
    const int ij = index / 2;
    CMat m = CMat::Zero(n, n);
    m(ij / n, ij % n) = phase == 0 ? Complex(1.0, 0.0) : Complex(0.0, 1.0);
    return realify(m) * conjugation(n);
}

AcxPtr make_standard(int n) {
    const int d = 2 * n;
    return std::make_shared<AlmostComplexField>(
        n, [d](const Vec&) -> Mat { return Mat::Identity(d, d); },
        [d](const Vec&, int) -> Mat { return Mat::Zero(d, d); }, true, "standard");
}

AcxPtr make_antilinear_linear(int n, double eps, int generator) {
    const Mat f = antilinear_generator(n, generator);
    const int d = 2 * n;
    return std::make_shared<AlmostComplexField>(
        n, [f, eps, d](const Vec& x) -> Mat { return Mat::Identity(d, d) + eps * x(0) * f; },
        [f, eps, d](const Vec&, int k) -> Mat {
            return k == 0 ? Mat(eps * f) : Mat(Mat::Zero(d, d));
        },
        false, "antilinear-linear-eps");
}

AcxPtr make_antilinear_slice_compatible(int n, double eps, int m) {
    if (m < 1 || m > n) throw InputError("slice dimension must satisfy 1 <= m <= n");
    const Mat fa = antilinear_generator(n, 0);
    const Mat fb = antilinear_generator(n, 2 * (n - 1) * n);
    const int d = 2 * n;
    auto trailing = [m, d](const Vec& x) {
        double s = 0.0;
        for (int k = 2 * m; k < d; ++k) s += x(k);
        return s;
    };
    return std::make_shared<AlmostComplexField>(
        n,
        [=](const Vec& x) -> Mat {
            return Mat::Identity(d, d) + eps * (x(0) * fa + trailing(x) * fb);
        },
        [=](const Vec&, int k) -> Mat {
            if (k == 0) return eps * fa;
            if (k >= 2 * m) return eps * fb;
            return Mat::Zero(d, d);
        },
        false, "antilinear-slice-compatible");
}

namespace {

using Vec5 = Eigen::Matrix<double, 5, 1>;
using Mat5 = Eigen::Matrix<double, 5, 5>;
using Mat54 = Eigen::Matrix<double, 5, 4>;
using Mat45 = Eigen::Matrix<double, 4, 5>;

Vec5 inverse_stereo(const Eigen::Vector4d& x) {
    const double s = 1.0 + x.squaredNorm();
    Vec5 y;
    y.head<4>() = 2.0 * x / s;
    y(4) = (x.squaredNorm() - 1.0) / s;
    return y;
}

Mat54 inverse_stereo_jacobian(const Eigen::Vector4d& x) {
    const double s = 1.0 + x.squaredNorm();
    Mat54 d;
    d.topRows<4>() = 2.0 * Eigen::Matrix4d::Identity() / s - 4.0 * x * x.transpose() / (s * s);
    d.row(4) = 4.0 * x.transpose() / (s * s);
    return d;
}

Eigen::Vector4d stereo(const Vec5& y) { return y.head<4>() / (1.0 - y(4)); }

Mat45 stereo_jacobian(const Vec5& y) {
    const double w = 1.0 - y(4);
    Mat45 d = Mat45::Zero();
    d.leftCols<4>() = Eigen::Matrix4d::Identity() / w;
    d.col(4) = y.head<4>() / (w * w);
    return d;
}

Mat5 rotation_x5(double angle) {
    Mat5 r = Mat5::Identity();
    r(0, 0) = std::cos(angle);
    r(0, 4) = -std::sin(angle);
    r(4, 0) = std::sin(angle);
    r(4, 4) = std::cos(angle);
    return r;
}

}  // namespace

AcxPtr make_spherical_rotation(double r) {
    if (!(r > 0.0)) throw InputError("sphere radius must be positive");
    const double alpha = 2.0 * std::atan(1.0 / (2.0 * r));
    const Mat5 fwd = rotation_x5(-alpha);
    const Mat5 back = rotation_x5(alpha);
    auto gen = [fwd, back](const Vec& y) -> Mat {
        const Eigen::Vector4d yv = y;
        const Eigen::Vector4d x = stereo(back * inverse_stereo(yv));
        const Vec5 s = fwd * inverse_stereo(x);
        const Eigen::Matrix4d d = stereo_jacobian(s) * fwd * inverse_stereo_jacobian(x);
        return Mat(d);
    };
    return std::make_shared<AlmostComplexField>(2, gen, AlmostComplexField::Derivative{}, false,
                                                "spherical-rotation");
}

AcxPtr make_slice_structure(const AcxPtr& ambient, int m) {
    const int n = ambient->n();
    if (m < 1 || m > n) throw InputError("slice dimension must satisfy 1 <= m <= n");
    const int ds = 2 * m;
    const int d = 2 * n;
    auto lift = [d, ds](const Vec& xs) {
        Vec x = Vec::Zero(d);
        x.head(ds) = xs;
        return x;
    };
    return std::make_shared<AlmostComplexField>(
        m, [ambient, lift, ds](const Vec& xs) -> Mat { return ambient->g(lift(xs)).topLeftCorner(ds, ds); },
        [ambient, lift, ds](const Vec& xs, int k) -> Mat {
            return ambient->dg(lift(xs), k).topLeftCorner(ds, ds);
        },
        ambient->is_constant(), ambient->id() + "/slice");
}

AcxPtr make_preset(const std::string& id, int n, const ParamMap& params) {
    if (id == "standard") return make_standard(n);
    if (id == "antilinear-linear-eps") {
        const int gen = static_cast<int>(param(params, "generator", 2.0 * (n - 1) * n));
        return make_antilinear_linear(n, param(params, "eps", 0.1), gen);
    }
    if (id == "antilinear-slice-compatible")
        return make_antilinear_slice_compatible(n, param(params, "eps", 0.1),
                                                static_cast<int>(param(params, "m", 1.0)));
    if (id == "spherical-rotation") {
        if (n != 2) throw InputError("spherical-rotation preset requires n = 2");
        return make_spherical_rotation(param(params, "r", 1.0));
    }
    throw InputError("unknown structure preset '" + id + "'");
}

double complex_structure_residual(const Mat& j) {
    const Mat r = j * j + Mat::Identity(j.rows(), j.cols());
    return r.cwiseAbs().maxCoeff();
}

HermitianForm hermitian_part(const Mat& b, const Mat& j) {
    if (b.rows() != b.cols() || b.rows() != j.rows() || j.rows() != j.cols() || b.rows() % 2 != 0)
        throw InputError("hermitian_part: shape mismatch");
    if (symmetry_residual(b) > kTolAlg * std::max(1.0, b.cwiseAbs().maxCoeff()))
        throw InputError("hermitian_part: form is not symmetric");
    if (complex_structure_residual(j) > 1e-8)
        throw InputError("hermitian_part: J^2 != -I");
    const Mat out = b + j.transpose() * b * j;
    return {symmetrize(out), j};
}

Mat lower_order_e(const AlmostComplexField& acx, const Vec& x, const Vec& p) {
    const int d = acx.dim();
    if (p.size() != d) throw InputError("covector has wrong dimension");
    if (!p.allFinite()) throw InputError("covector is not finite");
    if (acx.is_constant() || p.isZero(0.0)) return Mat::Zero(d, d);
    const Mat jx = acx.J(x);
    Mat nmat = Mat::Zero(d, d);
    for (int k = 0; k < d; ++k) {
        const Vec row = acx.dJ(x, k).transpose() * p;
        for (int l = 0; l < d; ++l) {
            if (jx(k, l) == 0.0) continue;
            nmat.row(l) += jx(k, l) * row.transpose();
        }
    }
    return symmetrize(nmat);
}

HermitianForm real_hessian(const AlmostComplexField& acx, const Vec& x, const ReducedJet& jet) {
    if (jet.a.rows() != acx.dim() || jet.a.cols() != acx.dim())
        throw InputError("jet has wrong dimension");
    return hermitian_part(jet.a + lower_order_e(acx, x, jet.p), acx.J(x));
}

CMat complexify(const Mat& b, double tol) {
    if (b.rows() != b.cols() || b.rows() % 2 != 0) throw InputError("complexify: bad shape");
    const int n = static_cast<int>(b.rows()) / 2;
    const Mat j0 = standard_j(n);
    const double scale = std::max(1.0, b.cwiseAbs().maxCoeff());
    if (symmetry_residual(b) > tol * scale || (j0.transpose() * b * j0 - b).cwiseAbs().maxCoeff() > tol * scale)
        throw InputError("complexify: form is not J0-hermitian");
    CMat m = kComplexScale * unrealify(b);
    return 0.5 * (m + m.adjoint());
}

Mat decomplexify(const CMat& m) { return realify(m) / kComplexScale; }

Mat pullback(const Mat& b, const Mat& g) {
    if (b.rows() != g.rows() || g.rows() != g.cols() || b.rows() != b.cols())
        throw InputError("pullback: shape mismatch");
    if (std::abs(g.determinant()) < kDetFloor) throw InputError("pullback: singular transform");
    return g.transpose() * b * g;
}

AntilinearFactor antilinear_normalize(const Mat& g) {
    const int n = static_cast<int>(g.rows()) / 2;
    const Mat j0 = standard_j(n);
    const Mat h = 0.5 * (g - j0 * g * j0);
    const Mat f1 = 0.5 * (g + j0 * g * j0);
    Eigen::JacobiSVD<Mat> svd(h);
    const auto& sv = svd.singularValues();
    if (!(sv(sv.size() - 1) > 1e-10 * std::max(1.0, sv(0))))
        throw ChartTooLarge("complex-linear part of g is singular; shrink the chart");
    return {h, f1 * h.inverse()};
}

AntilinearFactor antilinear_normalize(const AlmostComplexField& acx, const Vec& x) {
    return antilinear_normalize(acx.g(x));
}

}  // namespace acx
