#include "acx/linalg.hpp"

#include <cmath>

namespace acx {

Mat standard_j(int n) {
    Mat j = Mat::Zero(2 * n, 2 * n);
    for (int k = 0; k < n; ++k) {
        j(2 * k + 1, 2 * k) = 1.0;
        j(2 * k, 2 * k + 1) = -1.0;
    }
    return j;
}

Mat conjugation(int n) {
    Mat c = Mat::Identity(2 * n, 2 * n);
    for (int k = 0; k < n; ++k) c(2 * k + 1, 2 * k + 1) = -1.0;
    return c;
}

Mat realify(const CMat& m) {
    const int n = static_cast<int>(m.rows());
    Mat r(2 * n, 2 * n);
    for (int j = 0; j < n; ++j) {
        for (int k = 0; k < n; ++k) {
            const double a = m(j, k).real();
            const double b = m(j, k).imag();
            r(2 * j, 2 * k) = a;
            r(2 * j, 2 * k + 1) = -b;
            r(2 * j + 1, 2 * k) = b;
            r(2 * j + 1, 2 * k + 1) = a;
        }
    }
    return r;
}

CMat unrealify(const Mat& b) {
    const int n = static_cast<int>(b.rows()) / 2;
    CMat m(n, n);
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) m(j, k) = Complex(b(2 * j, 2 * k), b(2 * j + 1, 2 * k));
    return m;
}

Vec realify(const CVec& z) {
    Vec v(2 * z.size());
    for (int k = 0; k < z.size(); ++k) {
        v(2 * k) = z(k).real();
        v(2 * k + 1) = z(k).imag();
    }
    return v;
}

CVec unrealify_vec(const Vec& v) {
    CVec z(v.size() / 2);
    for (int k = 0; k < z.size(); ++k) z(k) = Complex(v(2 * k), v(2 * k + 1));
    return z;
}

double symmetry_residual(const Mat& a) {
    if (a.size() == 0) return 0.0;
    return (a - a.transpose()).cwiseAbs().maxCoeff();
}

Mat symmetrize(const Mat& a) { return 0.5 * (a + a.transpose()); }

double min_eigenvalue(const Mat& symmetric) {
    Eigen::SelfAdjointEigenSolver<Mat> es(symmetric, Eigen::EigenvaluesOnly);
    return es.eigenvalues()(0);
}

double min_eigenvalue(const CMat& hermitian) {
    Eigen::SelfAdjointEigenSolver<CMat> es(hermitian, Eigen::EigenvaluesOnly);
    return es.eigenvalues()(0);
}

Eigen::VectorXd eigenvalues(const CMat& hermitian) {
    Eigen::SelfAdjointEigenSolver<CMat> es(hermitian, Eigen::EigenvaluesOnly);
    return es.eigenvalues();
}

double operator_norm(const Mat& a) {
    Eigen::JacobiSVD<Mat> svd(a);
    return svd.singularValues()(0);
}

}  // namespace acx
