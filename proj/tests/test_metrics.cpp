#include "doctest.h"

#include <cmath>

#include "acx/metrics.hpp"

using namespace acx;

namespace {

Vec v4(double a, double b, double c, double d) {
    Vec v(4);
    v << a, b, c, d;
    return v;
}

DomainPtr patch(const Vec& centre, double h) {
    return LatticeDomain::ball(2, centre, 2.5 * h, h, 1);
}

/// Conformal factor oracle: Gamma^k_ij = d_ik psi_j + d_jk psi_i - d_ij psi_k, psi = -log(1 + |X|^2).
double gamma_oracle(const Vec& x, int k, int i, int j) {
    const Vec psi = -2.0 * x / (1.0 + x.squaredNorm());
    return (i == k) * psi(j) + (j == k) * psi(i) - (i == j) * psi(k);
}

}  // namespace

TEST_CASE("euclidean and spherical presets") {
    const HermitianMetric e = euclidean_metric(2), s = spherical_metric();
    CHECK((s.g(Vec::Zero(4)) - Mat::Identity(4, 4)).cwiseAbs().maxCoeff() == 0.0);
    for (const Mat& gk : s.christoffel(Vec::Zero(4))) CHECK(gk.cwiseAbs().maxCoeff() == 0.0);
    const Vec x = v4(0.3, -0.2, 0.5, 0.1);
    const auto gam = s.christoffel(x);
    for (int k = 0; k < 4; ++k)
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) {
                CHECK(gam[k](i, j) == doctest::Approx(gamma_oracle(x, k, i, j)).epsilon(1e-13));
                CHECK(gam[k](i, j) == gam[k](j, i));
            }
    const Mat j0 = standard_j(2);
    const Mat g = s.g(x);
    CHECK((j0.transpose() * g * j0 - g).cwiseAbs().maxCoeff() <= 1e-15);
    CHECK(s.g(x)(0, 0) == doctest::Approx(1.0 / std::pow(1.0 + x.squaredNorm(), 2)));
    CHECK((e.g(x) - Mat::Identity(4, 4)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("riemannian hessian examples") {
    const double h = 1.0 / 64;
    const DomainPtr origin = patch(Vec::Zero(4), h);
    const ScalarField q = sample(origin, [](const Vec& x) { return 0.5 * x.squaredNorm() - 2.0 * x(0) + x(1) * x(2); });
    const NodeId c0 = origin->locate(Vec::Zero(4));
    const Mat d2 = fd_jet(q, c0).a;
    CHECK((riemannian_hessian(euclidean_metric(2), q, c0) - d2).cwiseAbs().maxCoeff() == 0.0);
    CHECK((riemannian_hessian(spherical_metric(), q, c0) - d2).cwiseAbs().maxCoeff() <= 1e-15);

    const Vec e1 = v4(1, 0, 0, 0);
    const DomainPtr at1 = patch(e1, h);
    const ScalarField lin = sample(at1, [](const Vec& x) { return x(0); });
    const Mat hess = riemannian_hessian(spherical_metric(), lin, at1->locate(e1));
    // Hess_ij = -Gamma^1_ij for phi = x1.
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) CHECK(hess(i, j) == doctest::Approx(-gamma_oracle(e1, 0, i, j)).epsilon(1e-9).scale(1e-9));
    CHECK(hess(0, 0) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(hess(1, 1) == doctest::Approx(-1.0).epsilon(1e-9));
}

TEST_CASE("hermitian hessian examples") {
    const double h = 1.0 / 64;
    const DomainPtr origin = patch(Vec::Zero(4), h);
    const ScalarField q = sample(origin, [](const Vec& x) { return 0.5 * x.squaredNorm() - 3.0 * x(0) + x(0) * x(2); });
    const NodeId c0 = origin->locate(Vec::Zero(4));
    const Mat j0 = standard_j(2);
    const Mat d2 = fd_jet(q, c0).a;
    const Mat sym = d2 + j0.transpose() * d2 * j0;
    CHECK((hermitian_hessian(euclidean_metric(2), j0, q, c0).real - sym).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK((hermitian_hessian(spherical_metric(), j0, q, c0).real - sym).cwiseAbs().maxCoeff() <= 1e-12);
    const ScalarField abs2 = sample(origin, [](const Vec& x) { return x.squaredNorm(); });
    CHECK(min_eigenvalue(hermitian_hessian(euclidean_metric(2), j0, abs2, c0).real) > 0.0);
    Mat skew = Mat::Identity(4, 4);
    skew(0, 2) = 0.5;
    const Mat jbad = skew * j0 * skew.inverse();
    CHECK_THROWS_AS(hermitian_hessian(euclidean_metric(2), jbad, abs2, c0), InputError);
}

TEST_CASE("mean curvature of round spheres") {
    for (double r : {0.5, 1.0, 2.0}) {
        const Surface sph = round_sphere(r);
        for (const auto& [s, t] : {std::pair{0.0, 0.0}, std::pair{0.4, -0.3}, std::pair{1.5, 0.7}}) {
            const Vec x = sph(s, t);
            const Vec hv = mean_curvature(euclidean_metric(2), sph, s, t, 1e-3);
            CHECK(hv.norm() == doctest::Approx(2.0 / r).epsilon(1e-5));
            const Vec centre = v4(r, 0, 0, 0);
            // Inward: points from x toward the centre of the sphere.
            CHECK(hv.normalized().dot((centre - x).normalized()) == doctest::Approx(1.0).epsilon(1e-6));
        }
    }
}

TEST_CASE("mean curvature of the sphere through the origin in the spherical metric") {
    for (double r : {0.5, 1.0}) {
        const Surface sph = round_sphere(r);
        const Vec expect = v4(2.0 / r, 0, 0, 0);
        double last = 1e9;
        for (double step : {r / 8, r / 16, r / 32, r / 64}) {
            const double err = (mean_curvature(spherical_metric(), sph, 0.0, 0.0, step) - expect).norm();
            CHECK(err < last);
            CHECK(err <= 2.0 * step);
            last = err;
        }
        CHECK(last <= 1e-2);
    }
}

TEST_CASE("curves z1 = a bend toward the sign of a") {
    for (double a : {-0.7, -0.2, 0.3, 0.9}) {
        const Vec x0 = v4(a, 0, 0, 0);
        const Vec hv = mean_curvature(spherical_metric(), coordinate_line(x0, 1), 0.0, 0.0, 1e-3);
        CHECK(hv(0) * a > 0.0);
        CHECK(std::abs(hv(1)) <= 1e-9);
        // u = |z1|^2 is constant on the curve, so the tangential trace of Hess u equals -H . Du.
        const double h = 1.0 / 128;
        const DomainPtr dom = patch(x0, h);
        const ScalarField u = sample(dom, [](const Vec& x) { return x(0) * x(0) + x(1) * x(1); });
        const Mat hess = riemannian_hessian(spherical_metric(), u, dom->locate(x0));
        const double scale = 1.0 / spherical_metric().g(x0)(2, 2);
        const double trace = scale * (hess(2, 2) + hess(3, 3));
        CHECK(trace < 0.0);
        CHECK(trace == doctest::Approx(-2.0 * a * hv(0)).epsilon(1e-4));
    }
}

TEST_CASE("sphere demo report") {
    const SphereDemoReport a = sphere_demo_report(2.0, 1.0);
    CHECK(std::abs(a.laplacian - (-2.0)) <= 1e-2);
    CHECK(a.expected == -2.0);
    CHECK(a.hermitian_psh);
    CHECK(a.standard_psh_fails);
    const SphereDemoReport b = sphere_demo_report(1.0, 1.0);
    CHECK(std::abs(b.laplacian) <= 1e-2);
    const SphereDemoReport c = sphere_demo_report(0.0, 1.0);
    CHECK(std::abs(c.laplacian - 2.0) <= 1e-2);
    CHECK_FALSE(c.standard_psh_fails);
    CHECK(std::abs(a.identity_value - a.laplacian) <= 1e-2);
    CHECK((a.mean_curvature - v4(2, 0, 0, 0)).norm() <= 1e-2);
    CHECK_THROWS_AS(sphere_demo_report(-1.0, 1.0), InputError);
    CHECK_THROWS_AS(sphere_demo_report(1.0, 0.0), InputError);
}

TEST_CASE("sphere demo separation holds with room to spare") {
    for (const auto& [cc, r] : {std::pair{1.2, 1.0}, std::pair{1.5, 1.0}, std::pair{2.0, 1.0}, std::pair{1.5, 0.75}}) {
        const SphereDemoReport e = sphere_demo_report(cc, r);
        CHECK(e.hermitian_psh);
        CHECK(e.hermitian_margin > 10 * 1e-2);
        CHECK(e.standard_psh_fails);
        CHECK(e.laplacian < -10 * 1e-2);
        CHECK(std::abs(e.deviation) <= 1e-2);
    }
}

TEST_CASE("hessian identity on complex curves") {
    const double h = 1.0 / 64;
    const DomainPtr dom = patch(Vec::Zero(4), h);
    const ScalarField abs2 = sample(dom, [](const Vec& x) { return x.squaredNorm(); });
    const ScalarField cst = sample(dom, [](const Vec&) { return 4.0; });
    const AcxPtr j0 = make_standard(2);
    const Surface line = coordinate_line(Vec::Zero(4), 0);
    CHECK(curve_hessian_residual(euclidean_metric(2), *j0, abs2, line, 0.0, 0.0, h) <= 10 * h * h);
    CHECK(curve_hessian_residual(euclidean_metric(2), *j0, cst, line, 0.0, 0.0, h) == 0.0);

    for (double r : {1.0, 0.5}) {
        const ScalarField u = sample(dom, [](const Vec& x) { return 0.5 * x.squaredNorm() - 2.0 * x(0); });
        const AcxPtr rot = make_spherical_rotation(r);
        CHECK(curve_hessian_residual(spherical_metric(), *rot, u, round_sphere(r), 0.0, 0.0, r / 64) <= 1e-2);
    }
    const Surface real_plane = [](double s, double t) { return v4(s, 0, t, 0); };
    CHECK_THROWS_AS(curve_hessian_residual(euclidean_metric(2), *j0, abs2, real_plane, 0.0, 0.0, h), InputError);
}
