#include "doctest.h"

#include <cmath>

#include <Eigen/Sparse>

#include "acx/potential.hpp"
#include "acx/prng.hpp"
#include "acx/psh.hpp"
#include "acx/suites.hpp"

using namespace acx;

namespace {

double abs2(const Vec& x) { return x.squaredNorm(); }

Vec point(double a, double b) {
    Vec v(2);
    v << a, b;
    return v;
}

/// 5-point Laplace solve on the ball's lattice nodes, written independently of the stencil code.
std::vector<double> five_point_harmonic(const DomainPtr& bd, const ScalarField& u) {
    std::vector<int> index(bd->size(), -1);
    int m = 0;
    for (NodeId id : bd->interior()) index[id] = m++;
    Eigen::SparseMatrix<double> a(m, m);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m);
    std::vector<Eigen::Triplet<double>> t;
    for (NodeId id : bd->interior()) {
        const int row = index[id];
        t.emplace_back(row, row, -4.0);
        for (int k = 0; k < 2; ++k)
            for (int s : {-1, 1}) {
                const Vec y = bd->position(id) + s * bd->h() * Vec::Unit(2, k);
                const NodeId nb = bd->locate(y);
                if (index[nb] >= 0)
                    t.emplace_back(row, index[nb], 1.0);
                else
                    rhs(row) -= u[u.domain->locate(y)];
            }
    }
    a.setFromTriplets(t.begin(), t.end());
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu(a);
    const Eigen::VectorXd sol = lu.solve(rhs);
    std::vector<double> out(bd->size(), std::nan(""));
    for (NodeId id = 0; id < bd->size(); ++id) {
        if (bd->node_class(id) == NodeClass::exterior) continue;
        out[id] = index[id] >= 0 ? sol(index[id]) : u[u.domain->locate(bd->position(id))];
    }
    return out;
}

}  // namespace

TEST_CASE("viscosity subharmonicity examples") {
    const DomainPtr dom = LatticeDomain::box(2, -1.0, 1.0, 0.25);
    const LinearOperator lap = laplacian(2);
    CHECK(viscosity_subharmonic(sample(dom, abs2), lap).margin == doctest::Approx(8.0).epsilon(1e-10));
    CHECK_FALSE(viscosity_subharmonic(sample(dom, [](const Vec& x) { return -abs2(x); }), lap).verdict);
    Vec p(4);
    p << 1.0, -2.0, 0.5, 0.0;
    const ScalarField aff = sample(dom, [&](const Vec& x) { return p.dot(x); });
    CHECK(std::abs(viscosity_subharmonic(aff, lap).margin) <= 1e-12);
    LinearOperator drift = lap;
    drift.b = [](const Vec&) -> Vec { return Vec::Unit(4, 1); };
    CHECK(viscosity_subharmonic(aff, drift).margin == doctest::Approx(-2.0).epsilon(1e-12));
}

TEST_CASE("operators must be positive definite") {
    const DomainPtr dom = LatticeDomain::box(1, -1.0, 1.0, 0.25);
    CHECK_NOTHROW(check_operator(laplacian(1), *dom));
    CHECK_THROWS_AS(anisotropic(point(1.0, -1.0)), InputError);
    LinearOperator bad = laplacian(1);
    bad.a = [](const Vec&) -> Mat { return Mat::Zero(2, 2); };
    CHECK_THROWS_AS(check_operator(bad, *dom), InputError);
}

TEST_CASE("harmonic replacement examples") {
    const DomainPtr dom = LatticeDomain::box(1, -1.0, 1.0, 0.0625);
    const LinearOperator lap = laplacian(1);
    const LatticeBall ball{Vec::Zero(2), 0.75};
    const ScalarField aff = sample(dom, [](const Vec& x) { return 0.5 - 2.0 * x(0) + x(1); });
    const ScalarField ha = harmonic_replacement(aff, lap, ball);
    const ScalarField sq = sample(dom, abs2);
    const ScalarField hs = harmonic_replacement(sq, lap, ball);
    const ScalarField cst = sample(dom, [](const Vec&) { return -1.5; });
    const ScalarField hc = harmonic_replacement(cst, lap, ball);
    const std::vector<double> oracle = five_point_harmonic(hs.domain, sq);
    double bmax = -1e300, imax = -1e300;
    for (NodeId id = 0; id < hs.domain->size(); ++id) {
        const NodeClass k = hs.domain->node_class(id);
        if (k == NodeClass::exterior) continue;
        const Vec x = hs.domain->position(id);
        CHECK(ha[id] == doctest::Approx(0.5 - 2.0 * x(0) + x(1)).epsilon(1e-9));
        CHECK(hc[id] == doctest::Approx(-1.5).epsilon(1e-12));
        CHECK(hs[id] >= abs2(x) - 1e-12);
        CHECK(std::abs(hs[id] - oracle[id]) <= 1e-8);
        if (k == NodeClass::boundary) {
            CHECK(hs[id] == abs2(x));
            bmax = std::max(bmax, hs[id]);
        } else {
            imax = std::max(imax, hs[id]);
        }
    }
    CHECK(imax <= bmax);
    CHECK_THROWS_AS(harmonic_replacement(sq, lap, {point(0.9, 0.0), 0.5}), InputError);
    CHECK_THROWS_AS(harmonic_replacement(sq, lap, {point(0.01, 0.0), 0.5}), InputError);
}

TEST_CASE("classical subharmonicity examples") {
    const DomainPtr dom = LatticeDomain::box(1, -1.0, 1.0, 0.125);
    const LinearOperator lap = laplacian(1);
    const std::vector<LatticeBall> balls = {{Vec::Zero(2), 0.5}, {point(0.25, 0.25), 0.5}};
    CHECK(classical_subharmonic(sample(dom, abs2), lap, balls).verdict);
    const ClassicalReport neg = classical_subharmonic(sample(dom, [](const Vec& x) { return -abs2(x); }), lap, balls);
    CHECK_FALSE(neg.verdict);
    CHECK(neg.witness_ball >= 0);
    const ClassicalReport harm = classical_subharmonic(sample(dom, [](const Vec& x) { return x(0) * x(0) - x(1) * x(1); }), lap, balls);
    CHECK(harm.verdict);
    CHECK(std::abs(harm.worst_excess) <= 1e-8);
    CHECK_THROWS_AS(classical_subharmonic(sample(dom, abs2), lap, {}), InputError);
}

TEST_CASE("distributional pairing examples") {
    const DomainPtr dom = LatticeDomain::box(1, -1.0, 1.0, 1.0 / 32);
    const LinearOperator lap = laplacian(1);
    const Bump bump{point(0.1, -0.2), 0.5};
    // L |x|^2 = 4 n, so the pairing is 4 n times the bump mass.
    const double pair = distributional_pairing(sample(dom, abs2), lap, bump);
    CHECK(pair == doctest::Approx(4.0 * bump.mass()).epsilon(2e-3));
    const double harm = distributional_pairing(sample(dom, [](const Vec& x) { return x(0) * x(0) - x(1) * x(1); }), lap, bump);
    CHECK(std::abs(harm) <= 1e-10);
    CHECK(distributional_pairing(sample(dom, [](const Vec& x) { return -abs2(x); }), lap, bump) < 0.0);
    CHECK_THROWS_AS(distributional_pairing(sample(dom, abs2), lap, {point(0.8, 0.0), 0.5}), InputError);
}

TEST_CASE("bump mass matches quadrature") {
    for (int n : {1, 2}) {
        const DomainPtr dom = LatticeDomain::box(n, -1.0, 1.0, n == 1 ? 1.0 / 64 : 1.0 / 16, 1);
        const Bump b{Vec::Zero(2 * n), 0.7};
        double s = 0.0;
        for (NodeId id = 0; id < dom->size(); ++id) s += b(dom->position(id));
        s *= std::pow(dom->h(), 2 * n);
        CHECK(s == doctest::Approx(b.mass()).epsilon(5e-3));
    }
}

TEST_CASE("derived operators equal the B-Laplacian") {
    CounterRng rng(2);
    const DomainPtr dom = LatticeDomain::box(2, -0.5, 0.5, 0.125);
    const Subequation sub = homogeneous(make_antilinear_linear(2, 0.1, 0));
    CMat b(2, 2);
    b << Complex(2.0, 0.0), Complex(0.3, 0.4), Complex(0.3, -0.4), Complex(0.0, 0.0);
    b(1, 1) = (1.0 + std::norm(b(0, 1))) / 2.0;
    const LinearOperator op = from_blaplacian(sub, b);
    const ScalarField u = sample(dom, [](const Vec& x) { return std::exp(x(0)) * std::cos(x(3)) + x(1) * x(2); });
    for (int k = 0; k < 20; ++k) {
        const NodeId id = dom->interior()[static_cast<size_t>(rng.uniform() * dom->interior().size())];
        CHECK(std::abs(op.stencil(*dom, id).apply(u.values, id) - blaplacian(u, sub, id, b)) <= 1e-12);
    }
}

TEST_CASE("essential usc regularization") {
    const DomainPtr dom = LatticeDomain::box(1, -1.0, 1.0, 0.125);
    for (const RegularizationCase& c : regularization_examples()) {
        CHECK_MESSAGE(c.exact, c.name);
        CHECK(c.max_deviation == 0.0);
    }
    const ScalarField smooth = sample(dom, [](const Vec& x) { return std::sin(3 * x(0)) * x(1); });
    const ScalarField same = ess_usc_regularize(smooth);
    for (NodeId id = 0; id < dom->size(); ++id) CHECK(same[id] == smooth[id]);

    CounterRng rng(8);
    ScalarField u = sample(dom, [&](const Vec&) { return rng.normal(); });
    u.mask.assign(dom->size(), 0);
    for (NodeId id = 0; id < dom->size(); ++id)
        if (rng.uniform() < 0.2) {
            u.mask[id] = 1;
            u.values[id] = 100.0;
        }
    const ScalarField r = ess_usc_regularize(u);
    ScalarField rr = ess_usc_regularize(r);
    double bound = -1e300;
    for (NodeId id = 0; id < dom->size(); ++id)
        if (!u.masked(id)) bound = std::max(bound, u[id]);
    for (NodeId id = 0; id < dom->size(); ++id) {
        CHECK(rr[id] == r[id]);
        CHECK(r[id] <= bound);
        if (!u.masked(id)) CHECK(r[id] == u[id]);
    }

    ScalarField all = sample(dom, [](const Vec&) { return 1.0; });
    all.mask.assign(dom->size(), 1);
    CHECK_THROWS_AS(ess_usc_regularize(all), InputError);
}

TEST_CASE("small equivalence triangle") {
    const TriangleBattery t = triangle_battery(4, 2, 77);
    CHECK(t.pass);
    CHECK(t.cases.size() == 12);
    CHECK_THROWS_AS(triangle_battery(0, 5, 1), InputError);
}
