#include "doctest.h"

#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

#include "acx/lattice.hpp"
#include "acx/prng.hpp"

using namespace acx;

namespace {

Offset offset(std::initializer_list<int> v) {
    Offset w(static_cast<int>(v.size()));
    int k = 0;
    for (int x : v) w(k++) = x;
    return w;
}

NodeId node_at(const DomainPtr& dom, std::initializer_list<double> x) {
    Vec v(static_cast<int>(x.size()));
    int k = 0;
    for (double c : x) v(k++) = c;
    return dom->locate(v);
}

int gcd_all(const std::vector<int>& w) {
    int g = 0;
    for (int x : w) g = std::gcd(g, std::abs(x));
    return g;
}

}  // namespace

TEST_CASE("fd jet is exact on affine and quadratic fields") {
    const DomainPtr dom = LatticeDomain::box(2, -1.0, 1.0, 0.25);
    Vec p(4);
    p << 0.3, -1.0, 2.0, 0.5;
    Mat q(4, 4);
    q << 2, 0.5, -1, 0, 0.5, 1, 0.2, 0.3, -1, 0.2, 3, -0.4, 0, 0.3, -0.4, 1.5;
    const ScalarField aff = sample(dom, [&](const Vec& x) { return 1.5 + p.dot(x); });
    const ScalarField quad = sample(dom, [&](const Vec& x) { return 0.5 * x.dot(q * x) - p.dot(x); });
    for (NodeId id : dom->interior()) {
        const ReducedJet ja = fd_jet(aff, id);
        CHECK((ja.p - p).cwiseAbs().maxCoeff() <= 1e-12);
        CHECK(ja.a.cwiseAbs().maxCoeff() <= 1e-11);
        const ReducedJet jq = fd_jet(quad, id);
        CHECK((jq.a - q).cwiseAbs().maxCoeff() <= 1e-10);
        CHECK((jq.p - (q * dom->position(id) - p)).cwiseAbs().maxCoeff() <= 1e-12);
    }
}

TEST_CASE("fd jet error on sin(x1) obeys the Taylor bound") {
    for (double h : {0.1, 0.05}) {
        const DomainPtr dom = LatticeDomain::box(1, -1.0, 1.0, h);
        const ScalarField u = sample(dom, [](const Vec& x) { return std::sin(x(0)); });
        for (NodeId id : dom->interior()) {
            const double x1 = dom->position(id)(0);
            CHECK(std::abs(fd_jet(u, id).a(0, 0) + std::sin(x1)) <= h * h / 12.0 * 1.0 + 1e-12);
        }
    }
}

TEST_CASE("directional second differences") {
    const DomainPtr dom = LatticeDomain::box(1, -1.0, 1.0, 0.125, 2);
    Mat q(2, 2);
    q << 1.0, 0.7, 0.7, -2.0;
    const ScalarField u = sample(dom, [&](const Vec& x) { return 0.5 * x.dot(q * x); });
    const ScalarField abs2 = sample(dom, [](const Vec& x) { return x.squaredNorm(); });
    const NodeId c = node_at(dom, {0.0, 0.0});
    for (const Offset& w : stencil_directions(2, 2)) {
        const Vec wv = w.cast<double>();
        CHECK(directional_second(u, c, w) == doctest::Approx(wv.dot(q * wv) / wv.squaredNorm()).epsilon(1e-12));
        CHECK(directional_second(u, c, w) == directional_second(u, c, Offset(-w)));
        CHECK(directional_second(abs2, c, w) == doctest::Approx(2.0).epsilon(1e-12));
    }
}

TEST_CASE("upwind first differences") {
    const DomainPtr dom = LatticeDomain::box(1, -1.0, 1.0, 0.125);
    Vec p(2);
    p << 0.4, -3.0;
    const ScalarField aff = sample(dom, [&](const Vec& x) { return p.dot(x); });
    const ScalarField half = sample(dom, [](const Vec& x) { return 0.5 * x.squaredNorm(); });
    CounterRng rng(3);
    for (NodeId id : dom->interior()) {
        Vec b(2);
        b << rng.normal(), rng.normal();
        CHECK(upwind_first(aff, id, b) == doctest::Approx(b.dot(p)).epsilon(1e-12));
        CHECK(upwind_first(aff, id, Vec::Zero(2)) == 0.0);
        const double x1 = dom->position(id)(0);
        CHECK(upwind_first(half, id, Vec::Unit(2, 0)) == doctest::Approx(x1 + 0.0625).epsilon(1e-12));
    }
}

TEST_CASE("slice restriction") {
    const DomainPtr dom = LatticeDomain::box(2, -1.0, 1.0, 0.25);
    const ScalarField z1 = sample(dom, [](const Vec& x) { return x(0) * x(0) + x(1) * x(1); });
    const ScalarField cst = sample(dom, [](const Vec&) { return 3.5; });
    const ScalarField rez1z2 = sample(dom, [](const Vec& x) { return x(0) * x(2) - x(1) * x(3); });
    const ScalarField r1 = restrict_to_slice(z1, 1), r2 = restrict_to_slice(cst, 1), r3 = restrict_to_slice(rez1z2, 1);
    const DomainPtr sd = r1.domain;
    CHECK(sd->dim() == 2);
    int nodes = 0;
    for (NodeId id = 0; id < sd->size(); ++id) {
        if (sd->node_class(id) == NodeClass::exterior) continue;
        ++nodes;
        CHECK(r1[id] == doctest::Approx(sd->position(id).squaredNorm()));
        CHECK(r2[id] == 3.5);
        CHECK(r3[id] == 0.0);
    }
    CHECK(nodes == 81);
    CHECK_THROWS_AS(restrict_to_slice(z1, 0), InputError);
}

TEST_CASE("node classification is a partition with closed stencils") {
    Vec c = Vec::Zero(4);
    for (const DomainPtr& dom : {LatticeDomain::box(1, -1.0, 1.0, 0.125, 2), LatticeDomain::ball(1, Vec::Zero(2), 1.0, 0.1, 2),
                                 LatticeDomain::ball(2, c, 1.0, 0.25, 2)}) {
        std::size_t interior = 0, boundary = 0, exterior = 0;
        for (NodeId id = 0; id < dom->size(); ++id) {
            const NodeClass k = dom->node_class(id);
            if (k == NodeClass::interior) ++interior;
            else if (k == NodeClass::boundary) ++boundary;
            else ++exterior;
            if (k != NodeClass::exterior) CHECK(dom->in_region(dom->position(id)));
            if (k != NodeClass::interior) continue;
            const int r = dom->stencil_radius(id);
            CHECK(r >= 1);
            CHECK(r <= dom->rho());
            // Every point of the cube of half-width r h around an interior node is a usable neighbour.
            for (int rr = 1; rr <= r; ++rr)
                for (const Offset& w : stencil_directions(dom->dim(), rr)) {
                    CHECK(dom->neighbor(id, w) >= 0);
                    CHECK(dom->neighbor(id, Offset(-w)) >= 0);
                }
        }
        CHECK(interior == dom->interior().size());
        CHECK(boundary == dom->boundary().size());
        CHECK(interior + boundary + exterior == static_cast<std::size_t>(dom->size()));
        CHECK(interior > 0);
    }
}

TEST_CASE("reduced stencil directions match a brute-force enumeration") {
    for (int dim : {2, 4}) {
        for (int r : {1, 2}) {
            std::set<std::vector<int>> oracle;
            std::vector<int> w(dim, -r);
            for (;;) {
                int first = 0;
                for (int x : w)
                    if (x != 0) {
                        first = x;
                        break;
                    }
                if (first > 0 && gcd_all(w) == 1) oracle.insert(w);
                int k = 0;
                while (k < dim && w[k] == r) w[k++] = -r;
                if (k == dim) break;
                ++w[k];
            }
            std::set<std::vector<int>> got;
            for (const Offset& o : stencil_directions(dim, r)) got.insert(std::vector<int>(o.data(), o.data() + dim));
            CHECK(got == oracle);
        }
    }
    CHECK(stencil_directions(2, 1).size() == 4);
    CHECK(stencil_directions(2, 2).size() == 8);
}

TEST_CASE("CSV round trip is exact") {
    const DomainPtr dom = LatticeDomain::ball(1, Vec::Zero(2), 1.0, 1.0 / 7.0, 2);
    ScalarField u = sample(dom, [](const Vec& x) { return std::exp(x(0)) / 3.0 - std::sin(x(1)); });
    u.mask.assign(dom->size(), 0);
    u.mask[dom->interior().front()] = 1;
    std::stringstream ss;
    write_csv(u, ss);
    const std::string text = ss.str();
    CHECK(text.rfind("x1,y1,value,class,mask\n", 0) == 0);
    const ScalarField v = read_csv(dom, ss);
    for (NodeId id = 0; id < dom->size(); ++id) {
        if (dom->node_class(id) == NodeClass::exterior) continue;
        CHECK(v[id] == u[id]);
        CHECK(v.masked(id) == u.masked(id));
    }
    std::stringstream bad("x1,y1,value,class\n0,0,1,interior\n");
    CHECK_THROWS_AS(read_csv(dom, bad), InputError);
}

TEST_CASE("domain validation") {
    CHECK_THROWS_AS(LatticeDomain::box(1, -1.0, 1.0, 0.0), InputError);
    CHECK_THROWS_AS(LatticeDomain::box(4, -1.0, 1.0, 0.5), InputError);
    CHECK_THROWS_AS(LatticeDomain::box(1, -1.0, 1.0, 0.5, 0), InputError);
    CHECK_THROWS_AS(LatticeDomain::ball(1, Vec::Zero(2), -1.0, 0.5), InputError);
    const DomainPtr dom = LatticeDomain::box(1, -1.0, 1.0, 0.25);
    CHECK(node_at(dom, {0.25, -0.5}) >= 0);
    CHECK(node_at(dom, {0.2, -0.5}) < 0);
    CHECK(dom->neighbor(node_at(dom, {1.0, 1.0}), offset({1, 0})) < 0);
}
