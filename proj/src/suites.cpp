#include "acx/suites.hpp"

#include <cmath>
#include <limits>

#include "acx/prng.hpp"

namespace acx {

namespace {

std::uint64_t case_seed(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
    return CounterRng::mix(seed ^ CounterRng::mix(stream * 0x100000001B3ULL + index));
}

CMat random_unitary(int n, CounterRng& rng) {
    CMat z(n, n);
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) z(r, c) = Complex(rng.normal(), rng.normal());
    Eigen::HouseholderQR<CMat> qr(z);
    return qr.householderQ() * CMat::Identity(n, n);
}

Mat random_symmetric(int d, CounterRng& rng) {
    Mat m(d, d);
    for (int r = 0; r < d; ++r)
        for (int c = 0; c < d; ++c) m(r, c) = rng.normal();
    return symmetrize(m);
}

}  // namespace

QuadraticSample random_quadratic(int n, std::uint64_t seed, double lo, double hi, bool positive, double anti,
                                 double linear) {
    CounterRng rng(seed);
    const int d = 2 * n;
    Eigen::VectorXd lam(n);
    for (int k = 0; k < n; ++k) {
        lam(k) = rng.uniform(lo, hi);
        if (!positive && rng.uniform() < 0.5) lam(k) = -lam(k);
    }
    const CMat u = random_unitary(n, rng);
    const CMat h = u * lam.cast<Complex>().asDiagonal() * u.adjoint();
    const Mat j = standard_j(n);
    const Mat m = random_symmetric(d, rng);
    const Mat s = anti * 0.5 * (m - j.transpose() * m * j);
    QuadraticSample out;
    out.q = 2.0 * (realify(CMat(0.5 * (h + h.adjoint()))) + s);
    out.p = Vec(d);
    for (int k = 0; k < d; ++k) out.p(k) = linear * rng.normal();
    out.lambda_min = lam.minCoeff();
    return out;
}

ScalarField sample_quadratic(const DomainPtr& dom, const QuadraticSample& q) {
    return sample(dom, [q](const Vec& x) { return 0.5 * x.dot(q.q * x) + q.p.dot(x); });
}

AgreementBattery agreement_battery(const std::vector<int>& dims, int count, std::uint64_t seed,
                                   bool inject_corrupted) {
    if (count <= 0) throw InputError("agreement battery size must be positive");
    if (dims.empty()) throw InputError("agreement battery needs at least one dimension");
    constexpr double kTol = 1e-8;
    AgreementBattery out;
    auto run = [&](int n, const ScalarField& u, const std::string& label, bool expect) {
        const Subequation sub = homogeneous(make_standard(n));
        AgreementCase c;
        c.n = n;
        c.label = label;
        c.expect_psh = expect;
        c.tol = kTol;
        const PshReport direct = psh_margin(u, sub, kTol);
        const PshReport viab = psh_via_blaplacians(u, sub, fixed_b_family(n), kTol);
        c.psh_margin = direct.margin;
        c.blap_margin = viab.margin;
        c.psh_verdict = direct.verdict;
        c.blap_verdict = viab.verdict;
        c.undecided = std::abs(direct.margin) <= 10.0 * kTol;
        c.agree = c.undecided || c.psh_verdict == c.blap_verdict;
        if (!c.undecided) {
            ++out.decided;
            if (!c.agree) ++out.disagreements;
            if (c.psh_verdict != expect || c.blap_verdict != expect) ++out.label_mismatches;
        }
        out.cases.push_back(c);
    };
    for (int n : dims) {
        if (n < 1 || n > kMaxComplexDim) throw InputError("agreement battery dimension out of range");
        const DomainPtr dom = LatticeDomain::box(n, -0.5, 0.5, 0.25, 2);
        for (int k = 0; k < count; ++k) {
            const QuadraticSample q = random_quadratic(n, case_seed(seed, 7 + n, k), 0.25, 1.5, false, 0.5, 0.5);
            run(n, sample_quadratic(dom, q), "random", q.lambda_min > 0.0);
        }
        if (inject_corrupted)
            run(n, sample(dom, [](const Vec& x) { return -x.squaredNorm(); }), "corrupted", true);
    }
    out.pass = out.disagreements == 0 && out.label_mismatches == 0;
    return out;
}

TriangleBattery triangle_battery(int fields, int bumps, std::uint64_t seed) {
    if (fields <= 0 || bumps <= 0) throw InputError("triangle battery sizes must be positive");
    const DomainPtr dom = LatticeDomain::box(1, -1.0, 1.0, 0.125, 2);
    Vec w(2);
    w << 1.0, 3.0;
    const Subequation pert = homogeneous(make_antilinear_linear(1, 0.1, 0));
    CMat one = CMat::Identity(1, 1);
    const std::vector<LinearOperator> ops = {laplacian(1), anisotropic(w), from_blaplacian(pert, one)};
    std::vector<LatticeBall> balls;
    for (const auto& [cx, cy] : {std::pair{0.0, 0.0}, std::pair{0.25, -0.25}, std::pair{-0.25, 0.25}}) {
        Vec c(2);
        c << cx, cy;
        balls.push_back({c, 0.5});
    }
    constexpr double kBand = 0.1;
    constexpr double kPairTol = 1e-9;

    TriangleBattery out;
    CounterRng bump_rng(case_seed(seed, 3, 0));
    std::vector<Bump> bank;
    for (int k = 0; k < bumps; ++k) {
        Vec c(2);
        c << bump_rng.uniform(-0.3, 0.3), bump_rng.uniform(-0.3, 0.3);
        bank.push_back({c, bump_rng.uniform(0.25, 0.3)});
    }

    int accepted = 0;
    for (std::uint64_t draw = 0; accepted < fields; ++draw) {
        if (draw > static_cast<std::uint64_t>(100 * fields)) throw NumericalError("triangle battery sampling stalled");
        CounterRng rng(case_seed(seed, 5, draw));
        QuadraticSample q;
        q.q = random_symmetric(2, rng);
        q.p = Vec(2);
        q.p << 0.5 * rng.normal(), 0.5 * rng.normal();
        const ScalarField u = sample_quadratic(dom, q);
        bool clean = true;
        for (const LinearOperator& op : ops) {
            double lo = std::numeric_limits<double>::infinity(), hi = -lo;
            for (NodeId id : dom->interior()) {
                const Vec x = dom->position(id);
                const double v = op.a(x).cwiseProduct(q.q).sum() + op.b(x).dot(q.q * x + q.p);
                lo = std::min(lo, v);
                hi = std::max(hi, v);
            }
            if (!(lo >= kBand || hi <= -kBand)) clean = false;
        }
        if (!clean) {
            ++out.rejected_samples;
            continue;
        }
        for (const LinearOperator& op : ops) {
            TriangleCase c;
            c.field = accepted;
            c.op = op.provenance;
            const LinearReport v = viscosity_subharmonic(u, op);
            const ClassicalReport cl = classical_subharmonic(u, op, balls);
            c.viscosity = v.verdict;
            c.viscosity_margin = v.margin;
            c.classical = cl.verdict;
            c.classical_excess = cl.worst_excess;
            for (const Bump& b : bank) {
                c.pairings.push_back(distributional_pairing(u, op, b));
                if (c.viscosity && c.pairings.back() < -kPairTol) c.pairing_ok = false;
            }
            c.consistent = c.viscosity == c.classical && c.pairing_ok;
            out.cases.push_back(std::move(c));
        }
        ++accepted;
    }
    out.pass = true;
    for (const TriangleCase& c : out.cases) out.pass = out.pass && c.consistent;
    return out;
}

std::vector<RegularizationCase> regularization_examples() {
    const DomainPtr dom = LatticeDomain::box(1, -1.0, 1.0, 0.125, 2);
    std::vector<RegularizationCase> out;
    auto finish = [&](const std::string& name, const ScalarField& u, const ScalarFn& expected) {
        const ScalarField r = ess_usc_regularize(u);
        RegularizationCase c;
        c.name = name;
        for (NodeId id = 0; id < dom->size(); ++id) {
            if (dom->node_class(id) == NodeClass::exterior) continue;
            c.max_deviation = std::max(c.max_deviation, std::abs(r[id] - expected(dom->position(id))));
        }
        c.exact = c.max_deviation == 0.0;
        out.push_back(c);
    };

    ScalarField spike = sample(dom, [](const Vec&) { return 0.0; });
    spike.mask.assign(dom->size(), 0);
    const NodeId centre = dom->locate(Vec::Zero(2));
    spike.values[centre] = 1.0;
    spike.mask[centre] = 1;
    finish("masked-spike", spike, [](const Vec&) { return 0.0; });

    const ScalarFn ramp = [](const Vec& x) { return std::max(x(0), 0.0); };
    ScalarField row = sample(dom, ramp);
    row.mask.assign(dom->size(), 0);
    for (NodeId id = 0; id < dom->size(); ++id)
        if (std::abs(dom->position(id)(1)) < 1e-12) {
            row.values[id] = 5.0;
            row.mask[id] = 1;
        }
    finish("masked-row", row, ramp);
    return out;
}

RestrictionBattery restriction_battery(int count, std::uint64_t seed) {
    if (count <= 0) throw InputError("restriction battery size must be positive");
    const DomainPtr dom = LatticeDomain::box(2, -0.5, 0.5, 0.125, 2);
    const std::vector<AcxPtr> presets = {make_standard(2), make_antilinear_slice_compatible(2, 0.1, 1)};
    RestrictionBattery out;
    bool full = true;
    for (size_t p = 0; p < presets.size(); ++p) {
        const Subequation sub = homogeneous(presets[p]);
        int found = 0;
        for (int draw = 0; found < count && draw < 5 * count; ++draw) {
            const QuadraticSample q = random_quadratic(2, case_seed(seed, 11 + p, draw), 0.5, 2.0, true, 0.3, 0.5);
            const RestrictionReport r = restriction_check(sample_quadratic(dom, q), sub, 1);
            RestrictionCase c;
            c.preset = presets[p]->id();
            c.ambient_margin = r.ambient.margin;
            c.slice_margin = r.slice.margin;
            c.slack = r.slack;
            c.ambient_psh = r.ambient.verdict;
            c.pass = r.pass;
            if (c.ambient_psh) {
                ++found;
                ++out.ambient_psh;
                if (!c.pass) ++out.false_implications;
            }
            out.cases.push_back(c);
        }
        if (found < count) full = false;
    }
    out.pass = full && out.false_implications == 0;
    return out;
}

}  // namespace acx
