#pragma once

// Seeded property batteries: verdict agreement, the linear equivalence triangle, restriction.

#include <cstdint>
#include <string>
#include <vector>

#include "acx/potential.hpp"
#include "acx/psh.hpp"

namespace acx {

/// Random field u = x^T R x + S-part + p.x with complex hessian H (oracle) known in closed form.
struct QuadraticSample {
    Mat q;           ///< real hessian of u
    Vec p;
    double lambda_min;  ///< smallest eigenvalue of H under J0
};

/// Hermitian part U diag(lambda) U^* with |lambda_k| in [lo, hi] and random signs (all positive when
/// `positive`), plus an anti-hermitian real part of size `anti` and a linear term of size `linear`.
QuadraticSample random_quadratic(int n, std::uint64_t seed, double lo, double hi, bool positive, double anti,
                                 double linear);
ScalarField sample_quadratic(const DomainPtr& dom, const QuadraticSample& q);

struct AgreementCase {
    int n = 1;
    std::string label;          ///< "random" or "corrupted"
    bool expect_psh = false;    ///< oracle label
    double psh_margin = 0.0;
    double blap_margin = 0.0;
    double tol = 0.0;
    bool psh_verdict = false;
    bool blap_verdict = false;
    bool undecided = false;
    bool agree = false;
};

struct AgreementBattery {
    std::vector<AgreementCase> cases;
    int decided = 0;
    int disagreements = 0;
    int label_mismatches = 0;
    bool pass = false;
};

/// `count` quadratics per n under J0; verdicts must agree outside |margin| <= 10 tol and match the
/// oracle. `inject_corrupted` appends -|x|^2 labelled psh.
AgreementBattery agreement_battery(const std::vector<int>& dims, int count, std::uint64_t seed,
                                   bool inject_corrupted = false);

struct TriangleCase {
    int field = 0;
    std::string op;
    bool viscosity = false;
    bool classical = false;
    double viscosity_margin = 0.0;
    double classical_excess = 0.0;
    std::vector<double> pairings;
    bool pairing_ok = true;
    bool consistent = false;
};

struct TriangleBattery {
    std::vector<TriangleCase> cases;
    int rejected_samples = 0;  ///< fields whose L u changes sign on the lattice
    bool pass = false;
};

/// n = 1 fields on [-1, 1]^2 (h = 1/8) against the laplacian, an anisotropic operator and a
/// B-Laplacian of the perturbed structure.
TriangleBattery triangle_battery(int fields, int bumps, std::uint64_t seed);

struct RegularizationCase {
    std::string name;
    double max_deviation = 0.0;  ///< sup |u~ - expected| over non-exterior nodes
    bool exact = false;
};

/// Masked spike (expected u~ = 0) and max(x1, 0) with a corrupted masked row y1 = 0.
std::vector<RegularizationCase> regularization_examples();

struct RestrictionCase {
    std::string preset;
    double ambient_margin = 0.0;
    double slice_margin = 0.0;
    double slack = 0.0;
    bool ambient_psh = false;
    bool pass = false;
};

struct RestrictionBattery {
    std::vector<RestrictionCase> cases;
    int ambient_psh = 0;
    int false_implications = 0;
    bool pass = false;
};

/// n = 2, m = 1: `count` quadratics per slice-compatible preset (standard and the eps = 0.1 antilinear one).
RestrictionBattery restriction_battery(int count, std::uint64_t seed);

}  // namespace acx
