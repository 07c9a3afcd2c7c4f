#include "acx/stencil.hpp"

#include <cmath>
#include <map>

#include "acx/prng.hpp"

namespace acx {

namespace {

Vec to_vec(const Offset& w) { return w.cast<double>(); }

Offset j0_offset(const Offset& w) {
    Offset out(w.size());
    for (int k = 0; k + 1 < w.size(); k += 2) {
        out(k) = -w(k + 1);
        out(k + 1) = w(k);
    }
    return out;
}

NodeId relative_id(const LatticeDomain& dom, const Offset& w) {
    NodeId id = 0;
    for (int k = 0; k < dom.dim(); ++k) id += w(k) * dom.stride(k);
    return id;
}

std::vector<std::pair<Offset, double>> symbol_terms(const Mat& a, int r) {
    Eigen::SelfAdjointEigenSolver<Mat> es(symmetrize(a));
    std::vector<std::pair<Offset, double>> terms;
    for (int k = 0; k < a.rows(); ++k) {
        const double lam = es.eigenvalues()(k);
        if (lam <= 0.0) continue;
        terms.emplace_back(snap_direction(es.eigenvectors().col(k), r), lam);
    }
    return terms;
}

}  // namespace

Offset snap_direction(const Vec& v, int r) {
    const auto& dirs = stencil_directions(static_cast<int>(v.size()), r);
    const double vv = v.squaredNorm();
    if (!(vv > 0.0)) throw InputError("cannot snap a zero direction");
    double best = -1.0;
    const Offset* pick = &dirs.front();
    for (const Offset& w : dirs) {
        const Vec wf = to_vec(w);
        const double c = v.dot(wf);
        const double score = c * c / (vv * wf.squaredNorm());
        if (score > best + 1e-14) {
            best = score;
            pick = &w;
        }
    }
    return *pick;
}

Offset snap_complex_line(const Vec& v, int r) {
    const auto& dirs = stencil_directions(static_cast<int>(v.size()), r);
    const Vec jv = standard_j(static_cast<int>(v.size()) / 2) * v;
    const double vv = v.squaredNorm();
    if (!(vv > 0.0)) throw InputError("cannot snap a zero direction");
    double best = -1.0;
    const Offset* pick = &dirs.front();
    for (const Offset& w : dirs) {
        const Vec wf = to_vec(w);
        const double c1 = v.dot(wf), c2 = jv.dot(wf);
        const double score = (c1 * c1 + c2 * c2) / (vv * wf.squaredNorm());
        if (score > best + 1e-14) {
            best = score;
            pick = &w;
        }
    }
    return *pick;
}

Stencil assemble(const LatticeDomain& dom, const std::vector<std::pair<Offset, double>>& second,
                 const Vec& drift) {
    const double h = dom.h();
    std::map<NodeId, double> acc;
    for (const auto& [w, weight] : second) {
        if (weight < 0.0) throw InputError("second-order weights must be non-negative");
        if (weight == 0.0) continue;
        const double c = weight / (h * h * w.squaredNorm());
        const NodeId id = relative_id(dom, w);
        acc[id] += c;
        acc[-id] += c;
    }
    for (int i = 0; i < dom.dim(); ++i) {
        const double bi = drift(i);
        if (bi == 0.0) continue;
        const NodeId s = dom.stride(i);
        const double half = std::abs(bi) / (2.0 * h);
        auto fwd = acc.find(s), bwd = acc.find(-s);
        const double cf = fwd == acc.end() ? 0.0 : fwd->second;
        const double cb = bwd == acc.end() ? 0.0 : bwd->second;
        if (cf >= half && cb >= half) {
            acc[s] += bi / (2.0 * h);
            acc[-s] -= bi / (2.0 * h);
        } else if (bi > 0.0) {
            acc[s] += bi / h;
        } else {
            acc[-s] += -bi / h;
        }
    }
    Stencil st;
    for (const auto& [id, c] : acc) {
        if (c == 0.0) continue;
        st.offsets.push_back(id);
        st.coefs.push_back(c);
        st.diag += c;
    }
    return st;
}

Stencil compile_linear(const LatticeDomain& dom, int r, const Mat& a, const Vec& b) {
    if (a.rows() != dom.dim() || b.size() != dom.dim()) throw InputError("operator has wrong dimension");
    return assemble(dom, symbol_terms(a, r), b);
}

PointGeometry point_geometry(const AlmostComplexField& acx, const Vec& x) {
    PointGeometry geo;
    geo.g = acx.g(x);
    const int d = acx.dim();
    const Mat j0 = standard_j(acx.n());
    geo.complex_linear = (geo.g * j0 - j0 * geo.g).cwiseAbs().maxCoeff() <= kTolAlg;
    geo.e_basis.reserve(d);
    for (int i = 0; i < d; ++i) geo.e_basis.push_back(lower_order_e(acx, x, Vec::Unit(d, i)));
    return geo;
}

Mat blaplacian_symbol(const PointGeometry& geo, const CMat& b) {
    return symmetrize(geo.g * realify(b) * geo.g.transpose());
}

Vec blaplacian_drift(const PointGeometry& geo, const Mat& s) {
    Vec drift(static_cast<int>(geo.e_basis.size()));
    for (size_t i = 0; i < geo.e_basis.size(); ++i) drift(i) = (s.cwiseProduct(geo.e_basis[i])).sum();
    return drift;
}

void check_unit_hermitian(const CMat& b) {
    if (b.rows() != b.cols()) throw InputError("B must be square");
    const double scale = std::max(1.0, b.cwiseAbs().maxCoeff());
    if ((b - b.adjoint()).cwiseAbs().maxCoeff() > 1e-10 * scale) throw InputError("B must be hermitian");
    if (min_eigenvalue(b) <= 0.0) throw InputError("B must be positive definite");
    const double det_tol = 1e-8 * std::max(1.0, std::pow(scale, static_cast<double>(b.rows())));
    if (std::abs(b.determinant().real() - 1.0) > det_tol) throw InputError("B must have unit determinant");
}

Stencil compile_blaplacian(const LatticeDomain& dom, int r, const PointGeometry& geo, const CMat& b) {
    check_unit_hermitian(b);
    const int n = static_cast<int>(b.rows());
    if (2 * n != dom.dim()) throw InputError("B has wrong dimension");
    const Mat j0 = standard_j(n);
    Eigen::SelfAdjointEigenSolver<CMat> es(0.5 * (b + b.adjoint()));
    std::vector<std::pair<Offset, double>> terms;
    for (int k = 0; k < n; ++k) {
        const double mu = es.eigenvalues()(k);
        const Vec e = realify(CVec(es.eigenvectors().col(k)));
        const Vec v = geo.g * e;
        const Vec vp = geo.g * (j0 * e);
        if (geo.complex_linear) {
            const Offset w = snap_complex_line(v, r);
            terms.emplace_back(w, mu * v.squaredNorm());
            terms.emplace_back(j0_offset(w), mu * v.squaredNorm());
        } else {
            terms.emplace_back(snap_direction(v, r), mu * v.squaredNorm());
            terms.emplace_back(snap_direction(vp, r), mu * vp.squaredNorm());
        }
    }
    const Vec drift = blaplacian_drift(geo, blaplacian_symbol(geo, b));
    return assemble(dom, terms, drift);
}

std::vector<CMat> fixed_b_family(int n) {
    std::vector<CMat> family;
    family.push_back(CMat::Identity(n, n));
    if (n == 1) return family;
    CounterRng rng(0x0ACE5EEDULL);
    for (int q = 0; q < 4; ++q) {
        Eigen::MatrixXcd z(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) z(i, j) = Complex(rng.normal(), rng.normal());
        Eigen::HouseholderQR<Eigen::MatrixXcd> qr(z);
        const Eigen::MatrixXcd u = qr.householderQ();
        for (double t : {2.0, 4.0}) {
            Eigen::VectorXcd diag = Eigen::VectorXcd::Ones(n);
            diag(0) = t;
            diag(1) = 1.0 / t;
            CMat b = u * diag.asDiagonal() * u.adjoint();
            family.push_back(0.5 * (b + b.adjoint()));
        }
    }
    return family;
}

CMat adapted_b(const CMat& h, double floor, double cap) {
    const int n = static_cast<int>(h.rows());
    Eigen::SelfAdjointEigenSolver<CMat> es(0.5 * (h + h.adjoint()));
    Eigen::VectorXd lam = es.eigenvalues().cwiseMax(floor);
    Eigen::VectorXd inv = lam.cwiseInverse();
    auto normalize = [n](Eigen::VectorXd& v) {
        const double logdet = v.array().log().sum();
        v *= std::exp(-logdet / n);
    };
    normalize(inv);
    if (cap > 0.0) {
        inv = inv.cwiseMax(1.0 / cap).cwiseMin(cap);
        normalize(inv);
    }
    const CMat u = es.eigenvectors();
    CMat b = u * inv.cast<Complex>().asDiagonal() * u.adjoint();
    return 0.5 * (b + b.adjoint());
}

}  // namespace acx
