#include "acx/lattice.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <map>
#include <mutex>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string>

namespace acx {

const char* to_string(NodeClass c) {
    switch (c) {
        case NodeClass::interior: return "interior";
        case NodeClass::boundary: return "boundary";
        default: return "exterior";
    }
}

namespace {

void check_common(int n, double h, int rho) {
    if (n < 1 || n > kMaxComplexDim) throw InputError("complex dimension must be in {1,2,3}");
    if (!(h > 0.0) || !std::isfinite(h)) throw InputError("lattice spacing must be positive");
    if (rho < 1 || rho > 4) throw InputError("stencil radius must be in [1, 4]");
}

constexpr NodeId kMaxNodes = NodeId{1} << 27;

}  // namespace

std::shared_ptr<const LatticeDomain> LatticeDomain::box(int n, double a, double b, double h, int rho) {
    check_common(n, h, rho);
    if (!(b > a)) throw InputError("box needs a < b");
    const double steps = (b - a) / h;
    const long k = std::lround(steps);
    if (std::abs(steps - k) > 1e-6 || k < 2) throw InputError("box side must be a multiple (>= 2) of h");
    auto d = std::shared_ptr<LatticeDomain>(new LatticeDomain());
    d->n_ = n;
    d->h_ = h;
    d->rho_ = rho;
    d->shape_ = Shape::box;
    d->lo_ = a;
    d->hi_ = b;
    d->origin_ = Vec::Constant(2 * n, a);
    d->counts_.assign(2 * n, static_cast<int>(k + 1));
    d->classify();
    return d;
}

std::shared_ptr<const LatticeDomain> LatticeDomain::ball(int n, const Vec& center, double radius, double h,
                                                         int rho) {
    check_common(n, h, rho);
    if (center.size() != 2 * n) throw InputError("ball center has wrong dimension");
    if (!(radius > 0.0)) throw InputError("ball radius must be positive");
    const int m = static_cast<int>(std::floor(radius / h + 1e-9));
    if (m < 1) throw InputError("ball radius smaller than the spacing");
    auto d = std::shared_ptr<LatticeDomain>(new LatticeDomain());
    d->n_ = n;
    d->h_ = h;
    d->rho_ = rho;
    d->shape_ = Shape::ball;
    d->center_ = center;
    d->radius_ = radius;
    d->origin_ = center - Vec::Constant(2 * n, m * h);
    d->counts_.assign(2 * n, 2 * m + 1);
    d->classify();
    return d;
}

bool LatticeDomain::in_region(const Vec& x) const {
    const double eps = 1e-9 * h_;
    if (shape_ == Shape::box) {
        for (int k = 0; k < dim(); ++k)
            if (x(k) < lo_ - eps || x(k) > hi_ + eps) return false;
        return true;
    }
    return (x - center_).norm() <= radius_ + eps;
}

bool LatticeDomain::cube_inside(const Vec& x, double half) const {
    const double eps = 1e-9 * h_;
    if (shape_ == Shape::box) {
        for (int k = 0; k < dim(); ++k)
            if (x(k) - half < lo_ - eps || x(k) + half > hi_ + eps) return false;
        return true;
    }
    double s = 0.0;
    for (int k = 0; k < dim(); ++k) {
        const double t = std::abs(x(k) - center_(k)) + half;
        s += t * t;
    }
    return std::sqrt(s) <= radius_ + eps;
}

void LatticeDomain::classify() {
    const int d = dim();
    strides_.assign(d, 1);
    size_ = 1;
    for (int k = d - 1; k >= 0; --k) {
        strides_[k] = size_;
        size_ *= counts_[k];
        if (size_ > kMaxNodes) throw InputError("lattice too large");
    }
    cls_.assign(size_, NodeClass::exterior);
    radius_of_.assign(size_, 0);
    interior_.clear();
    boundary_.clear();
    for (NodeId id = 0; id < size_; ++id) {
        const Vec x = position(id);
        if (!in_region(x)) continue;
        if (!cube_inside(x, h_)) {
            cls_[id] = NodeClass::boundary;
            boundary_.push_back(id);
            continue;
        }
        cls_[id] = NodeClass::interior;
        interior_.push_back(id);
        int r = 1;
        for (int t = rho_; t > 1; --t) {
            if (cube_inside(x, t * h_)) {
                r = t;
                break;
            }
        }
        radius_of_[id] = static_cast<std::uint8_t>(r);
    }
}

Offset LatticeDomain::multi_index(NodeId id) const {
    Offset i(dim());
    for (int k = 0; k < dim(); ++k) {
        i(k) = static_cast<int>(id / strides_[k]);
        id -= i(k) * strides_[k];
    }
    return i;
}

Vec LatticeDomain::position(NodeId id) const {
    const Offset i = multi_index(id);
    Vec x(dim());
    for (int k = 0; k < dim(); ++k) x(k) = origin_(k) + i(k) * h_;
    return x;
}

NodeId LatticeDomain::neighbor(NodeId id, const Offset& w) const {
    const Offset i = multi_index(id);
    NodeId out = 0;
    for (int k = 0; k < dim(); ++k) {
        const int j = i(k) + w(k);
        if (j < 0 || j >= counts_[k]) return -1;
        out += j * strides_[k];
    }
    return cls_[out] == NodeClass::exterior ? -1 : out;
}

NodeId LatticeDomain::locate(const Vec& x) const {
    if (x.size() != dim()) return -1;
    NodeId out = 0;
    for (int k = 0; k < dim(); ++k) {
        const double t = (x(k) - origin_(k)) / h_;
        const long j = std::lround(t);
        if (std::abs(t - j) > 1e-6 || j < 0 || j >= counts_[k]) return -1;
        out += j * strides_[k];
    }
    return out;
}

std::shared_ptr<const LatticeDomain> LatticeDomain::slice(int m) const {
    if (m < 1 || m > n_) throw InputError("slice dimension must satisfy 1 <= m <= n");
    for (int k = 2 * m; k < dim(); ++k) {
        const double t = -origin_(k) / h_;
        const long j = std::lround(t);
        if (std::abs(t - j) > 1e-6 || j < 0 || j >= counts_[k])
            throw InputError("slice C^m x {0} does not meet the lattice");
    }
    auto d = std::shared_ptr<LatticeDomain>(new LatticeDomain(*this));
    d->n_ = m;
    d->origin_ = origin_.head(2 * m);
    d->counts_.resize(2 * m);
    if (shape_ == Shape::ball) {
        const double tail = center_.tail(dim() - 2 * m).squaredNorm();
        if (tail >= radius_ * radius_) throw InputError("slice C^m x {0} misses the ball");
        d->center_ = center_.head(2 * m);
        d->radius_ = std::sqrt(radius_ * radius_ - tail);
    }
    d->classify();
    if (d->interior_.empty() && d->boundary_.empty()) throw InputError("empty slice");
    return d;
}

const std::vector<Offset>& stencil_directions(int dim, int r) {
    static std::mutex mu;
    static std::map<std::pair<int, int>, std::vector<Offset>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto& out = cache[{dim, r}];
    if (!out.empty()) return out;
    const int side = 2 * r + 1;
    long total = 1;
    for (int k = 0; k < dim; ++k) total *= side;
    for (long code = 0; code < total; ++code) {
        Offset w(dim);
        long c = code;
        for (int k = dim - 1; k >= 0; --k) {
            w(k) = static_cast<int>(c % side) - r;
            c /= side;
        }
        int first = 0, g = 0;
        for (int k = 0; k < dim; ++k) {
            if (first == 0) first = w(k);
            g = std::gcd(g, std::abs(w(k)));
        }
        if (first > 0 && g == 1) out.push_back(w);
    }
    return out;
}

ScalarField sample(const DomainPtr& domain, const ScalarFn& fn) {
    ScalarField u{domain, std::vector<double>(domain->size(), std::numeric_limits<double>::quiet_NaN()), {}};
    for (NodeId id = 0; id < domain->size(); ++id)
        if (domain->node_class(id) != NodeClass::exterior) u.values[id] = fn(domain->position(id));
    return u;
}

namespace {

double value_at(const ScalarField& u, NodeId id) {
    if (id < 0) throw InputError("stencil offset leaves the domain");
    if (u.masked(id)) throw InputError("stencil touches a masked node");
    return u.values[id];
}

void require_interior(const ScalarField& u, NodeId node) {
    if (node < 0 || node >= u.domain->size() || u.domain->node_class(node) != NodeClass::interior)
        throw InputError("finite differences need an interior node");
}

}  // namespace

ReducedJet fd_jet(const ScalarField& u, NodeId node) {
    require_interior(u, node);
    const LatticeDomain& dom = *u.domain;
    const int d = dom.dim();
    const double h = dom.h();
    const double u0 = value_at(u, node);
    ReducedJet jet{Vec(d), Mat(d, d)};
    for (int i = 0; i < d; ++i) {
        const NodeId si = dom.stride(i);
        const double up = value_at(u, node + si), um = value_at(u, node - si);
        jet.p(i) = (up - um) / (2.0 * h);
        jet.a(i, i) = (up - 2.0 * u0 + um) / (h * h);
        for (int j = 0; j < i; ++j) {
            const NodeId sj = dom.stride(j);
            const double v = (value_at(u, node + si + sj) - value_at(u, node + si - sj) -
                              value_at(u, node - si + sj) + value_at(u, node - si - sj)) /
                             (4.0 * h * h);
            jet.a(i, j) = v;
            jet.a(j, i) = v;
        }
    }
    return jet;
}

double directional_second(const ScalarField& u, NodeId node, const Offset& w) {
    const LatticeDomain& dom = *u.domain;
    if (node < 0 || node >= dom.size() || dom.node_class(node) == NodeClass::exterior)
        throw InputError("directional_second needs a node inside the domain");
    if (w.size() != dom.dim() || w.isZero()) throw InputError("direction must be a nonzero lattice vector");
    const double up = value_at(u, dom.neighbor(node, w));
    const double um = value_at(u, dom.neighbor(node, -w));
    const double h = dom.h();
    return (up - 2.0 * value_at(u, node) + um) / (h * h * w.squaredNorm());
}

double upwind_first(const ScalarField& u, NodeId node, const Vec& b) {
    require_interior(u, node);
    const LatticeDomain& dom = *u.domain;
    if (b.size() != dom.dim()) throw InputError("drift has wrong dimension");
    const double u0 = value_at(u, node);
    double s = 0.0;
    for (int i = 0; i < dom.dim(); ++i) {
        if (b(i) > 0.0)
            s += b(i) * (value_at(u, node + dom.stride(i)) - u0) / dom.h();
        else if (b(i) < 0.0)
            s += b(i) * (u0 - value_at(u, node - dom.stride(i))) / dom.h();
    }
    return s;
}

ScalarField restrict_to_slice(const ScalarField& u, int m) {
    const DomainPtr sd = u.domain->slice(m);
    ScalarField out{sd, std::vector<double>(sd->size(), std::numeric_limits<double>::quiet_NaN()), {}};
    if (u.has_mask()) out.mask.assign(sd->size(), 0);
    Vec full = Vec::Zero(u.domain->dim());
    for (NodeId id = 0; id < sd->size(); ++id) {
        if (sd->node_class(id) == NodeClass::exterior) continue;
        full.head(sd->dim()) = sd->position(id);
        const NodeId src = u.domain->locate(full);
        if (src < 0 || u.domain->node_class(src) == NodeClass::exterior)
            throw InputError("slice node missing from the ambient field");
        out.values[id] = u.values[src];
        if (u.has_mask()) out.mask[id] = u.mask[src];
    }
    return out;
}

namespace {

std::string coord_name(int k) { return (k % 2 == 0 ? "x" : "y") + std::to_string(k / 2 + 1); }

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

void write_csv(const ScalarField& u, std::ostream& out) {
    const LatticeDomain& dom = *u.domain;
    for (int k = 0; k < dom.dim(); ++k) out << coord_name(k) << ',';
    out << "value,class" << (u.has_mask() ? ",mask" : "") << '\n';
    for (NodeId id = 0; id < dom.size(); ++id) {
        if (dom.node_class(id) == NodeClass::exterior) continue;
        const Vec x = dom.position(id);
        for (int k = 0; k < dom.dim(); ++k) out << fmt(x(k)) << ',';
        out << fmt(u.values[id]) << ',' << to_string(dom.node_class(id));
        if (u.has_mask()) out << ',' << int(u.mask[id]);
        out << '\n';
    }
}

ScalarField read_csv(const DomainPtr& domain, std::istream& in) {
    const int d = domain->dim();
    std::string line;
    if (!std::getline(in, line)) throw InputError("empty CSV");
    std::vector<std::string> header;
    {
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) header.push_back(cell);
    }
    if (static_cast<int>(header.size()) < d + 1) throw InputError("CSV header has too few columns");
    for (int k = 0; k < d; ++k)
        if (header[k] != coord_name(k)) throw InputError("CSV coordinate columns do not match the domain");
    if (header[d] != "value") throw InputError("CSV is missing the value column");
    int mask_col = -1;
    for (size_t c = 0; c < header.size(); ++c)
        if (header[c] == "mask") mask_col = static_cast<int>(c);
    ScalarField u{domain, std::vector<double>(domain->size(), std::numeric_limits<double>::quiet_NaN()), {}};
    if (mask_col >= 0) u.mask.assign(domain->size(), 0);
    std::vector<char> seen(domain->size(), 0);
    long row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (static_cast<int>(cells.size()) < d + 1)
            throw InputError("CSV row " + std::to_string(row) + " is short");
        Vec x(d);
        try {
            for (int k = 0; k < d; ++k) x(k) = std::stod(cells[k]);
            const NodeId id = domain->locate(x);
            if (id < 0 || domain->node_class(id) == NodeClass::exterior)
                throw InputError("CSV row " + std::to_string(row) + " is not a domain node");
            u.values[id] = std::stod(cells[d]);
            if (mask_col >= 0 && mask_col < static_cast<int>(cells.size()))
                u.mask[id] = std::stoi(cells[mask_col]) != 0;
            seen[id] = 1;
        } catch (const std::logic_error& e) {
            if (dynamic_cast<const InputError*>(&e)) throw;
            throw InputError("CSV row " + std::to_string(row) + " is malformed");
        }
    }
    for (NodeId id = 0; id < domain->size(); ++id)
        if (domain->node_class(id) != NodeClass::exterior && !seen[id])
            throw InputError("CSV does not cover every domain node");
    return u;
}

}  // namespace acx
