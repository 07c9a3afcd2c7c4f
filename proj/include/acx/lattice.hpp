#pragma once

// Uniform lattices in R^{2n}, sampled scalar fields and finite-difference jets.

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <vector>

#include "acx/jets.hpp"

namespace acx {

using NodeId = std::int64_t;
using Offset = Eigen::Matrix<int, Eigen::Dynamic, 1, 0, kMaxRealDim, 1>;

enum class NodeClass : std::uint8_t { exterior = 0, boundary = 1, interior = 2 };

const char* to_string(NodeClass c);

enum class Shape { box, ball };

class LatticeDomain {
public:
    /// Box [a, b]^{2n} with nodes a + i h.
    static std::shared_ptr<const LatticeDomain> box(int n, double a, double b, double h, int rho = 2);
    /// Closed ball |x - center| <= radius; nodes center + i h.
    static std::shared_ptr<const LatticeDomain> ball(int n, const Vec& center, double radius, double h,
                                                     int rho = 2);

    int n() const { return n_; }
    int dim() const { return 2 * n_; }
    double h() const { return h_; }
    int rho() const { return rho_; }
    Shape shape() const { return shape_; }
    double lo() const { return lo_; }
    double hi() const { return hi_; }
    const Vec& center() const { return center_; }
    double radius() const { return radius_; }
    const Vec& origin() const { return origin_; }
    int axis_count(int k) const { return counts_[k]; }
    NodeId size() const { return size_; }

    NodeClass node_class(NodeId id) const { return cls_[id]; }
    /// Largest stencil radius r <= rho whose full cube around the node stays in the closed region.
    int stencil_radius(NodeId id) const { return radius_of_[id]; }
    const std::vector<NodeId>& interior() const { return interior_; }
    const std::vector<NodeId>& boundary() const { return boundary_; }

    Vec position(NodeId id) const;
    Offset multi_index(NodeId id) const;
    /// Node at id + w, or -1 when outside the bounding grid or exterior.
    NodeId neighbor(NodeId id, const Offset& w) const;
    NodeId stride(int k) const { return strides_[k]; }
    /// Nearest node to x, or -1 when x is off-lattice by more than 1e-6 h or outside the grid.
    NodeId locate(const Vec& x) const;

    /// Slice C^m x {0}: same spacing and node positions, reclassified on the slice.
    std::shared_ptr<const LatticeDomain> slice(int m) const;

    bool in_region(const Vec& x) const;

private:
    LatticeDomain() = default;
    void classify();
    bool cube_inside(const Vec& x, double half) const;

    int n_ = 1;
    double h_ = 0.0;
    int rho_ = 1;
    Shape shape_ = Shape::box;
    double lo_ = 0.0, hi_ = 0.0;
    Vec center_;
    double radius_ = 0.0;
    Vec origin_;
    std::vector<int> counts_;
    std::vector<NodeId> strides_;
    NodeId size_ = 0;
    std::vector<NodeClass> cls_;
    std::vector<std::uint8_t> radius_of_;
    std::vector<NodeId> interior_;
    std::vector<NodeId> boundary_;
};

using DomainPtr = std::shared_ptr<const LatticeDomain>;

/// Reduced stencil directions: integer w with |w|_inf <= r, gcd 1, first nonzero entry positive.
const std::vector<Offset>& stencil_directions(int dim, int r);

struct ScalarField {
    DomainPtr domain;
    std::vector<double> values;       ///< NaN at exterior nodes
    std::vector<std::uint8_t> mask;   ///< empty or one flag per node; 1 = exceptional

    double operator[](NodeId id) const { return values[id]; }
    bool masked(NodeId id) const { return !mask.empty() && mask[id] != 0; }
    bool has_mask() const { return !mask.empty(); }
};

ScalarField sample(const DomainPtr& domain, const ScalarFn& fn);

ReducedJet fd_jet(const ScalarField& u, NodeId node);
double directional_second(const ScalarField& u, NodeId node, const Offset& w);
double upwind_first(const ScalarField& u, NodeId node, const Vec& b);
ScalarField restrict_to_slice(const ScalarField& u, int m);

/// One row per non-exterior node: coordinates, value, class[, mask]; 17 significant digits.
void write_csv(const ScalarField& u, std::ostream& out);
/// Reads rows written by write_csv onto `domain`; rows must cover every non-exterior node.
ScalarField read_csv(const DomainPtr& domain, std::istream& in);

}  // namespace acx
