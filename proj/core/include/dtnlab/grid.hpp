#pragma once

#include <cstdint>
#include <vector>

#include "dtnlab/common.hpp"

namespace dtnlab {

// One face of the discretized boundary. Boundary data lives at face
// midpoints; the face quadrature weight is the midpoint rule (length in 2-d,
// area in 3-d). interior1/interior2 are the flat indices of the first and
// second interior cells along the inward normal, used by the one-sided
// normal-derivative stencil.
struct BoundaryFace {
  Vec position{};
  Vec normal{};
  double weight = 0.0;
  int axis = 0;       // normal direction
  int orientation = 0;  // -1 low face, +1 high face
  std::size_t interior1 = 0;
  std::size_t interior2 = 0;
};

// Axis-aligned square (d=2) or cube (d=3) centered at the origin, cell-
// centered interior grid of n cells per axis with spacing h = side/n.
// Immutable after construction; safe to share across threads.
class Domain {
 public:
  Domain(int dimension, int resolution, double side_length);

  int dim() const { return d_; }
  int resolution() const { return n_; }
  double side() const { return side_; }
  double spacing() const { return h_; }
  double cell_volume() const { return cellvol_; }
  double radius_bound() const { return radius_bound_; }  // max |x| over nodes

  std::size_t num_interior() const { return interior_.size(); }
  const std::vector<Vec>& interior_nodes() const { return interior_; }
  const Vec& interior_node(std::size_t i) const { return interior_[i]; }

  std::size_t num_boundary() const { return boundary_.size(); }
  const std::vector<BoundaryFace>& boundary() const { return boundary_; }
  const BoundaryFace& face(std::size_t j) const { return boundary_[j]; }
  double boundary_measure() const { return boundary_measure_; }
  // Face adjacent to an interior cell that sits on the boundary layer of
  // `axis` with the given orientation.
  std::size_t face_index(int axis, int orientation,
                         const std::array<int, 3>& cell) const;

  // Flat index of the interior cell with per-axis indices idx (0..n-1).
  std::size_t flat_index(const std::array<int, 3>& idx) const;
  std::array<int, 3> cell_of(std::size_t flat) const;
  // Coordinate of cell center along one axis.
  double axis_coord(int i) const { return -0.5 * side_ + (i + 0.5) * h_; }
  // Number of grid cells between a node and the nearest boundary face.
  int layers_from_boundary(std::size_t flat) const;

  std::uint64_t hash() const;  // of (d, n, side)

 private:
  int d_, n_;
  double side_, h_, cellvol_;
  double radius_bound_ = 0.0;
  double boundary_measure_ = 0.0;
  std::vector<Vec> interior_;
  std::vector<BoundaryFace> boundary_;
};

Domain build_square_domain(int dimension, int resolution, double side_length);

// Symmetric tensor lattice of real frequencies: per-axis values k*dp for
// k in [-(n_p-1)/2, (n_p-1)/2], dp = 2*p_max/n_p, quadrature weight dp^d.
class FourierGrid {
 public:
  FourierGrid(int dimension, double p_max, int n_p);

  int dim() const { return d_; }
  double p_max() const { return p_max_; }
  int points_per_axis() const { return n_p_; }
  double spacing() const { return dp_; }
  double weight() const { return weight_; }

  std::size_t size() const { return nodes_.size(); }
  const Vec& node(std::size_t i) const { return nodes_[i]; }
  const std::vector<Vec>& nodes() const { return nodes_; }

  // Index of -p given the index of p (exact by lattice symmetry).
  std::size_t negation_index(std::size_t i) const;

 private:
  int d_, n_p_;
  double p_max_, dp_, weight_;
  std::vector<Vec> nodes_;
};

FourierGrid fourier_grid(const Domain& dom, double p_max, int n_p);

}  // namespace dtnlab
