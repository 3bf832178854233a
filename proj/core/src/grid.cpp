#include "dtnlab/grid.hpp"

#include <algorithm>
#include <cstring>

namespace dtnlab {

Domain::Domain(int dimension, int resolution, double side_length)
    : d_(dimension), n_(resolution), side_(side_length) {
  if (d_ != 2 && d_ != 3) throw Error("Domain: dimension must be 2 or 3");
  if (n_ < 8) throw Error("Domain: resolution must be at least 8");
  if (side_ <= 0.0) throw Error("Domain: side length must be positive");
  h_ = side_ / n_;
  cellvol_ = std::pow(h_, d_);

  const int nz = (d_ == 3) ? n_ : 1;
  interior_.reserve(static_cast<std::size_t>(n_) * n_ * nz);
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j)
      for (int k = 0; k < nz; ++k) {
        Vec x{axis_coord(i), axis_coord(j), d_ == 3 ? axis_coord(k) : 0.0};
        interior_.push_back(x);
        radius_bound_ = std::max(radius_bound_, norm2(x));
      }

  // Faces: for every axis, the low and high side, one face per transverse
  // cell. Face weight is h^(d-1).
  const double face_w = std::pow(h_, d_ - 1);
  for (int axis = 0; axis < d_; ++axis) {
    for (int orient = -1; orient <= 1; orient += 2) {
      for (int a = 0; a < n_; ++a)
        for (int b = 0; b < (d_ == 3 ? n_ : 1); ++b) {
          BoundaryFace f;
          f.axis = axis;
          f.orientation = orient;
          f.weight = face_w;
          f.normal = Vec{0, 0, 0};
          f.normal[axis] = orient;
          std::array<int, 3> cell{0, 0, 0};
          int t = 0;
          for (int ax = 0; ax < d_; ++ax) {
            if (ax == axis) continue;
            cell[ax] = (t++ == 0) ? a : b;
          }
          cell[axis] = (orient < 0) ? 0 : n_ - 1;
          f.position = interior_[flat_index(cell)];
          f.position[axis] = orient * 0.5 * side_;
          f.interior1 = flat_index(cell);
          std::array<int, 3> cell2 = cell;
          cell2[axis] -= orient;
          f.interior2 = flat_index(cell2);
          boundary_.push_back(f);
          boundary_measure_ += f.weight;
        }
    }
  }
}

std::size_t Domain::flat_index(const std::array<int, 3>& idx) const {
  std::size_t flat = static_cast<std::size_t>(idx[0]) * n_ + idx[1];
  if (d_ == 3) flat = flat * n_ + idx[2];
  return flat;
}

std::array<int, 3> Domain::cell_of(std::size_t flat) const {
  std::array<int, 3> idx{0, 0, 0};
  if (d_ == 3) {
    idx[2] = static_cast<int>(flat % n_);
    flat /= n_;
  }
  idx[1] = static_cast<int>(flat % n_);
  idx[0] = static_cast<int>(flat / n_);
  return idx;
}

int Domain::layers_from_boundary(std::size_t flat) const {
  auto idx = cell_of(flat);
  int m = n_;
  for (int ax = 0; ax < d_; ++ax)
    m = std::min({m, idx[ax], n_ - 1 - idx[ax]});
  return m;
}

std::size_t Domain::face_index(int axis, int orientation,
                               const std::array<int, 3>& cell) const {
  const std::size_t nt = (d_ == 3) ? static_cast<std::size_t>(n_) * n_
                                   : static_cast<std::size_t>(n_);
  std::size_t base = static_cast<std::size_t>(axis) * 2 * nt +
                     (orientation > 0 ? nt : 0);
  int a = -1, b = 0;
  for (int ax = 0; ax < d_; ++ax) {
    if (ax == axis) continue;
    if (a < 0)
      a = cell[ax];
    else
      b = cell[ax];
  }
  return base + static_cast<std::size_t>(a) * (d_ == 3 ? n_ : 1) + b;
}

std::uint64_t Domain::hash() const {
  std::uint64_t h = 14695981039346656037ull;
  auto mix = [&h](std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
      h ^= (v >> (8 * i)) & 0xff;
      h *= 1099511628211ull;
    }
  };
  mix(static_cast<std::uint64_t>(d_));
  mix(static_cast<std::uint64_t>(n_));
  std::uint64_t bits;
  static_assert(sizeof(double) == sizeof(std::uint64_t));
  std::memcpy(&bits, &side_, sizeof(bits));
  mix(bits);
  return h;
}

Domain build_square_domain(int dimension, int resolution, double side_length) {
  return Domain(dimension, resolution, side_length);
}

FourierGrid::FourierGrid(int dimension, double p_max, int n_p)
    : d_(dimension), n_p_(n_p), p_max_(p_max) {
  if (d_ != 2 && d_ != 3) throw Error("FourierGrid: dimension must be 2 or 3");
  if (n_p_ < 1 || n_p_ % 2 == 0)
    throw Error("FourierGrid: points per axis must be odd so that p=0 is a node");
  if (p_max_ <= 0.0) throw Error("FourierGrid: p_max must be positive");
  dp_ = 2.0 * p_max_ / n_p_;
  weight_ = std::pow(dp_, d_);

  const int half = (n_p_ - 1) / 2;
  const int nz = (d_ == 3) ? n_p_ : 1;
  nodes_.reserve(static_cast<std::size_t>(n_p_) * n_p_ * nz);
  for (int i = -half; i <= half; ++i)
    for (int j = -half; j <= half; ++j)
      for (int k = (d_ == 3 ? -half : 0); k <= (d_ == 3 ? half : 0); ++k)
        nodes_.push_back(Vec{i * dp_, j * dp_, d_ == 3 ? k * dp_ : 0.0});
}

std::size_t FourierGrid::negation_index(std::size_t i) const {
  return nodes_.size() - 1 - i;  // lattice enumeration is centrally symmetric
}

FourierGrid fourier_grid(const Domain& dom, double p_max, int n_p) {
  return FourierGrid(dom.dim(), p_max, n_p);
}

}  // namespace dtnlab
