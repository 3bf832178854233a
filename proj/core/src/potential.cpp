#include "dtnlab/potential.hpp"

#include <algorithm>
#include <sstream>

#include "dtnlab/parallel.hpp"

namespace dtnlab {

namespace {

// C-infinity ramp: 0 for s <= 0, 1 for s >= 1.
double smooth_ramp(double s) {
  if (s <= 0.0) return 0.0;
  if (s >= 1.0) return 1.0;
  const double a = std::exp(-1.0 / s);
  const double b = std::exp(-1.0 / (1.0 - s));
  return a / (a + b);
}

double sup_distance_to_boundary(const Vec& x, double side, int d) {
  double dist = side;  // sup-norm distance to the nearest face
  for (int ax = 0; ax < d; ++ax)
    dist = std::min(dist, 0.5 * side - std::abs(x[ax]));
  return dist;
}

}  // namespace

double PotentialSpec::evaluate_raw(const Vec& x) const {
  switch (kind) {
    case BumpKind::Gaussian: {
      const Vec r = x - center;
      return amplitude * std::exp(-dot(r, r) / (2.0 * width * width));
    }
    case BumpKind::CompactBump: {
      const Vec r = x - center;
      const double u2 = dot(r, r) / (width * width);
      if (u2 >= 1.0) return 0.0;
      return amplitude * std::exp(1.0 - 1.0 / (1.0 - u2));
    }
    case BumpKind::PolyBump: {
      const Vec r = x - center;
      const double u2 = dot(r, r) / (width * width);
      if (u2 >= 1.0) return 0.0;
      return amplitude * std::pow(1.0 - u2, poly_order);
    }
    case BumpKind::Sum: {
      double s = 0.0;
      for (const auto& c : components) s += c.evaluate_raw(x);
      return s;
    }
  }
  return 0.0;
}

double PotentialSpec::evaluate(const Vec& x, double side, int dim) const {
  if (kind == BumpKind::Sum) {
    // clip applies per component so that sampling stays linear in the parts
    double s = 0.0;
    for (const auto& c : components) s += c.evaluate(x, side, dim);
    return s;
  }
  const double raw = evaluate_raw(x);
  if (raw == 0.0) return 0.0;
  const double dist = sup_distance_to_boundary(x, side, dim);
  const double w0 = clip_inner * side, w1 = clip_outer * side;
  return raw * smooth_ramp((dist - w0) / (w1 - w0));
}

PotentialSpec PotentialSpec::gaussian(double a, const Vec& c, double s) {
  PotentialSpec sp;
  sp.kind = BumpKind::Gaussian;
  sp.amplitude = a;
  sp.center = c;
  sp.width = s;
  return sp;
}

PotentialSpec PotentialSpec::compact_bump(double a, const Vec& c, double r) {
  PotentialSpec sp;
  sp.kind = BumpKind::CompactBump;
  sp.amplitude = a;
  sp.center = c;
  sp.width = r;
  return sp;
}

PotentialSpec PotentialSpec::poly_bump(double a, const Vec& c, double r, int q) {
  PotentialSpec sp;
  sp.kind = BumpKind::PolyBump;
  sp.amplitude = a;
  sp.center = c;
  sp.width = r;
  sp.poly_order = q;
  return sp;
}

PotentialSpec PotentialSpec::sum(std::vector<PotentialSpec> parts) {
  PotentialSpec sp;
  sp.kind = BumpKind::Sum;
  sp.amplitude = 0.0;
  sp.components = std::move(parts);
  return sp;
}

double PotentialSpec::support_threshold() const {
  if (kind == BumpKind::Gaussian) return 1e-12 * std::abs(amplitude);
  if (kind == BumpKind::Sum) {
    double t = 0.0;
    for (const auto& c : components) t = std::max(t, c.support_threshold());
    return t;
  }
  return 0.0;  // compactly supported kinds must vanish exactly
}

Potential::Potential(const Domain& dom, std::vector<double> values, int smoothness)
    : dom_(&dom), vals_(std::move(values)), m_(smoothness) {
  if (vals_.size() != dom.num_interior())
    throw Error("Potential: value count does not match the grid");
  if (m_ <= dom.dim())
    throw Error("Potential: smoothness order must exceed the dimension");
}

double Potential::max_abs() const {
  double m = 0.0;
  for (double v : vals_) m = std::max(m, std::abs(v));
  return m;
}

namespace {

std::string node_string(const Vec& x, int d) {
  std::ostringstream os;
  os << '(' << x[0] << ", " << x[1];
  if (d == 3) os << ", " << x[2];
  os << ')';
  return os.str();
}

// Exact-support kinds must never be truncated by the clip window: the raw
// bump has to vanish wherever the ramp is zero.
void check_support_fit(const PotentialSpec& spec, const Domain& dom) {
  if (spec.kind == BumpKind::Sum) {
    for (const auto& c : spec.components) check_support_fit(c, dom);
    return;
  }
  if (spec.kind == BumpKind::Gaussian) return;  // threshold rule at the margin
  const double w0 = spec.clip_inner * dom.side();
  for (std::size_t i = 0; i < dom.num_interior(); ++i) {
    const Vec& x = dom.interior_node(i);
    double dist = dom.side();
    for (int ax = 0; ax < dom.dim(); ++ax)
      dist = std::min(dist, 0.5 * dom.side() - std::abs(x[ax]));
    if (dist > w0) continue;
    const double raw = spec.evaluate_raw(x);
    if (raw != 0.0) {
      char val[32];
      std::snprintf(val, sizeof(val), "%.3g", raw);
      throw Error("sample_potential: bump support crosses the boundary clip at node " +
                  node_string(x, dom.dim()) + " (value " + val +
                  "); shrink the bump or widen the clip window");
    }
  }
}

}  // namespace

Potential sample_potential(const PotentialSpec& spec, const Domain& dom,
                           int smoothness) {
  const double side = dom.side();
  const std::size_t n = dom.num_interior();
  check_support_fit(spec, dom);

  std::vector<double> vals(n);
  const double eps_supp = spec.support_threshold();
  for (std::size_t i = 0; i < n; ++i)
    vals[i] = spec.evaluate(dom.interior_node(i), side, dom.dim());

  // Support must clear the two cell layers next to the boundary.
  for (std::size_t i = 0; i < n; ++i) {
    if (dom.layers_from_boundary(i) >= 2) continue;
    if (std::abs(vals[i]) > eps_supp) {
      char val[32];
      std::snprintf(val, sizeof(val), "%.3g", vals[i]);
      throw Error("sample_potential: support reaches the boundary margin at node " +
                  node_string(dom.interior_node(i), dom.dim()) + " (value " + val +
                  "); the grid is too coarse for the clip window");
    }
    vals[i] = 0.0;
  }
  return Potential(dom, std::move(vals), smoothness);
}

namespace {

// Iterated second-order central difference along one axis, zero extension.
void central_difference_axis(const Domain& dom, std::vector<double>& f, int axis) {
  const int n = dom.resolution();
  const double inv2h = 1.0 / (2.0 * dom.spacing());
  std::vector<double> out(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) {
    auto idx = dom.cell_of(i);
    auto up = idx, dn = idx;
    up[axis] += 1;
    dn[axis] -= 1;
    const double fu = (up[axis] < n) ? f[dom.flat_index(up)] : 0.0;
    const double fd = (dn[axis] >= 0) ? f[dom.flat_index(dn)] : 0.0;
    out[i] = (fu - fd) * inv2h;
  }
  f.swap(out);
}

void enumerate_multi_indices(int d, int m, std::array<int, 3>& j, int axis,
                             int used, std::vector<std::array<int, 3>>& out) {
  if (axis == d) {
    out.push_back(j);
    return;
  }
  for (int t = 0; t + used <= m; ++t) {
    j[axis] = t;
    enumerate_multi_indices(d, m, j, axis + 1, used + t, out);
  }
}

}  // namespace

double norm_w_m1(const Potential& v, int m) {
  const Domain& dom = v.domain();
  if (m < 0) throw Error("norm_w_m1: negative order");
  if (2 * m + 1 > dom.resolution())
    throw Error("norm_w_m1: derivative stencil exceeds the grid resolution");

  std::vector<std::array<int, 3>> indices;
  std::array<int, 3> j{0, 0, 0};
  enumerate_multi_indices(dom.dim(), m, j, 0, 0, indices);

  const double cellvol = dom.cell_volume();
  double best = 0.0;
  for (const auto& J : indices) {
    std::vector<double> f = v.values();
    for (int ax = 0; ax < dom.dim(); ++ax)
      for (int t = 0; t < J[ax]; ++t) central_difference_axis(dom, f, ax);
    double l1 = 0.0;
    for (double x : f) l1 += std::abs(x);
    best = std::max(best, l1 * cellvol);
  }
  return best;
}

Spectrum::Spectrum(const FourierGrid& fg, std::vector<cplx> values)
    : fg_(&fg), vals_(std::move(values)) {
  if (vals_.size() != fg.size()) throw Error("Spectrum: value count mismatch");
}

Spectrum fourier_transform(const Potential& v, const FourierGrid& fg) {
  const Domain& dom = v.domain();
  if (dom.dim() != fg.dim()) throw Error("fourier_transform: dimension mismatch");
  const int d = dom.dim();
  const int n = dom.resolution();
  const int np = fg.points_per_axis();
  const int half = (np - 1) / 2;
  const double dp = fg.spacing();

  // Per-axis phase table E[a][i] = exp(i p_a x_i); the lattice sum factors
  // through the tensor structure, one axis at a time.
  std::vector<cplx> E(static_cast<std::size_t>(np) * n);
  for (int a = 0; a < np; ++a) {
    const double p = (a - half) * dp;
    for (int i = 0; i < n; ++i) {
      const double ph = p * dom.axis_coord(i);
      E[static_cast<std::size_t>(a) * n + i] = cplx(std::cos(ph), std::sin(ph));
    }
  }
  auto phase = [&](int a, int i) { return E[static_cast<std::size_t>(a) * n + i]; };

  const double scale = dom.cell_volume() / std::pow(2.0 * kPi, d);
  std::vector<cplx> out;

  if (d == 2) {
    // stage 1: contract x0 -> T[a0][x1]
    std::vector<cplx> T(static_cast<std::size_t>(np) * n, cplx(0, 0));
    for (int a0 = 0; a0 < np; ++a0)
      for (int i0 = 0; i0 < n; ++i0) {
        const cplx e0 = phase(a0, i0);
        const double* row = v.values().data() + static_cast<std::size_t>(i0) * n;
        cplx* trow = T.data() + static_cast<std::size_t>(a0) * n;
        for (int i1 = 0; i1 < n; ++i1) trow[i1] += e0 * row[i1];
      }
    out.assign(static_cast<std::size_t>(np) * np, cplx(0, 0));
    for (int a0 = 0; a0 < np; ++a0)
      for (int a1 = 0; a1 < np; ++a1) {
        cplx s(0, 0);
        const cplx* trow = T.data() + static_cast<std::size_t>(a0) * n;
        for (int i1 = 0; i1 < n; ++i1) s += trow[i1] * phase(a1, i1);
        out[static_cast<std::size_t>(a0) * np + a1] = s * scale;
      }
  } else {
    std::vector<cplx> T1(static_cast<std::size_t>(np) * n * n, cplx(0, 0));
    for (int a0 = 0; a0 < np; ++a0)
      for (int i0 = 0; i0 < n; ++i0) {
        const cplx e0 = phase(a0, i0);
        const double* slab = v.values().data() + static_cast<std::size_t>(i0) * n * n;
        cplx* tsl = T1.data() + static_cast<std::size_t>(a0) * n * n;
        for (int r = 0; r < n * n; ++r) tsl[r] += e0 * slab[r];
      }
    std::vector<cplx> T2(static_cast<std::size_t>(np) * np * n, cplx(0, 0));
    for (int a0 = 0; a0 < np; ++a0)
      for (int a1 = 0; a1 < np; ++a1)
        for (int i1 = 0; i1 < n; ++i1) {
          const cplx e1 = phase(a1, i1);
          const cplx* trow = T1.data() + (static_cast<std::size_t>(a0) * n + i1) * n;
          cplx* orow = T2.data() + (static_cast<std::size_t>(a0) * np + a1) * n;
          for (int i2 = 0; i2 < n; ++i2) orow[i2] += e1 * trow[i2];
        }
    out.assign(static_cast<std::size_t>(np) * np * np, cplx(0, 0));
    for (std::size_t r = 0; r < static_cast<std::size_t>(np) * np; ++r)
      for (int a2 = 0; a2 < np; ++a2) {
        cplx s(0, 0);
        const cplx* trow = T2.data() + r * n;
        for (int i2 = 0; i2 < n; ++i2) s += trow[i2] * phase(a2, i2);
        out[r * np + a2] = s * scale;
      }
  }
  return Spectrum(fg, std::move(out));
}

cplx fourier_at(const Potential& v, const Vec& p) {
  const Domain& dom = v.domain();
  cplx s(0, 0);
  for (std::size_t i = 0; i < dom.num_interior(); ++i) {
    const double val = v.value(i);
    if (val == 0.0) continue;
    const double ph = dot(p, dom.interior_node(i));
    s += val * cplx(std::cos(ph), std::sin(ph));
  }
  return s * (dom.cell_volume() / std::pow(2.0 * kPi, dom.dim()));
}

InverseFourierResult inverse_fourier(const Spectrum& s,
                                     const std::vector<Vec>& points,
                                     double rho, int threads) {
  const FourierGrid& fg = s.grid();
  if (rho > fg.p_max() + 1e-12)
    throw Error("inverse_fourier: cutoff exceeds the frequency lattice radius");

  // Select modes in the strict open ball once.
  std::vector<std::size_t> sel;
  for (std::size_t i = 0; i < fg.size(); ++i)
    if (norm2(fg.node(i)) < rho) sel.push_back(i);

  std::vector<cplx> acc(points.size(), cplx(0, 0));
  const double w = fg.weight();
  parallel_for(points.size(), threads, [&](std::size_t pi) {
    const Vec& x = points[pi];
    cplx sum(0, 0);
    for (std::size_t idx : sel) {
      const double ph = -dot(fg.node(idx), x);
      sum += s.value(idx) * cplx(std::cos(ph), std::sin(ph));
    }
    acc[pi] = sum * w;
  });

  InverseFourierResult out;
  out.values.resize(points.size());
  double max_re = 0.0, max_im = 0.0;
  for (std::size_t i = 0; i < acc.size(); ++i) {
    out.values[i] = acc[i].real();
    max_re = std::max(max_re, std::abs(acc[i].real()));
    max_im = std::max(max_im, std::abs(acc[i].imag()));
  }
  out.imag_residue = (max_re > 0.0) ? max_im / max_re : max_im;
  return out;
}

}  // namespace dtnlab
