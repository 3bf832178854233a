#pragma once

#include <string>
#include <vector>

#include "dtnlab/grid.hpp"

namespace dtnlab {

enum class BumpKind { Gaussian, CompactBump, PolyBump, Sum };

// Analytic description of a synthetic potential. All bumps are multiplied by
// a C-infinity cutoff ramp in the sup-distance to the boundary (identity for
// dist >= clip_outer*side, zero for dist <= clip_inner*side) so that sampled
// fields are compactly supported strictly inside the domain.
struct PotentialSpec {
  BumpKind kind = BumpKind::Gaussian;
  double amplitude = 1.0;
  Vec center{0, 0, 0};
  double width = 0.15;     // Gaussian sigma, or support radius for bumps
  int poly_order = 4;      // PolyBump: (1 - r^2/w^2)_+^q has q weak derivatives in L1
  std::vector<PotentialSpec> components;  // Sum
  double clip_inner = 0.08;
  double clip_outer = 0.20;

  double evaluate(const Vec& x, double side, int dim) const;  // clip included
  double evaluate_raw(const Vec& x) const;                    // bump only

  static PotentialSpec gaussian(double amplitude, const Vec& center, double sigma);
  static PotentialSpec compact_bump(double amplitude, const Vec& center, double radius);
  static PotentialSpec poly_bump(double amplitude, const Vec& center, double radius, int q);
  static PotentialSpec sum(std::vector<PotentialSpec> parts);
  // Threshold below which a sampled value counts as numerically zero for the
  // support check.
  double support_threshold() const;
};

// Grid samples of a potential. Values vanish on the two cell layers next to
// the boundary and extend by zero outside the domain. The domain object must
// outlive the potential.
class Potential {
 public:
  Potential(const Domain& dom, std::vector<double> values, int smoothness);

  const Domain& domain() const { return *dom_; }
  const std::vector<double>& values() const { return vals_; }
  double value(std::size_t i) const { return vals_[i]; }
  int smoothness() const { return m_; }
  double max_abs() const;

 private:
  const Domain* dom_;
  std::vector<double> vals_;
  int m_;
};

Potential sample_potential(const PotentialSpec& spec, const Domain& dom,
                           int smoothness = 4);

// max over multi-indices |J| <= m of the L1 norm of the iterated
// second-order central difference d^J v, cell-volume quadrature.
double norm_w_m1(const Potential& v, int m);

// Complex spectrum samples on a frequency lattice. The grid must outlive the
// spectrum.
class Spectrum {
 public:
  Spectrum(const FourierGrid& fg, std::vector<cplx> values);
  const FourierGrid& grid() const { return *fg_; }
  const std::vector<cplx>& values() const { return vals_; }
  cplx value(std::size_t i) const { return vals_[i]; }

 private:
  const FourierGrid* fg_;
  std::vector<cplx> vals_;
};

// vhat(p) = (2 pi)^-d sum_x exp(i p.x) v(x) h^d over the lattice.
Spectrum fourier_transform(const Potential& v, const FourierGrid& fg);

// Same quadrature at a single off-lattice frequency.
cplx fourier_at(const Potential& v, const Vec& p);

struct InverseFourierResult {
  std::vector<double> values;   // real parts
  double imag_residue = 0.0;    // max |Im| / max |Re| over the point set
};

// w(x) = sum_{|p| < rho} exp(-i p.x) vhat(p) dp^d (strict open ball).
InverseFourierResult inverse_fourier(const Spectrum& s,
                                     const std::vector<Vec>& points,
                                     double rho, int threads = 1);

}  // namespace dtnlab
