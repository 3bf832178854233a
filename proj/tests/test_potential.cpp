#include <doctest.h>

#include "dtnlab/potential.hpp"

using namespace dtnlab;

namespace {

// Independent pointwise model of the sampled field: analytic bump times the
// boundary ramp, written out from scratch for oracle use.
double oracle_ramp(double s) {
  if (s <= 0.0) return 0.0;
  if (s >= 1.0) return 1.0;
  const double a = std::exp(-1.0 / s);
  const double b = std::exp(-1.0 / (1.0 - s));
  return a / (a + b);
}

double oracle_gaussian(double x, double y, double amp, double cx, double cy,
                       double sigma, double side, double w0_frac, double w1_frac) {
  const double r2 = (x - cx) * (x - cx) + (y - cy) * (y - cy);
  const double raw = amp * std::exp(-r2 / (2.0 * sigma * sigma));
  const double dist = std::min(0.5 * side - std::abs(x), 0.5 * side - std::abs(y));
  const double w0 = w0_frac * side, w1 = w1_frac * side;
  return raw * oracle_ramp((dist - w0) / (w1 - w0));
}

// Brute-force W^{2,1} norm of the clipped Gaussian on a fine grid: iterated
// central differences of the analytic samples, L1 quadrature.
double oracle_norm_w21(double amp, double sigma, int nfine) {
  const double side = 1.0;
  const double h = side / nfine;
  auto value = [&](int i, int j) {
    if (i < 0 || j < 0 || i >= nfine || j >= nfine) return 0.0;
    const double x = -0.5 * side + (i + 0.5) * h;
    const double y = -0.5 * side + (j + 0.5) * h;
    return oracle_gaussian(x, y, amp, 0.0, 0.0, sigma, side, 0.08, 0.20);
  };
  double best = 0.0;
  for (int jx = 0; jx <= 2; ++jx)
    for (int jy = 0; jy + jx <= 2; ++jy) {
      // apply D_x jx times and D_y jy times to the sampled sheet
      std::vector<double> sheet(static_cast<std::size_t>(nfine) * nfine);
      for (int i = 0; i < nfine; ++i)
        for (int j = 0; j < nfine; ++j)
          sheet[static_cast<std::size_t>(i) * nfine + j] = value(i, j);
      auto at = [&](const std::vector<double>& s, int i, int j) {
        if (i < 0 || j < 0 || i >= nfine || j >= nfine) return 0.0;
        return s[static_cast<std::size_t>(i) * nfine + j];
      };
      for (int rep = 0; rep < jx + jy; ++rep) {
        const bool along_x = rep < jx;
        std::vector<double> next(sheet.size());
        for (int i = 0; i < nfine; ++i)
          for (int j = 0; j < nfine; ++j) {
            const double hi = along_x ? at(sheet, i + 1, j) : at(sheet, i, j + 1);
            const double lo = along_x ? at(sheet, i - 1, j) : at(sheet, i, j - 1);
            next[static_cast<std::size_t>(i) * nfine + j] = (hi - lo) / (2.0 * h);
          }
        sheet.swap(next);
      }
      double l1 = 0.0;
      for (double v : sheet) l1 += std::abs(v);
      best = std::max(best, l1 * h * h);
    }
  return best;
}

}  // namespace

TEST_SUITE("potential") {
  TEST_CASE("zero amplitude samples to the zero field") {
    Domain dom = build_square_domain(2, 32, 1.0);
    Potential v = sample_potential(PotentialSpec::gaussian(0.0, {0, 0, 0}, 0.2), dom);
    CHECK(v.max_abs() == 0.0);
  }

  TEST_CASE("gaussian peaks at the node nearest the center") {
    Domain dom = build_square_domain(2, 64, 1.0);
    Potential v = sample_potential(PotentialSpec::gaussian(1.0, {0, 0, 0}, 0.15), dom);
    double best = 0.0;
    std::size_t arg = 0;
    for (std::size_t i = 0; i < dom.num_interior(); ++i)
      if (v.value(i) > best) {
        best = v.value(i);
        arg = i;
      }
    CHECK(best == doctest::Approx(1.0).epsilon(5e-3));
    CHECK(norm2(dom.interior_node(arg)) < dom.spacing());
  }

  TEST_CASE("sampling is additive over sum components") {
    Domain dom = build_square_domain(2, 32, 1.0);
    auto a = PotentialSpec::gaussian(0.7, {0.1, 0.0, 0}, 0.12);
    auto b = PotentialSpec::poly_bump(-0.4, {-0.1, 0.05, 0}, 0.2, 4);
    Potential va = sample_potential(a, dom);
    Potential vb = sample_potential(b, dom);
    Potential vs = sample_potential(PotentialSpec::sum({a, b}), dom);
    for (std::size_t i = 0; i < dom.num_interior(); ++i)
      CHECK(vs.value(i) == doctest::Approx(va.value(i) + vb.value(i)).epsilon(1e-14));
  }

  TEST_CASE("margin layers are exactly zero") {
    Domain dom = build_square_domain(2, 64, 1.0);
    Potential v = sample_potential(PotentialSpec::gaussian(1.0, {0, 0, 0}, 0.2), dom);
    for (std::size_t i = 0; i < dom.num_interior(); ++i)
      if (dom.layers_from_boundary(i) < 2) CHECK(v.value(i) == 0.0);
  }

  TEST_CASE("support violations are rejected with the offending node") {
    Domain dom = build_square_domain(2, 64, 1.0);
    CHECK_THROWS_WITH_AS(
        sample_potential(PotentialSpec::compact_bump(1.0, {0, 0, 0}, 0.49), dom),
        doctest::Contains("support crosses the boundary clip"), Error);
    // grid too coarse for the default clip window
    Domain coarse = build_square_domain(2, 16, 1.0);
    CHECK_THROWS_WITH_AS(
        sample_potential(PotentialSpec::gaussian(1.0, {0, 0, 0}, 0.2), coarse),
        doctest::Contains("too coarse"), Error);
  }

  TEST_CASE("w-norm of the zero potential vanishes") {
    Domain dom = build_square_domain(2, 32, 1.0);
    Potential v = sample_potential(PotentialSpec::gaussian(0.0, {0, 0, 0}, 0.2), dom);
    CHECK(norm_w_m1(v, 3) == 0.0);
  }

  TEST_CASE("order zero reduces to the discrete L1 norm") {
    Domain dom = build_square_domain(2, 32, 1.0);
    Potential v = sample_potential(PotentialSpec::gaussian(0.3, {0, 0, 0}, 0.12), dom);
    double l1 = 0.0;
    for (double x : v.values()) l1 += std::abs(x);
    l1 *= dom.cell_volume();
    CHECK(norm_w_m1(v, 0) == doctest::Approx(l1).epsilon(1e-14));
  }

  TEST_CASE("w21 norm of a gaussian matches the fine-grid oracle within 5%") {
    Domain dom = build_square_domain(2, 128, 1.0);
    Potential v = sample_potential(PotentialSpec::gaussian(1.0, {0, 0, 0}, 0.15), dom);
    const double ours = norm_w_m1(v, 2);
    const double ref = oracle_norm_w21(1.0, 0.15, 1024);
    CHECK(ours == doctest::Approx(ref).epsilon(0.05));
  }

  TEST_CASE("stencil wider than the grid is rejected") {
    Domain dom = build_square_domain(2, 8, 1.0);
    Potential v = sample_potential(
        PotentialSpec::gaussian(0.0, {0, 0, 0}, 0.1), dom);
    CHECK_THROWS_AS(norm_w_m1(v, 5), Error);
  }

  TEST_CASE("transform of the zero potential is zero") {
    Domain dom = build_square_domain(2, 32, 1.0);
    FourierGrid fg(2, 10.0, 21);
    Potential v = sample_potential(PotentialSpec::gaussian(0.0, {0, 0, 0}, 0.2), dom);
    Spectrum s = fourier_transform(v, fg);
    for (std::size_t i = 0; i < fg.size(); ++i) CHECK(std::abs(s.value(i)) == 0.0);
  }

  TEST_CASE("hermitian symmetry of the spectrum of a real field") {
    Domain dom = build_square_domain(2, 48, 1.0);
    FourierGrid fg(2, 12.0, 25);
    Potential v = sample_potential(PotentialSpec::gaussian(0.8, {0.07, -0.11, 0}, 0.13), dom);
    Spectrum s = fourier_transform(v, fg);
    double scale = 0.0;
    for (std::size_t i = 0; i < fg.size(); ++i) scale = std::max(scale, std::abs(s.value(i)));
    for (std::size_t i = 0; i < fg.size(); ++i) {
      const cplx gap = s.value(i) - std::conj(s.value(fg.negation_index(i)));
      CHECK(std::abs(gap) <= 1e-12 * scale);
    }
  }

  TEST_CASE("gaussian transform matches the closed form within 1% up to p_max/2") {
    Domain dom = build_square_domain(2, 64, 1.0);
    FourierGrid fg(2, 10.0, 21);
    const double A = 1.0, sig = 0.10, cx = 0.05, cy = -0.08;
    Potential v = sample_potential(PotentialSpec::gaussian(A, {cx, cy, 0}, sig), dom);
    Spectrum s = fourier_transform(v, fg);
    for (std::size_t i = 0; i < fg.size(); ++i) {
      const Vec p = fg.node(i);
      if (norm2(p) > 5.0) continue;
      const cplx phase(std::cos(p[0] * cx + p[1] * cy), std::sin(p[0] * cx + p[1] * cy));
      const cplx ref = A * sig * sig / (2.0 * kPi) * phase *
                       std::exp(-sig * sig * dot(p, p) / 2.0);
      CHECK(std::abs(s.value(i) - ref) <= 0.01 * std::abs(ref));
    }
  }

  TEST_CASE("round trip through the truncated inversion") {
    Domain dom = build_square_domain(2, 64, 1.0);
    FourierGrid fg(2, 40.0, 161);
    Potential v = sample_potential(PotentialSpec::gaussian(1.0, {0, 0, 0}, 0.15), dom);
    Spectrum s = fourier_transform(v, fg);
    InverseFourierResult w = inverse_fourier(s, dom.interior_nodes(), 40.0, 4);
    double sup_err = 0.0, sup = 0.0;
    for (std::size_t i = 0; i < dom.num_interior(); ++i) {
      sup_err = std::max(sup_err, std::abs(w.values[i] - v.value(i)));
      sup = std::max(sup, std::abs(v.value(i)));
    }
    CHECK(sup_err <= 0.02 * sup);
    CHECK(w.imag_residue <= 1e-10);
  }

  TEST_CASE("empty cutoff ball inverts to zero") {
    Domain dom = build_square_domain(2, 32, 1.0);
    FourierGrid fg(2, 10.0, 21);
    Potential v = sample_potential(PotentialSpec::gaussian(1.0, {0, 0, 0}, 0.15), dom);
    Spectrum s = fourier_transform(v, fg);
    InverseFourierResult w = inverse_fourier(s, dom.interior_nodes(), 0.0);
    for (double x : w.values) CHECK(x == 0.0);
  }

  TEST_CASE("cutoff beyond the lattice is rejected") {
    Domain dom = build_square_domain(2, 32, 1.0);
    FourierGrid fg(2, 10.0, 21);
    Potential v = sample_potential(PotentialSpec::gaussian(1.0, {0, 0, 0}, 0.15), dom);
    Spectrum s = fourier_transform(v, fg);
    CHECK_THROWS_AS(inverse_fourier(s, dom.interior_nodes(), 11.0), Error);
  }

  TEST_CASE("energy of the truncated inversion grows with the cutoff") {
    Domain dom = build_square_domain(2, 48, 1.0);
    FourierGrid fg(2, 20.0, 41);
    Potential v = sample_potential(PotentialSpec::gaussian(1.0, {0.1, 0, 0}, 0.15), dom);
    Spectrum s = fourier_transform(v, fg);
    double prev = -1.0;
    for (double rho : {2.0, 5.0, 10.0, 20.0}) {
      InverseFourierResult w = inverse_fourier(s, dom.interior_nodes(), rho);
      double energy = 0.0;
      for (double x : w.values) energy += x * x;
      energy *= dom.cell_volume();
      CHECK(energy >= prev - 1e-14);
      prev = energy;
    }
  }

  TEST_CASE("smoothness-weighted spectral decay is stable under lattice refinement") {
    Domain dom = build_square_domain(2, 64, 1.0);
    const int m = 4;
    auto p1 = PotentialSpec::poly_bump(0.5, {0.05, 0, 0}, 0.3, m);
    auto p2 = PotentialSpec::poly_bump(0.5, {-0.04, 0.03, 0}, 0.3, m);
    Potential v1 = sample_potential(p1, dom, m);
    Potential v2 = sample_potential(p2, dom, m);
    auto weighted_max = [&](double p_max, int n_p) {
      FourierGrid fg(2, p_max, n_p);
      Spectrum s1 = fourier_transform(v1, fg);
      Spectrum s2 = fourier_transform(v2, fg);
      double best = 0.0;
      for (std::size_t i = 0; i < fg.size(); ++i) {
        const double w = std::pow(1.0 + norm2(fg.node(i)), m);
        best = std::max(best, std::abs(s1.value(i) - s2.value(i)) * w);
      }
      return best;
    };
    const double coarse = weighted_max(20.0, 41);
    const double fine = weighted_max(40.0, 81);
    CHECK(fine <= 2.0 * coarse);
    CHECK(coarse <= 2.0 * fine);
  }

  TEST_CASE("gaussian tail integral decays superpolynomially") {
    Domain dom = build_square_domain(2, 64, 1.0);
    FourierGrid fg(2, 40.0, 81);
    Potential v = sample_potential(PotentialSpec::gaussian(1.0, {0, 0, 0}, 0.15), dom);
    Spectrum s = fourier_transform(v, fg);
    auto tail = [&](double rho) {
      double acc = 0.0;
      for (std::size_t i = 0; i < fg.size(); ++i)
        if (norm2(fg.node(i)) >= rho) acc += std::abs(s.value(i));
      return acc * fg.weight();
    };
    const double slope1 = std::log2(tail(8.0) / tail(4.0));
    const double slope2 = std::log2(tail(16.0) / tail(8.0));
    CHECK(slope2 <= slope1 - 1.0);  // steepening octave slopes
  }
}
