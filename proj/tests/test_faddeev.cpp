#include <doctest.h>

#include "dtnlab/faddeev.hpp"

using namespace dtnlab;

namespace {

Potential zero_potential(const Domain& dom) {
  return Potential(dom, std::vector<double>(dom.num_interior(), 0.0), dom.dim() + 1);
}

PotentialSpec widened(PotentialSpec spec, double w0, double w1) {
  spec.clip_inner = w0;
  spec.clip_outer = w1;
  for (auto& c : spec.components) c = widened(c, w0, w1);
  return spec;
}

}  // namespace

TEST_SUITE("faddeev") {
  TEST_CASE("born pair in the plane matches the forced algebra") {
    ThetaPair pair = born_pair({1, 0, 0}, 2);
    CHECK(pair.k_re[0] == doctest::Approx(0.5));
    CHECK(pair.k_re[1] == 0.0);
    CHECK(pair.im[0] == doctest::Approx(0.0));
    CHECK(pair.im[1] == doctest::Approx(0.5));
    CHECK(pair.l_re[0] == doctest::Approx(-0.5));
    const CVec kc = pair.k().components();
    CHECK(std::abs(cdot(kc, kc)) < 1e-14);
    const Vec p = pair.p();
    CHECK(p[0] == doctest::Approx(1.0));
  }

  TEST_CASE("zero frequency degenerates to the zero pair") {
    ThetaPair pair = born_pair({0, 0, 0}, 2);
    CHECK(norm2(pair.k_re) == 0.0);
    CHECK(norm2(pair.im) == 0.0);
  }

  TEST_CASE("gamma is unit, orthogonal and even over random frequencies") {
    std::uint64_t state = 42;
    auto next = [&]() {
      state = state * 6364136223846793005ull + 1442695040888963407ull;
      return static_cast<double>((state >> 11) % 2000003) / 1000001.5 - 1.0;
    };
    for (int dim : {2, 3}) {
      for (int trial = 0; trial < 200; ++trial) {
        Vec p{next(), next(), dim == 3 ? next() : 0.0};
        if (norm2(p) < 1e-3) continue;
        const Vec g = gamma_direction(p, dim);
        CHECK(std::abs(norm2(g) - 1.0) < 1e-12);
        CHECK(std::abs(dot(g, p)) <= 1e-14 * std::max(1.0, norm2(p)));
        const Vec gm = gamma_direction(Vec{-p[0], -p[1], -p[2]}, dim);
        CHECK(norm2(g - gm) == 0.0);
        ThetaPair pair = born_pair(p, dim);
        const CVec kc = pair.k().components();
        CHECK(std::abs(cdot(kc, kc)) <= 1e-12 * dot(p, p));
      }
    }
  }

  TEST_CASE("three-dimensional pairs stay on the variety") {
    ThetaPair pair = theta_pair_3d({1, 0, 0}, 1.0, {0, 1, 0}, {0, 0, 1});
    CHECK(pair.k_re[0] == doctest::Approx(0.5));
    CHECK(pair.k_re[2] == doctest::Approx(std::sqrt(0.75)));
    CHECK(pair.im[1] == doctest::Approx(1.0));
    const CVec kc = pair.k().components();
    CHECK(std::abs(cdot(kc, kc)) < 1e-12);
    const Vec p = pair.p();
    CHECK(p[0] == doctest::Approx(1.0));
    CHECK(std::abs(p[1]) + std::abs(p[2]) < 1e-15);
  }

  TEST_CASE("the minimal imaginary size reproduces the born pair") {
    const Vec p{1.2, -0.7, 0.4};
    ThetaPair born = born_pair(p, 3);
    ThetaPair limit = theta_pair_3d(p, 0.5 * norm2(p));
    CHECK(norm2(born.k_re - limit.k_re) < 1e-14);
    CHECK(norm2(born.im - limit.im) < 1e-14);
  }

  TEST_CASE("imaginary sizes below the variety floor are rejected") {
    CHECK_THROWS_AS(theta_pair_3d({2, 0, 0}, 0.7), Error);
  }

  TEST_CASE("variety constraint is enforced on raw construction") {
    CHECK_THROWS_AS(ComplexFrequency::on_variety({1, 0, 0}, {0, 0.5, 0}), Error);
    CHECK_NOTHROW(ComplexFrequency::on_variety({1, 0, 0}, {0, 1, 0}));
  }

  TEST_CASE("green table satisfies the lattice delta identity") {
    Domain dom = build_square_domain(2, 64, 1.0);
    ThetaPair pair = born_pair({4, 0, 0}, 2);  // |Im k| = 2
    GreenTable g = faddeev_green(pair.k(), dom);
    CHECK(green_delta_residual(g) <= 1e-3);
    CHECK(green_delta_residual(g) <= 1e-9);  // construction is exact to rounding
  }

  TEST_CASE("green synthesis is deterministic") {
    Domain dom = build_square_domain(2, 32, 1.0);
    ThetaPair pair = born_pair({3, 1, 0}, 2);
    GreenTable a = faddeev_green(pair.k(), dom);
    GreenTable b = faddeev_green(pair.k(), dom);
    cplx sa(0, 0), sb(0, 0);
    for (std::size_t i = 0; i < a.table.size(); ++i) {
      sa += a.table[i] * cplx(std::cos(0.01 * i), std::sin(0.02 * i));
      sb += b.table[i] * cplx(std::cos(0.01 * i), std::sin(0.02 * i));
    }
    CHECK(std::abs(sa - sb) <= 1e-12 * std::abs(sa));
  }

  TEST_CASE("far field shrinks as the imaginary size grows") {
    Domain dom = build_square_domain(2, 64, 1.0);
    auto far_max = [&](double rho) {
      ThetaPair pair = born_pair({2 * rho, 0, 0}, 2);
      GreenTable g = faddeev_green(pair.k(), dom);
      double m = 0.0;
      for (int j0 = -g.ext; j0 <= g.ext; ++j0)
        for (int j1 = -g.ext; j1 <= g.ext; ++j1) {
          if (std::abs(j0) < 16 && std::abs(j1) < 16) continue;
          m = std::max(m, std::abs(g.at(j0, j1, 0)));
        }
      return m;
    };
    CHECK(far_max(4.0) < far_max(2.0));
  }

  TEST_CASE("oscillation beyond the resolvable bound is rejected") {
    Domain dom = build_square_domain(2, 32, 1.0);
    ThetaPair pair = born_pair({40, 0, 0}, 2);  // |Im k| = 20 > pi n / 6
    CHECK_THROWS_AS(faddeev_green(pair.k(), dom), Error);
  }

  TEST_CASE("zero potential gives the plane wave exactly") {
    Domain dom = build_square_domain(2, 32, 1.0);
    ThetaPair pair = born_pair({2, 1, 0}, 2);
    GreenTable g = faddeev_green(pair.k(), dom);
    FaddeevField f = lippmann_schwinger(zero_potential(dom), pair.k(), g);
    CHECK(f.sup_mu_minus_one() == 0.0);
    CHECK(f.residual == 0.0);
  }

  TEST_CASE("field correction halves when the imaginary size doubles") {
    Domain dom = build_square_domain(2, 64, 1.0);
    Potential v = sample_potential(PotentialSpec::gaussian(0.1, {0, 0, 0}, 0.2), dom);
    auto sup_at = [&](double rho) {
      ThetaPair pair = born_pair({2 * rho, 0, 0}, 2);
      GreenTable g = faddeev_green(pair.k(), dom);
      return lippmann_schwinger(v, pair.k(), g).sup_mu_minus_one();
    };
    const double ratio = sup_at(3.0) / sup_at(6.0);
    CHECK(ratio > 1.4);
    CHECK(ratio < 2.9);
  }

  TEST_CASE("field correction is linear in the potential to second order") {
    Domain dom = build_square_domain(2, 64, 1.0);
    ThetaPair pair = born_pair({4, 0, 0}, 2);
    GreenTable g = faddeev_green(pair.k(), dom);
    Potential unit = sample_potential(PotentialSpec::gaussian(1.0, {0, 0, 0}, 0.2), dom);
    // first-order response: g * (v * 1)
    LippmannOperator op(unit, g);
    std::vector<cplx> first(unit.values().begin(), unit.values().end());
    first = op.convolve(first);
    auto deviation = [&](double eps) {
      FaddeevField f = lippmann_schwinger(
          sample_potential(PotentialSpec::gaussian(eps, {0, 0, 0}, 0.2), dom), pair.k(), g);
      double worst = 0.0;
      for (std::size_t i = 0; i < f.mu.size(); ++i)
        worst = std::max(worst, std::abs((f.mu[i] - 1.0) - eps * first[i]));
      return worst;
    };
    const double r = deviation(2e-3) / deviation(1e-3);
    CHECK(r > 3.0);
    CHECK(r < 5.5);
  }

  TEST_CASE("discrete equation residual stays at solver level") {
    Domain dom = build_square_domain(2, 64, 1.0);
    Potential v = sample_potential(PotentialSpec::gaussian(0.3, {0.05, 0, 0}, 0.15), dom);
    ThetaPair pair = born_pair({4, 2, 0}, 2);
    GreenTable g = faddeev_green(pair.k(), dom);
    FaddeevField f = lippmann_schwinger(v, pair.k(), g);
    CHECK(f.residual <= 1e-8);
    CHECK(f.pde_residual <= 1e-8);
  }

  TEST_CASE("amplitude of the zero potential vanishes") {
    Domain dom = build_square_domain(2, 32, 1.0);
    ThetaPair pair = born_pair({2, 0, 0}, 2);
    GreenTable g = faddeev_green(pair.k(), dom);
    FaddeevField f = lippmann_schwinger(zero_potential(dom), pair.k(), g);
    CHECK(std::abs(amplitude_h(zero_potential(dom), f, pair).h) == 0.0);
  }

  TEST_CASE("amplitude converges to the spectrum quadratically in the size") {
    Domain dom = build_square_domain(2, 64, 1.0);
    const Vec p{2, 1, 0};
    ThetaPair pair = born_pair(p, 2);
    GreenTable g = faddeev_green(pair.k(), dom);
    auto gap = [&](double eps) {
      Potential v = sample_potential(PotentialSpec::gaussian(eps, {0, 0, 0}, 0.2), dom);
      FaddeevField f = lippmann_schwinger(v, pair.k(), g);
      return std::abs(amplitude_h(v, f, pair).h - fourier_at(v, p));
    };
    const double r = gap(0.1) / gap(0.05);
    CHECK(r > 3.0);
    CHECK(r < 5.5);
  }

  TEST_CASE("amplitude refuses a mismatched frequency") {
    Domain dom = build_square_domain(2, 32, 1.0);
    ThetaPair pa = born_pair({2, 0, 0}, 2);
    ThetaPair pb = born_pair({2, 1, 0}, 2);
    GreenTable g = faddeev_green(pa.k(), dom);
    Potential v = sample_potential(PotentialSpec::gaussian(0.1, {0, 0, 0}, 0.15), dom);
    FaddeevField f = lippmann_schwinger(v, pa.k(), g);
    CHECK_THROWS_AS(amplitude_h(v, f, pb), Error);
  }

  TEST_CASE("conjugate frequencies give conjugate amplitudes for real potentials") {
    Domain dom = build_square_domain(2, 64, 1.0);
    Potential v = sample_potential(PotentialSpec::gaussian(0.3, {0.07, -0.04, 0}, 0.18), dom);
    const Vec p{2, 1, 0};
    ThetaPair plus = born_pair(p, 2);
    ThetaPair minus = born_pair(Vec{-p[0], -p[1], 0}, 2);
    GreenTable gp = faddeev_green(plus.k(), dom);
    GreenTable gm = faddeev_green(minus.k(), dom);
    const cplx hp = amplitude_h(v, lippmann_schwinger(v, plus.k(), gp), plus).h;
    const cplx hm = amplitude_h(v, lippmann_schwinger(v, minus.k(), gm), minus).h;
    CHECK(std::abs(std::conj(hp) - hm) <= 1e-10 * std::abs(hp));
  }

  TEST_CASE("high-energy sweep of the zero potential is identically zero") {
    Domain dom = build_square_domain(3, 16, 1.0);
    auto rows = asymptotic_diagnostic(zero_potential(dom), {1, 0, 0}, {2.0, 4.0});
    for (const auto& r : rows) {
      CHECK(r.sup_mu_minus_one == 0.0);
      CHECK(r.h_gap == 0.0);
    }
  }

  TEST_CASE("high-energy gap decays like 1/rho for a finite-smoothness bump") {
    Domain dom = build_square_domain(3, 16, 1.0);
    auto spec = widened(PotentialSpec::poly_bump(1.0, {0, 0, 0}, 0.26, 4), 0.16, 0.32);
    Potential v = sample_potential(spec, dom, 4);
    auto rows = asymptotic_diagnostic(v, {2, 1, 0.5}, {2.0, 4.0, 8.0});
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& r : rows) {
      const double x = std::log(r.rho), y = std::log(r.h_gap);
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
    }
    const double slope = (3 * sxy - sx * sy) / (3 * sxx - sx * sx);
    CHECK(slope == doctest::Approx(-1.0).epsilon(0.3));
    CHECK(rows[0].sup_mu_minus_one >= rows[1].sup_mu_minus_one);
    CHECK(rows[1].sup_mu_minus_one >= rows[2].sup_mu_minus_one);
  }

  TEST_CASE("the recorded boundedness threshold moves with the potential size") {
    Domain dom = build_square_domain(2, 64, 1.0);
    const std::vector<double> sizes{1.0, 2.0, 4.0, 8.0};
    Potential weak = sample_potential(PotentialSpec::gaussian(0.01, {0, 0, 0}, 0.2), dom);
    const double rho_weak = bounded_field_threshold(weak, {1, 0, 0}, sizes);
    CHECK(rho_weak == 1.0);  // already bounded at the smallest size

    // an attractive well keeps near-resonant growth alive at small sizes
    Potential strong = sample_potential(PotentialSpec::gaussian(-20.0, {0, 0, 0}, 0.2), dom);
    const double rho_strong = bounded_field_threshold(strong, {1, 0, 0}, sizes);
    REQUIRE(std::isfinite(rho_strong));
    CHECK(rho_strong > rho_weak);
    // the reported size really does bound the field
    ThetaPair pair = born_pair({2.0 * rho_strong, 0, 0}, 2);
    GreenTable g = faddeev_green(pair.k(), dom);
    FaddeevField f = lippmann_schwinger(strong, pair.k(), g);
    double sup_mu = 0.0;
    for (const cplx& z : f.mu) sup_mu = std::max(sup_mu, std::abs(z));
    CHECK(sup_mu <= 1.5);
  }

  TEST_CASE("planar sweeps reject imaginary sizes off the variety") {
    Domain dom = build_square_domain(2, 32, 1.0);
    Potential v = sample_potential(PotentialSpec::gaussian(0.1, {0, 0, 0}, 0.15), dom);
    CHECK_THROWS_AS(asymptotic_diagnostic(v, {2, 0, 0}, {4.0}), Error);
  }
}
