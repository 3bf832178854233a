#include "dtnlab/stability.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "dtnlab/io.hpp"

namespace dtnlab {

void ExperimentConfig::validate() const {
  if (dimension != 2 && dimension != 3)
    throw Error("ExperimentConfig: dimension must be 2 or 3");
  if (smoothness_m <= dimension)
    throw Error("ExperimentConfig: smoothness order must exceed the dimension");
  if (epsilons.empty()) throw Error("ExperimentConfig: empty amplitude ladder");
  for (std::size_t i = 1; i < epsilons.size(); ++i)
    if (!(epsilons[i] < epsilons[i - 1]))
      throw Error("ExperimentConfig: amplitude ladder must be strictly decreasing");
  if (!(alpha > 0.0 && alpha < 1.0))
    throw Error("ExperimentConfig: alpha must lie in (0,1)");
  if (band_points < 2 || !(band_rho_max > band_rho_min) || band_rho_min <= 0.0)
    throw Error("ExperimentConfig: bad tail-decay band");
  if (band_rho_max > p_max)
    throw Error("ExperimentConfig: tail-decay band exceeds the frequency lattice");
}

namespace {

PotentialSpec scaled(PotentialSpec spec, double factor) {
  if (spec.kind == BumpKind::Sum) {
    for (auto& c : spec.components) c = scaled(c, factor);
  } else {
    spec.amplitude *= factor;
  }
  return spec;
}

}  // namespace

StabilityReport run_sweep(const ExperimentConfig& cfg) {
  cfg.validate();
  const Domain dom = build_square_domain(cfg.dimension, cfg.resolution, cfg.side);
  const FourierGrid fg = fourier_grid(dom, cfg.p_max, cfg.points_per_axis);
  const CutoffRule rule = make_cutoff_rule(dom, cfg.alpha);

  StabilityReport rep;
  rep.config_hash = io::config_hash_hex(cfg);
  rep.dimension = cfg.dimension;
  rep.resolution = cfg.resolution;
  rep.smoothness_m = cfg.smoothness_m;
  rep.side = cfg.side;
  rep.alpha = cfg.alpha;
  rep.lambda = rule.lambda();
  rep.radius_bound = dom.radius_bound();
  rep.c5_explicit = dom.boundary_measure() / std::pow(2.0 * kPi, dom.dim());
  rep.alpha1_ref = static_cast<double>(cfg.smoothness_m - cfg.dimension) / cfg.smoothness_m;
  rep.alpha2_ref = static_cast<double>(cfg.smoothness_m - cfg.dimension);

  const Potential v1 = sample_potential(cfg.base, dom, cfg.smoothness_m);
  const Potential unit_bump = sample_potential(cfg.bump, dom, cfg.smoothness_m);
  const Spectrum s1 = fourier_transform(v1, fg);

  // Tail decay of the pair difference: the difference spectrum is eps times
  // the unit bump spectrum, so the band slope comes from the bump alone.
  {
    const Spectrum sb = fourier_transform(unit_bump, fg);
    const Spectrum zero(fg, std::vector<cplx>(fg.size(), cplx(0, 0)));
    std::vector<std::pair<double, double>> pts;
    for (int t = 0; t < cfg.band_points; ++t) {
      const double rho =
          cfg.band_rho_min * std::pow(cfg.band_rho_max / cfg.band_rho_min,
                                      static_cast<double>(t) / (cfg.band_points - 1));
      const ErrorSplit es = error_split(sb, zero, rho);
      rep.i2_curve.emplace_back(rho, es.i2);
    }
    // least squares in log-log
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int m = 0;
    for (auto& [rho, i2] : rep.i2_curve) {
      if (i2 <= 0.0) continue;
      const double x = std::log(rho), y = std::log(i2);
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
      ++m;
    }
    if (m >= 2) {
      rep.i2_slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
      double ssr = 0;
      const double b = (sy - rep.i2_slope * sx) / m;
      for (auto& [rho, i2] : rep.i2_curve) {
        if (i2 <= 0.0) continue;
        const double r = std::log(i2) - (rep.i2_slope * std::log(rho) + b);
        ssr += r * r;
      }
      rep.i2_slope_residual = std::sqrt(ssr / m);
    }
  }

  DtnMap phi1;
  bool phi1_ok = true;
  std::string phi1_note;
  try {
    phi1 = dtn_map(v1);
  } catch (const Error& e) {
    phi1_ok = false;
    phi1_note = e.what();
  }

  for (double eps : cfg.epsilons) {
    SweepRecord rec;
    rec.eps = eps;
    rec.coarse = (cfg.dimension == 3 && cfg.resolution <= 24);

    if (!phi1_ok) {
      rec.guard_ok = false;
      rec.note = "base potential rejected: " + phi1_note;
      rep.records.push_back(rec);
      continue;
    }

    PotentialSpec pair_spec = PotentialSpec::sum({cfg.base, scaled(cfg.bump, eps)});
    const Potential v2 = sample_potential(pair_spec, dom, cfg.smoothness_m);

    DtnMap phi2;
    try {
      phi2 = dtn_map(v2);
    } catch (const Error& e) {
      rec.guard_ok = false;
      rec.note = e.what();
      rep.records.push_back(rec);
      continue;
    }

    rec.delta = dtn_diff_norm(phi1, phi2);
    double sup_true = 0.0;
    for (std::size_t i = 0; i < dom.num_interior(); ++i)
      sup_true = std::max(sup_true, std::abs(v1.value(i) - v2.value(i)));
    rec.sup_true_diff = sup_true;

    if (rec.delta == 0.0) {
      rec.exact_branch = true;  // identical data: the difference is zero
      rep.records.push_back(rec);
      continue;
    }

    rec.rho = cutoff_rho(rec.delta, rule);
    if (rec.rho > fg.p_max()) {
      rec.note = "cutoff clamped to the lattice radius";
      rec.rho = fg.p_max();
    }

    const Eigen::MatrixXd dk = phi1.kernel - phi2.kernel;
    Reconstruction rec_field = reconstruct(dk, rec.rho, fg, dom, cfg.threads);
    rec.imag_residue = rec_field.imag_residue;

    double sup_err = 0.0;
    for (std::size_t i = 0; i < dom.num_interior(); ++i) {
      const double truth = v1.value(i) - v2.value(i);
      sup_err = std::max(sup_err, std::abs(rec_field.values[i] - truth));
    }
    rec.sup_err = sup_err;

    const Spectrum s2 = fourier_transform(v2, fg);
    const ErrorSplit es = error_split(s1, s2, rec.rho);
    rec.i1 = es.i1;
    rec.i2 = es.i2;

    double band_ratio = 0.0;
    for (std::size_t i = 0; i < fg.size(); ++i) {
      const double pn = norm2(fg.node(i));
      if (pn >= rec.rho) continue;
      const double bound = std::exp(dom.radius_bound() * pn) * rec.delta;
      band_ratio = std::max(band_ratio, std::abs(rec_field.vhat[i]) / bound);
    }
    rec.vhat_band_ratio = band_ratio;
    rec.i1_growth_ratio = rec.i1 / (rec.delta * std::exp(rule.L1() * rec.rho));

    rep.records.push_back(rec);
  }

  // stability exponent fit over the usable records
  std::vector<std::pair<double, double>> pts;
  for (const auto& r : rep.records)
    if (r.guard_ok && !r.exact_branch && r.delta > 0.0 && r.sup_err > 0.0)
      pts.emplace_back(r.delta, r.sup_err);
  if (pts.size() >= 3) {
    double dmin = pts.front().first, dmax = pts.front().first;
    for (auto& [d, e] : pts) {
      dmin = std::min(dmin, d);
      dmax = std::max(dmax, d);
    }
    if (dmax / dmin >= 100.0) {
      const FitResult fit = fit_exponent(pts);
      rep.fitted_slope = fit.slope;
      rep.fitted_slope_residual = fit.residual;
    }
  }
  return rep;
}

FitResult fit_exponent(const std::vector<std::pair<double, double>>& delta_error) {
  std::vector<std::pair<double, double>> usable;
  for (const auto& [d, e] : delta_error)
    if (d > 0.0 && e > 0.0) usable.emplace_back(d, e);
  if (usable.size() < 3)
    throw Error("fit_exponent: need at least three points with positive delta and error");
  double dmin = usable.front().first, dmax = usable.front().first;
  for (const auto& [d, e] : usable) {
    dmin = std::min(dmin, d);
    dmax = std::max(dmax, d);
  }
  if (dmax / dmin < 100.0)
    throw Error("fit_exponent: delta span below two decades; refusing the fit");

  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const int m = static_cast<int>(usable.size());
  std::vector<double> xs(m), ys(m);
  for (int i = 0; i < m; ++i) {
    xs[i] = std::log(std::log1p(1.0 / usable[i].first));
    ys[i] = std::log(usable[i].second);
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  FitResult fit;
  fit.points = m;
  fit.slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  fit.intercept = (sy - fit.slope * sx) / m;
  double ssr = 0;
  for (int i = 0; i < m; ++i) {
    const double r = ys[i] - (fit.slope * xs[i] + fit.intercept);
    ssr += r * r;
  }
  fit.residual = std::sqrt(ssr / m);
  return fit;
}

bool BoundsLedger::all_pass() const {
  for (const auto& e : entries)
    if (!e.pass) return false;
  return true;
}

BoundsLedger verify_bounds(const StabilityReport& rep) {
  BoundsLedger ledger;
  const int md = rep.smoothness_m - rep.dimension;

  // pointwise triangle bound: sup|v1-v2| <= I1 + I2 up to lattice quadrature
  {
    BoundsLedger::Entry e;
    e.name = "triangle-split";
    e.pass = true;
    e.margin = std::numeric_limits<double>::infinity();
    for (const auto& r : rep.records) {
      if (!r.guard_ok) continue;
      const double right = r.i1 + r.i2;
      const double slack = 0.02 * right + 1e-14;
      const double margin = right + slack - r.sup_true_diff;
      e.margin = std::min(e.margin, margin);
      if (margin < 0.0) e.pass = false;
    }
    std::ostringstream os;
    os << "sup|v1-v2| <= I1+I2 (2% lattice slack) on every record";
    e.detail = os.str();
    ledger.entries.push_back(e);
  }

  // tail decay at least as fast as the smoothness class predicts (20% slack)
  {
    BoundsLedger::Entry e;
    e.name = "tail-decay-slope";
    const double required = -0.8 * md;
    e.pass = rep.i2_slope <= required;
    e.margin = required - rep.i2_slope;
    std::ostringstream os;
    os << "I2 band slope " << rep.i2_slope << " vs required " << required;
    e.detail = os.str();
    ledger.entries.push_back(e);
  }

  // one growth constant for I1/(delta e^{L1 rho}) across the ladder, factor 3
  {
    BoundsLedger::Entry e;
    e.name = "low-band-growth-constant";
    std::vector<double> ratios;
    for (const auto& r : rep.records)
      if (r.guard_ok && !r.exact_branch && r.i1_growth_ratio > 0.0)
        ratios.push_back(r.i1_growth_ratio);
    if (ratios.size() < 2) {
      e.pass = true;
      e.detail = "fewer than two usable records";
    } else {
      double logsum = 0.0;
      for (double r : ratios) logsum += std::log(r);
      const double fit = std::exp(logsum / ratios.size());
      double worst = 1.0;
      for (double r : ratios) worst = std::max({worst, r / fit, fit / r});
      e.pass = worst <= 3.0;
      e.margin = 3.0 - worst;
      std::ostringstream os;
      os << "fitted constant " << fit << ", worst spread factor " << worst;
      e.detail = os.str();
    }
    ledger.entries.push_back(e);
  }

  // estimated spectrum obeys the explicit band bound
  {
    BoundsLedger::Entry e;
    e.name = "band-bound-explicit";
    e.pass = true;
    e.margin = std::numeric_limits<double>::infinity();
    for (const auto& r : rep.records) {
      if (!r.guard_ok || r.exact_branch) continue;
      const double margin = rep.c5_explicit * (1.0 + 1e-9) - r.vhat_band_ratio;
      e.margin = std::min(e.margin, margin);
      if (margin < 0.0) e.pass = false;
    }
    std::ostringstream os;
    os << "max |vhat_est|/(e^{L|p|} delta) <= (2 pi)^-d |boundary| = "
       << rep.c5_explicit;
    e.detail = os.str();
    ledger.entries.push_back(e);
  }

  // cutoff rule stabilizes: sup error nonincreasing as delta falls
  {
    BoundsLedger::Entry e;
    e.name = "error-monotone";
    e.pass = true;
    e.margin = std::numeric_limits<double>::infinity();
    const SweepRecord* prev = nullptr;
    for (const auto& r : rep.records) {
      if (!r.guard_ok || r.exact_branch) continue;
      if (prev) {
        const double margin = prev->sup_err * 1.05 - r.sup_err;
        e.margin = std::min(e.margin, margin);
        if (margin < 0.0) e.pass = false;
      }
      prev = &r;
    }
    e.detail = "sup error nonincreasing along the ladder (5% slack)";
    ledger.entries.push_back(e);
  }

  // the fitted exponent beats the conservative reference slope
  if (rep.fitted_slope != 0.0) {
    BoundsLedger::Entry e;
    e.name = "exponent-beats-alpha1";
    e.pass = rep.fitted_slope < -rep.alpha1_ref;
    e.margin = -rep.alpha1_ref - rep.fitted_slope;
    std::ostringstream os;
    os << "fitted slope " << rep.fitted_slope << " vs -alpha1 = " << -rep.alpha1_ref;
    e.detail = os.str();
    ledger.entries.push_back(e);
  }

  return ledger;
}

}  // namespace dtnlab
