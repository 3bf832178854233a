#pragma once

#include <string>
#include <utility>
#include <vector>

#include "dtnlab/born.hpp"

namespace dtnlab {

inline constexpr const char* kCodeVersion = "dtnlab 0.1.0";

// Full description of a two-potential stability experiment: a base potential
// v1 and perturbations v2 = v1 + eps*bump over a decreasing amplitude ladder.
struct ExperimentConfig {
  int dimension = 2;
  int resolution = 64;
  double side = 1.0;

  PotentialSpec base;
  PotentialSpec bump;
  std::vector<double> epsilons;
  int smoothness_m = 4;

  double p_max = 10.0;
  int points_per_axis = 21;
  double alpha = 0.5;

  // band for the tail-decay slope of the pair difference spectrum
  double band_rho_min = 2.0;
  double band_rho_max = 8.0;
  int band_points = 4;

  int threads = 1;
  int pad_factor = 0;

  void validate() const;
};

struct SweepRecord {
  double eps = 0.0;
  double delta = 0.0;
  double rho = 0.0;
  double sup_err = 0.0;
  double sup_true_diff = 0.0;
  double i1 = 0.0;
  double i2 = 0.0;
  double vhat_band_ratio = 0.0;   // max_{|p|<rho} |vhat_est(p)| / (e^{L|p|} delta)
  double i1_growth_ratio = 0.0;   // i1 / (delta e^{L1 rho})
  double imag_residue = 0.0;
  bool exact_branch = false;
  bool guard_ok = true;
  bool coarse = false;
  std::string note;
};

struct StabilityReport {
  std::string code_version = kCodeVersion;
  std::string config_hash;

  int dimension = 0, resolution = 0, smoothness_m = 0;
  double side = 0.0, alpha = 0.0, lambda = 0.0, radius_bound = 0.0;
  double c5_explicit = 0.0;  // (2 pi)^-d |boundary|

  std::vector<SweepRecord> records;

  std::vector<std::pair<double, double>> i2_curve;  // (rho, I2) of the unit bump
  double i2_slope = 0.0, i2_slope_residual = 0.0;

  double fitted_slope = 0.0, fitted_slope_residual = 0.0;
  double alpha1_ref = 0.0;  // (m-d)/m
  double alpha2_ref = 0.0;  // m-d
};

StabilityReport run_sweep(const ExperimentConfig& cfg);

struct FitResult {
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;  // rms in log coordinates
  int points = 0;
};

// Least-squares slope of ln(error) against ln(ln(1 + 1/delta)). Requires at
// least three usable points spanning two decades of delta.
FitResult fit_exponent(const std::vector<std::pair<double, double>>& delta_error);

struct BoundsLedger {
  struct Entry {
    std::string name;
    bool pass = false;
    double margin = 0.0;
    std::string detail;
  };
  std::vector<Entry> entries;
  bool all_pass() const;
};

BoundsLedger verify_bounds(const StabilityReport& report);

}  // namespace dtnlab
