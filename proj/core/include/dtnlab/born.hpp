#pragma once

#include <Eigen/Dense>

#include "dtnlab/dtn.hpp"
#include "dtnlab/faddeev.hpp"

namespace dtnlab {

// Log-cutoff rule rho(delta) = lambda ln(1 + 1/delta), lambda = (1-alpha)/L1,
// L1 = L + d with L the domain radius bound.
struct CutoffRule {
  double alpha = 0.5;
  double L = 0.0;
  int dim = 2;

  double L1() const { return L + dim; }
  double lambda() const { return (1.0 - alpha) / L1(); }
};

CutoffRule make_cutoff_rule(const Domain& dom, double alpha = 0.5);

// rho = lambda ln(1 + 1/delta); delta must be positive (exact data is the
// caller's zero branch).
double cutoff_rho(double delta, const CutoffRule& rule);

// Spectrum estimate at one real frequency from a DtN difference against the
// zero-potential map: double boundary quadrature of
// (2 pi)^-d exp(-il(p)x) dPhi(x,y) exp(ik(p)y) at the Born pair of p.
cplx vhat_from_dtn(const Vec& p, const Eigen::MatrixXd& dtn_diff, const Domain& dom);

struct Reconstruction {
  const FourierGrid* grid = nullptr;
  std::vector<cplx> vhat;       // estimated spectrum; zero outside the cutoff ball
  std::vector<double> values;   // real-part field on interior nodes
  double rho = 0.0;
  double imag_residue = 0.0;    // max|Im| / max|Re| of the inverted field
};

Reconstruction reconstruct(const Eigen::MatrixXd& dtn_diff, double rho,
                           const FourierGrid& fg, const Domain& dom,
                           int threads = 1);

struct ErrorSplit {
  double i1 = 0.0;    // integral of |s1 - s2| over |p| <  rho
  double i2 = 0.0;    // integral of |s1 - s2| over |p| >= rho
  double tail = 0.0;  // outermost-shell mass, reported truncation indicator
};

ErrorSplit error_split(const Spectrum& s1, const Spectrum& s2, double rho);

}  // namespace dtnlab
