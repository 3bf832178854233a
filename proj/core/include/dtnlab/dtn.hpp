#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <memory>

#include "dtnlab/potential.hpp"

namespace dtnlab {

struct GuardResult {
  bool pass = false;
  double min_eigenvalue = 0.0;  // smallest-magnitude eigenvalue estimate
  double threshold = 0.0;
  double margin = 0.0;  // |min_eigenvalue| - threshold
};

// Finite-difference Dirichlet solver for -lap(psi) + v psi = 0 on the cell-
// centered grid. Boundary data lives at face midpoints; the ghost value
// behind each face is eliminated through a quadratic fit (exact on second-
// degree polynomials), and the outward normal derivative uses a one-sided
// second-order stencil through the two interior layers.
class DirichletSolver {
 public:
  explicit DirichletSolver(const Potential& v);

  const Domain& domain() const { return *dom_; }

  // Interior field for the given face-midpoint Dirichlet data.
  Eigen::VectorXd solve(const Eigen::VectorXd& boundary_values) const;
  Eigen::MatrixXd solve_many(const Eigen::MatrixXd& boundary_columns) const;

  // d(psi)/d(nu) at every face midpoint.
  Eigen::VectorXd normal_derivative(const Eigen::VectorXd& interior,
                                    const Eigen::VectorXd& boundary_values) const;

  // Relative residual of the discrete equation for a computed field.
  double residual(const Eigen::VectorXd& interior,
                  const Eigen::VectorXd& boundary_values) const;

  // Smallest-magnitude eigenvalue of -lap_h + v via inverse power iteration.
  GuardResult guard() const;

 private:
  Eigen::VectorXd assemble_rhs(const Eigen::VectorXd& boundary_values) const;

  const Domain* dom_;
  Eigen::SparseMatrix<double> A_;
  std::unique_ptr<Eigen::SparseLU<Eigen::SparseMatrix<double>>> lu_;
  bool factorized_ = false;
};

struct SolveResult {
  std::vector<double> field;  // interior values
  double residual = 0.0;
};

SolveResult solve_dirichlet(const Potential& v, const std::vector<double>& boundary_values);

GuardResult dirichlet_guard(const Potential& v);

// Discrete DtN map: kernel matrix K over boundary faces with quadrature
// pairing, (Phi f)(x_i) = sum_j K(i,j) f(y_j) w_j.
struct DtnMap {
  const Domain* dom = nullptr;
  Eigen::MatrixXd kernel;
  GuardResult guard;
  double solve_residual = 0.0;  // worst impulse-column residual

  std::vector<double> apply(const std::vector<double>& f) const;
};

DtnMap dtn_map(const Potential& v);

// L-infinity operator norm of the kernel difference: max_i sum_j |dK| w_j.
double dtn_diff_norm(const DtnMap& a, const DtnMap& b);
double dtn_diff_norm(const Eigen::MatrixXd& ka, const Eigen::MatrixXd& kb,
                     const Domain& dom);

// Quadrature-weighted pairing <f, g>_w on the boundary.
double boundary_pairing(const Domain& dom, const std::vector<double>& f,
                        const std::vector<double>& g);

}  // namespace dtnlab
