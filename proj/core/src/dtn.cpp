#include "dtnlab/dtn.hpp"

#include <algorithm>

namespace dtnlab {

namespace {

// Deterministic pseudo-random start vector for the eigenvalue iteration.
double hash_unit(std::size_t i) {
  std::uint64_t z = (i + 1) * 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  z ^= z >> 31;
  return static_cast<double>(z % 1000003ull) / 1000003.0 - 0.5;
}

}  // namespace

DirichletSolver::DirichletSolver(const Potential& v) : dom_(&v.domain()) {
  const Domain& dom = *dom_;
  const int n = dom.resolution();
  const double inv_h2 = 1.0 / (dom.spacing() * dom.spacing());
  const std::size_t N = dom.num_interior();

  // One 3-point stencil per axis. Next to a face the ghost value behind the
  // boundary is eliminated by the quadratic fit through (face, cell, inner
  // neighbor), which turns [1 -2 1]/h^2 into [8/3(face) -4 4/3]/h^2.
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(N * (2 * dom.dim() + 1));
  for (std::size_t i = 0; i < N; ++i) {
    auto idx = dom.cell_of(i);
    double diag = v.value(i);
    for (int ax = 0; ax < dom.dim(); ++ax) {
      auto up = idx, dn = idx;
      up[ax] += 1;
      dn[ax] -= 1;
      if (idx[ax] == 0) {
        diag += 4.0 * inv_h2;
        trip.emplace_back(i, dom.flat_index(up), -4.0 / 3.0 * inv_h2);
      } else if (idx[ax] == n - 1) {
        diag += 4.0 * inv_h2;
        trip.emplace_back(i, dom.flat_index(dn), -4.0 / 3.0 * inv_h2);
      } else {
        diag += 2.0 * inv_h2;
        trip.emplace_back(i, dom.flat_index(up), -inv_h2);
        trip.emplace_back(i, dom.flat_index(dn), -inv_h2);
      }
    }
    trip.emplace_back(i, i, diag);
  }

  A_.resize(N, N);
  A_.setFromTriplets(trip.begin(), trip.end());
  A_.makeCompressed();

  lu_ = std::make_unique<Eigen::SparseLU<Eigen::SparseMatrix<double>>>();
  lu_->analyzePattern(A_);
  lu_->factorize(A_);
  factorized_ = (lu_->info() == Eigen::Success);
}

Eigen::VectorXd DirichletSolver::assemble_rhs(const Eigen::VectorXd& f) const {
  const Domain& dom = *dom_;
  const double inv_h2 = 1.0 / (dom.spacing() * dom.spacing());
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(dom.num_interior());
  for (std::size_t j = 0; j < dom.num_boundary(); ++j) {
    const BoundaryFace& face = dom.face(j);
    rhs[face.interior1] += (8.0 / 3.0) * inv_h2 * f[j];
  }
  return rhs;
}

Eigen::VectorXd DirichletSolver::solve(const Eigen::VectorXd& f) const {
  if (!factorized_)
    throw SolverError("DirichletSolver: singular system (zero is a Dirichlet eigenvalue?)");
  return lu_->solve(assemble_rhs(f));
}

Eigen::MatrixXd DirichletSolver::solve_many(const Eigen::MatrixXd& F) const {
  if (!factorized_)
    throw SolverError("DirichletSolver: singular system (zero is a Dirichlet eigenvalue?)");
  Eigen::MatrixXd rhs(dom_->num_interior(), F.cols());
  for (Eigen::Index c = 0; c < F.cols(); ++c) rhs.col(c) = assemble_rhs(F.col(c));
  return lu_->solve(rhs);
}

Eigen::VectorXd DirichletSolver::normal_derivative(const Eigen::VectorXd& u,
                                                   const Eigen::VectorXd& f) const {
  const Domain& dom = *dom_;
  const double inv3h = 1.0 / (3.0 * dom.spacing());
  Eigen::VectorXd out(dom.num_boundary());
  for (std::size_t j = 0; j < dom.num_boundary(); ++j) {
    const BoundaryFace& face = dom.face(j);
    out[j] = (8.0 * f[j] - 9.0 * u[face.interior1] + u[face.interior2]) * inv3h;
  }
  return out;
}

double DirichletSolver::residual(const Eigen::VectorXd& u,
                                 const Eigen::VectorXd& f) const {
  const Eigen::VectorXd rhs = assemble_rhs(f);
  const Eigen::VectorXd r = A_ * u - rhs;
  const double scale = std::max({rhs.lpNorm<Eigen::Infinity>(),
                                 (A_ * u).lpNorm<Eigen::Infinity>(), 1e-300});
  return r.lpNorm<Eigen::Infinity>() / scale;
}

GuardResult DirichletSolver::guard() const {
  const Domain& dom = *dom_;
  GuardResult g;
  // Discretization-noise floor: eigenvalues below ~10 h^2 times the scale of
  // the first Dirichlet eigenvalue cannot be distinguished from a genuine
  // zero crossing.
  const double h = dom.spacing();
  const double first_eig_scale = dom.dim() * kPi * kPi / (dom.side() * dom.side());
  g.threshold = 10.0 * (h / dom.side()) * (h / dom.side()) * first_eig_scale;
  if (!factorized_) {
    g.pass = false;
    g.min_eigenvalue = 0.0;
    g.margin = -g.threshold;
    return g;
  }

  const std::size_t N = dom.num_interior();
  Eigen::VectorXd x(N);
  for (std::size_t i = 0; i < N; ++i) x[i] = hash_unit(i);
  x.normalize();

  double lambda = 0.0, lambda_prev = 0.0;
  for (int it = 0; it < 200; ++it) {
    Eigen::VectorXd y = lu_->solve(x);
    const double yn = y.norm();
    if (!std::isfinite(yn) || yn == 0.0) break;
    lambda = y.dot(x) / y.dot(y);  // Rayleigh quotient of A at y (A y = x)
    y /= yn;
    x.swap(y);
    if (it > 2 && std::abs(lambda - lambda_prev) <= 1e-12 * std::abs(lambda)) break;
    lambda_prev = lambda;
  }
  g.min_eigenvalue = lambda;
  g.margin = std::abs(lambda) - g.threshold;
  g.pass = g.margin > 0.0;
  return g;
}

SolveResult solve_dirichlet(const Potential& v, const std::vector<double>& f) {
  const Domain& dom = v.domain();
  if (f.size() != dom.num_boundary())
    throw Error("solve_dirichlet: boundary data size mismatch");
  DirichletSolver solver(v);
  Eigen::VectorXd fb = Eigen::Map<const Eigen::VectorXd>(f.data(), f.size());
  Eigen::VectorXd u = solver.solve(fb);
  const double res = solver.residual(u, fb);
  if (res > 1e-10)
    throw SolverError("solve_dirichlet: residual " + std::to_string(res) +
                      " exceeds contract 1e-10");
  return SolveResult{std::vector<double>(u.data(), u.data() + u.size()), res};
}

GuardResult dirichlet_guard(const Potential& v) {
  return DirichletSolver(v).guard();
}

DtnMap dtn_map(const Potential& v) {
  const Domain& dom = v.domain();
  DirichletSolver solver(v);

  DtnMap map;
  map.dom = &dom;
  map.guard = solver.guard();
  if (!map.guard.pass)
    throw GuardError("dtn_map: zero-eigenvalue guard failed (margin " +
                     std::to_string(map.guard.margin) + ")");

  const std::size_t nb = dom.num_boundary();
  map.kernel.resize(nb, nb);

  const std::size_t chunk = 512;
  double worst = 0.0;
  for (std::size_t j0 = 0; j0 < nb; j0 += chunk) {
    const std::size_t jc = std::min(chunk, nb - j0);
    Eigen::MatrixXd F = Eigen::MatrixXd::Zero(nb, jc);
    for (std::size_t c = 0; c < jc; ++c)
      F(j0 + c, c) = 1.0 / dom.face(j0 + c).weight;
    Eigen::MatrixXd U = solver.solve_many(F);
    for (std::size_t c = 0; c < jc; ++c) {
      map.kernel.col(j0 + c) = solver.normal_derivative(U.col(c), F.col(c));
      worst = std::max(worst, solver.residual(U.col(c), F.col(c)));
    }
  }
  map.solve_residual = worst;
  return map;
}

std::vector<double> DtnMap::apply(const std::vector<double>& f) const {
  const std::size_t nb = dom->num_boundary();
  if (f.size() != nb) throw Error("DtnMap::apply: size mismatch");
  std::vector<double> out(nb, 0.0);
  for (std::size_t i = 0; i < nb; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < nb; ++j)
      s += kernel(i, j) * f[j] * dom->face(j).weight;
    out[i] = s;
  }
  return out;
}

double dtn_diff_norm(const Eigen::MatrixXd& ka, const Eigen::MatrixXd& kb,
                     const Domain& dom) {
  if (ka.rows() != kb.rows() || ka.cols() != kb.cols())
    throw Error("dtn_diff_norm: kernel shape mismatch");
  const std::size_t nb = dom.num_boundary();
  double best = 0.0;
  for (std::size_t i = 0; i < nb; ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < nb; ++j)
      row += std::abs(ka(i, j) - kb(i, j)) * dom.face(j).weight;
    best = std::max(best, row);
  }
  return best;
}

double dtn_diff_norm(const DtnMap& a, const DtnMap& b) {
  if (a.dom->hash() != b.dom->hash())
    throw Error("dtn_diff_norm: maps live on different domains");
  return dtn_diff_norm(a.kernel, b.kernel, *a.dom);
}

double boundary_pairing(const Domain& dom, const std::vector<double>& f,
                        const std::vector<double>& g) {
  double s = 0.0;
  for (std::size_t j = 0; j < dom.num_boundary(); ++j)
    s += f[j] * g[j] * dom.face(j).weight;
  return s;
}

}  // namespace dtnlab
