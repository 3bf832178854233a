#include "dtnlab/reduction.hpp"

#include <limits>
#include <sstream>

namespace dtnlab {

void BoundaryKernel::record_rows() {
  const std::size_t nb = dom->num_boundary();
  row_l1.assign(nb, 0.0);
  for (std::size_t i = 0; i < nb; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < static_cast<std::size_t>(mat.cols()); ++j)
      s += std::abs(mat(i, j)) * dom->face(j).weight;
    row_l1[i] = s;
  }
}

BoundaryKernel background_r1(const Potential& v1, const ComplexFrequency& k,
                             const GreenTable& g,
                             const std::vector<std::size_t>& sources) {
  const Domain& dom = v1.domain();
  if (dom.hash() != g.dom->hash())
    throw Error("background_r1: domain mismatch");

  std::vector<std::size_t> cols = sources;
  if (cols.empty()) {
    cols.resize(dom.num_boundary());
    for (std::size_t j = 0; j < cols.size(); ++j) cols[j] = j;
  }

  BoundaryKernel out;
  out.dom = &dom;
  out.mat.resize(dom.num_boundary(), cols.size());

  const bool zero_background = (v1.max_abs() == 0.0);
  if (zero_background) {
    // R1(x,y,k) = G(x-y,k) = e^{ik(x-y)} g(x-y,k)
    for (std::size_t c = 0; c < cols.size(); ++c) {
      const Vec& y = dom.face(cols[c]).position;
      for (std::size_t i = 0; i < dom.num_boundary(); ++i) {
        const Vec& x = dom.face(i).position;
        const cplx ikxy = cplx(0, 1) * cdot(k.components(), CVec{cplx(x[0] - y[0]),
                                                                 cplx(x[1] - y[1]),
                                                                 cplx(x[2] - y[2])});
        out.mat(i, c) = std::exp(ikxy) * g.between(x, y);
      }
    }
    out.record_rows();
    return out;
  }

  // Gauge away the exponential: with Rt(x,y) = e^{-ikx} R1(x,y),
  // Rt(.,y) = e^{-iky} g(.-y) + g*(v1 Rt(.,y)), the same operator as the
  // direct field equation.
  LippmannOperator op(v1, g);
  std::vector<std::size_t> supp;
  for (std::size_t i = 0; i < dom.num_interior(); ++i)
    if (v1.value(i) != 0.0) supp.push_back(i);
  const double volume = dom.cell_volume();
  const CVec kc = k.components();

  for (std::size_t c = 0; c < cols.size(); ++c) {
    const Vec& y = dom.face(cols[c]).position;
    const cplx eiky = std::exp(-cplx(0, 1) * dot(kc, y));
    std::vector<cplx> rhs(dom.num_interior());
    for (std::size_t i = 0; i < dom.num_interior(); ++i)
      rhs[i] = eiky * g.between(dom.interior_node(i), y);
    auto sol = op.solve(rhs, 1e-12);
    if (sol.residual > 1e-8) {
      std::ostringstream os;
      os << "background_r1: source " << cols[c] << " did not converge, residual "
         << sol.residual;
      throw SolverError(os.str());
    }
    // evaluate at the boundary and restore the gauge
    for (std::size_t b = 0; b < dom.num_boundary(); ++b) {
      const Vec& x = dom.face(b).position;
      cplx acc = eiky * g.between(x, y);
      for (std::size_t i : supp)
        acc += g.between(x, dom.interior_node(i)) * v1.value(i) * sol.x[i] * volume;
      out.mat(b, c) = std::exp(cplx(0, 1) * dot(kc, x)) * acc;
    }
  }
  out.record_rows();
  return out;
}

BoundaryKernel kernel_A(const BoundaryKernel& r1, const Eigen::MatrixXd& dtn_diff,
                        const Domain& dom) {
  if (r1.dom->hash() != dom.hash()) throw Error("kernel_A: domain mismatch");
  const std::size_t nb = dom.num_boundary();
  if (r1.mat.cols() != static_cast<Eigen::Index>(nb))
    throw Error("kernel_A: background kernel must carry all boundary columns");

  Eigen::VectorXd w(nb);
  for (std::size_t j = 0; j < nb; ++j) w[j] = dom.face(j).weight;

  BoundaryKernel out;
  out.dom = &dom;
  out.mat = r1.mat * w.asDiagonal() * dtn_diff;
  out.record_rows();
  return out;
}

Psi2Solution solve_psi2(const BoundaryKernel& A, const std::vector<cplx>& psi1_trace) {
  const Domain& dom = *A.dom;
  const std::size_t nb = dom.num_boundary();
  if (psi1_trace.size() != nb) throw Error("solve_psi2: trace size mismatch");

  Eigen::VectorXd w(nb);
  for (std::size_t j = 0; j < nb; ++j) w[j] = dom.face(j).weight;

  Eigen::MatrixXcd system =
      Eigen::MatrixXcd::Identity(nb, nb) - A.mat * w.asDiagonal();
  Eigen::VectorXcd rhs(nb);
  for (std::size_t j = 0; j < nb; ++j) rhs[j] = psi1_trace[j];

  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(system);
  const double rcond = lu.rcond();
  Eigen::VectorXcd sol = lu.solve(rhs);

  const double res = (system * sol - rhs).lpNorm<Eigen::Infinity>() /
                     std::max(rhs.lpNorm<Eigen::Infinity>(), 1e-300);
  if (!(res <= 1e-10)) {
    std::ostringstream os;
    os << "solve_psi2: near-singular reduction system at this frequency "
          "(residual "
       << res << ", rcond " << rcond << ")";
    throw SolverError(os.str());
  }

  Psi2Solution out;
  out.values.assign(sol.data(), sol.data() + sol.size());
  out.cond = (rcond > 0.0) ? 1.0 / rcond : std::numeric_limits<double>::infinity();
  out.residual = res;
  return out;
}

cplx h_from_dtn(const ThetaPair& pair, const Eigen::MatrixXd& dtn_diff,
                const std::vector<cplx>& psi1_at_minus_l,
                const std::vector<cplx>& psi2_at_k, const Domain& dom) {
  const std::size_t nb = dom.num_boundary();
  if (psi1_at_minus_l.size() != nb || psi2_at_k.size() != nb)
    throw Error("h_from_dtn: trace size mismatch");

  cplx acc(0, 0);
  for (std::size_t i = 0; i < nb; ++i) {
    cplx rowsum(0, 0);
    for (std::size_t j = 0; j < nb; ++j)
      rowsum += dtn_diff(i, j) * psi2_at_k[j] * dom.face(j).weight;
    acc += psi1_at_minus_l[i] * rowsum * dom.face(i).weight;
  }
  (void)pair;
  return acc / std::pow(2.0 * kPi, dom.dim());
}

std::vector<cplx> plane_wave_trace(const ComplexFrequency& q, const Domain& dom) {
  std::vector<cplx> out(dom.num_boundary());
  const CVec qc = q.components();
  for (std::size_t b = 0; b < dom.num_boundary(); ++b)
    out[b] = std::exp(cplx(0, 1) * dot(qc, dom.face(b).position));
  return out;
}

ReducedAmplitude reduce_zero_background(const ThetaPair& pair,
                                        const Eigen::MatrixXd& dtn_diff,
                                        const Domain& dom, int pad_factor) {
  const ComplexFrequency k = pair.k();
  const ComplexFrequency l = pair.l();

  GreenTable g = faddeev_green(k, dom, pad_factor);

  // zero background: psi1 = exp(ikx), R1 = G
  Potential zero(dom, std::vector<double>(dom.num_interior(), 0.0), dom.dim() + 1);
  BoundaryKernel r1 = background_r1(zero, k, g);
  BoundaryKernel A = kernel_A(r1, dtn_diff, dom);

  Psi2Solution psi2 = solve_psi2(A, plane_wave_trace(k, dom));
  const std::vector<cplx> psi1_ml = plane_wave_trace(l.negated(), dom);

  ReducedAmplitude out;
  out.h = h_from_dtn(pair, dtn_diff, psi1_ml, psi2.values, dom);
  out.cond = psi2.cond;
  out.solve_residual = psi2.residual;
  return out;
}

}  // namespace dtnlab
