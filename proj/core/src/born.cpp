#include "dtnlab/born.hpp"

#include "dtnlab/parallel.hpp"

namespace dtnlab {

CutoffRule make_cutoff_rule(const Domain& dom, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw Error("make_cutoff_rule: alpha must lie in (0,1)");
  CutoffRule rule;
  rule.alpha = alpha;
  rule.L = dom.radius_bound();
  rule.dim = dom.dim();
  return rule;
}

double cutoff_rho(double delta, const CutoffRule& rule) {
  if (!(delta > 0.0))
    throw Error("cutoff_rho: delta must be positive; exact data is the caller's branch");
  return rule.lambda() * std::log1p(1.0 / delta);
}

cplx vhat_from_dtn(const Vec& p, const Eigen::MatrixXd& dtn_diff, const Domain& dom) {
  const std::size_t nb = dom.num_boundary();
  const ThetaPair pair = born_pair(p, dom.dim());
  const CVec kc = pair.k().components();
  const CVec lc = pair.l().components();

  // column factor e^{ik y_j} w_j, row factor e^{-il x_i} w_i
  Eigen::VectorXcd colf(nb), rowf(nb);
  for (std::size_t j = 0; j < nb; ++j) {
    const BoundaryFace& f = dom.face(j);
    colf[j] = std::exp(cplx(0, 1) * dot(kc, f.position)) * f.weight;
    rowf[j] = std::exp(-cplx(0, 1) * dot(lc, f.position)) * f.weight;
  }
  const cplx quad = rowf.transpose() * (dtn_diff * colf).eval();
  return quad / std::pow(2.0 * kPi, dom.dim());
}

Reconstruction reconstruct(const Eigen::MatrixXd& dtn_diff, double rho,
                           const FourierGrid& fg, const Domain& dom,
                           int threads) {
  if (rho > fg.p_max() + 1e-12)
    throw Error("reconstruct: cutoff exceeds the frequency lattice radius");

  Reconstruction rec;
  rec.grid = &fg;
  rec.rho = rho;
  rec.vhat.assign(fg.size(), cplx(0, 0));

  std::vector<std::size_t> sel;
  for (std::size_t i = 0; i < fg.size(); ++i)
    if (norm2(fg.node(i)) < rho) sel.push_back(i);

  parallel_for(sel.size(), threads, [&](std::size_t s) {
    const std::size_t i = sel[s];
    rec.vhat[i] = vhat_from_dtn(fg.node(i), dtn_diff, dom);
  });

  Spectrum est(fg, rec.vhat);
  InverseFourierResult inv = inverse_fourier(est, dom.interior_nodes(), rho, threads);
  rec.values = std::move(inv.values);
  rec.imag_residue = inv.imag_residue;
  return rec;
}

ErrorSplit error_split(const Spectrum& s1, const Spectrum& s2, double rho) {
  const FourierGrid& fg = s1.grid();
  if (&fg != &s2.grid() || s1.values().size() != s2.values().size())
    throw Error("error_split: spectra live on different lattices");

  ErrorSplit out;
  const double w = fg.weight();
  const double outer_shell = fg.p_max() - 1.5 * fg.spacing();
  for (std::size_t i = 0; i < fg.size(); ++i) {
    const double pn = norm2(fg.node(i));
    const double a = std::abs(s1.value(i) - s2.value(i)) * w;
    if (pn < rho)
      out.i1 += a;
    else
      out.i2 += a;
    if (pn >= outer_shell) out.tail += a;
  }
  return out;
}

}  // namespace dtnlab
