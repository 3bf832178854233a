#include "dtnlab/faddeev.hpp"

#include <algorithm>
#include <limits>
#include <sstream>

#include "dtnlab/fft.hpp"

namespace dtnlab {

namespace {

Vec canonical_sign(const Vec& p) {
  // flip to the lexicographically positive representative
  for (int ax = 0; ax < 3; ++ax) {
    if (p[ax] > 0.0) return p;
    if (p[ax] < 0.0) return Vec{-p[0], -p[1], -p[2]};
  }
  return p;
}

}  // namespace

ComplexFrequency ComplexFrequency::on_variety(const Vec& re, const Vec& im) {
  const double a2 = dot(re, re), b2 = dot(im, im);
  const double scale = std::max({a2, b2, 1e-300});
  if (std::abs(a2 - b2) > 1e-12 * scale || std::abs(dot(re, im)) > 1e-12 * scale)
    throw Error("ComplexFrequency: k^2 = 0 violated beyond 1e-12 relative");
  return ComplexFrequency{re, im};
}

Vec gamma_direction(const Vec& p, int dim) {
  const double pn = norm2(p);
  if (pn == 0.0) throw Error("gamma_direction: p must be nonzero");
  const Vec c = canonical_sign(p);
  if (dim == 2) {
    return Vec{-c[1] / pn, c[0] / pn, 0.0};
  }
  // basis vector least aligned with p, ties to the smallest index
  int best = 0;
  double best_align = std::abs(c[0]);
  for (int ax = 1; ax < 3; ++ax) {
    const double align = std::abs(c[ax]);
    if (align < best_align - 1e-15 * pn) {
      best = ax;
      best_align = align;
    }
  }
  Vec e{0, 0, 0};
  e[best] = 1.0;
  Vec g = cross(e, c);
  const double gn = norm2(g);
  return {g[0] / gn, g[1] / gn, g[2] / gn};
}

ThetaPair born_pair(const Vec& p, int dim) {
  ThetaPair pair;
  if (norm2(p) == 0.0) return pair;  // degenerate zero-frequency pair
  const Vec g = gamma_direction(p, dim);
  const double beta = 0.5 * norm2(p);
  pair.k_re = 0.5 * p;
  pair.l_re = -0.5 * p;
  pair.im = beta * g;
  return pair;
}

ThetaPair theta_pair_3d(const Vec& p, double rho, const Vec& eta1, const Vec& eta2) {
  const double pn = norm2(p);
  if (rho < 0.5 * pn - 1e-14 * std::max(1.0, pn))
    throw Error("theta_pair_3d: need |Im k| >= |p|/2");
  const double tol = 1e-10;
  if (std::abs(norm2(eta1) - 1.0) > tol || std::abs(norm2(eta2) - 1.0) > tol ||
      std::abs(dot(eta1, eta2)) > tol || std::abs(dot(eta1, p)) > tol * std::max(1.0, pn) ||
      std::abs(dot(eta2, p)) > tol * std::max(1.0, pn))
    throw Error("theta_pair_3d: frame must be orthonormal and orthogonal to p");
  const double t2 = rho * rho - 0.25 * pn * pn;
  const double t = t2 > 0.0 ? std::sqrt(t2) : 0.0;
  ThetaPair pair;
  pair.k_re = 0.5 * p + t * eta2;
  pair.l_re = -0.5 * p + t * eta2;
  pair.im = rho * eta1;
  return pair;
}

ThetaPair theta_pair_3d(const Vec& p, double rho) {
  const Vec eta1 = gamma_direction(p, 3);
  const Vec c = canonical_sign(p);
  const double pn = norm2(p);
  Vec eta2 = cross(Vec{c[0] / pn, c[1] / pn, c[2] / pn}, eta1);
  return theta_pair_3d(p, rho, eta1, eta2);
}

cplx GreenTable::at(int j0, int j1, int j2) const {
  const int w = 2 * ext + 1;
  std::size_t idx = static_cast<std::size_t>(j0 + ext) * w + (j1 + ext);
  if (dom->dim() == 3) idx = idx * w + (j2 + ext);
  return table[idx];
}

cplx GreenTable::between(const Vec& x, const Vec& y) const {
  const double half = 0.5 * dom->spacing();
  int j[3] = {0, 0, 0};
  for (int ax = 0; ax < dom->dim(); ++ax) {
    const double raw = (x[ax] - y[ax]) / half;
    j[ax] = static_cast<int>(std::lround(raw));
    if (std::abs(raw - j[ax]) > 1e-6)
      throw Error("GreenTable::between: points are off the half-step lattice");
    if (std::abs(j[ax]) > ext)
      throw Error("GreenTable::between: difference outside the table");
  }
  return at(j[0], j[1], j[2]);
}

namespace {

struct SymbolGrid {
  std::vector<cplx> coeff;  // FFT layout, M^d
  double min_abs = 0.0;
};

// coeff[m] = -(dxi/2pi)^d / S(xi_m) with the lattice-consistent symbol
// S(xi) = (2/h^2) sum_ax [cos(k_ax h) - cos((xi_ax + k_ax) h)].
SymbolGrid build_symbol(const ComplexFrequency& k, int d, int M, double h,
                        double offset) {
  const double dxi = 2.0 * kPi / (M * h);
  std::vector<cplx> cos_shift(static_cast<std::size_t>(M) * d);
  cplx cos_k_sum(0, 0);
  for (int ax = 0; ax < d; ++ax) {
    const cplx kh = cplx(k.re[ax], k.im[ax]) * h;
    cos_k_sum += std::cos(kh);
    for (int mm = 0; mm < M; ++mm) {
      const int m = (mm < M / 2) ? mm : mm - M;
      const double xi = (m + offset) * dxi;
      cos_shift[static_cast<std::size_t>(ax) * M + mm] = std::cos(xi * h + kh);
    }
  }

  const double amp = -std::pow(dxi / (2.0 * kPi), d);
  const double two_h2 = 2.0 / (h * h);
  SymbolGrid out;
  out.min_abs = std::numeric_limits<double>::infinity();
  std::size_t total = 1;
  for (int ax = 0; ax < d; ++ax) total *= M;
  out.coeff.resize(total);

  if (d == 2) {
    for (int m0 = 0; m0 < M; ++m0) {
      const cplx c0 = cos_shift[m0];
      for (int m1 = 0; m1 < M; ++m1) {
        const cplx S = two_h2 * (cos_k_sum - c0 - cos_shift[M + m1]);
        const double a = std::abs(S);
        out.min_abs = std::min(out.min_abs, a);
        out.coeff[static_cast<std::size_t>(m0) * M + m1] = amp / S;
      }
    }
  } else {
    for (int m0 = 0; m0 < M; ++m0)
      for (int m1 = 0; m1 < M; ++m1) {
        const cplx c01 = cos_k_sum - cos_shift[m0] - cos_shift[M + m1];
        cplx* row = out.coeff.data() + (static_cast<std::size_t>(m0) * M + m1) * M;
        for (int m2 = 0; m2 < M; ++m2) {
          const cplx S = two_h2 * (c01 - cos_shift[2 * M + m2]);
          const double a = std::abs(S);
          out.min_abs = std::min(out.min_abs, a);
          row[m2] = amp / S;
        }
      }
  }
  return out;
}

}  // namespace

GreenTable faddeev_green(const ComplexFrequency& k, const Domain& dom,
                         int pad_factor) {
  const int d = dom.dim();
  const int n = dom.resolution();
  const double h = dom.spacing();

  const double rho_max = kPi / (6.0 * h);
  if (k.rho() > rho_max + 1e-12) {
    std::ostringstream os;
    os << "faddeev_green: |Im k| = " << k.rho() << " exceeds the resolvable bound "
       << rho_max << " at this resolution (six cells per oscillation)";
    throw Error(os.str());
  }

  if (pad_factor <= 0) pad_factor = (d == 2) ? 8 : 4;
  const int M = static_cast<int>(next_pow2(static_cast<std::size_t>(pad_factor) * n));
  const double xi_max = kPi / h;
  const double denom_tol = 1e-8 * xi_max * xi_max;

  GreenTable g;
  g.k = k;
  g.dom = &dom;
  g.M = M;
  g.xi_max = xi_max;
  g.ext = 2 * n;

  cplx sigma(0, 0);
  for (int ax = 0; ax < d; ++ax) {
    const cplx kh = cplx(k.re[ax], k.im[ax]) * h;
    sigma += (std::cos(kh) - 1.0);
  }
  g.sigma_k = 2.0 / (h * h) * sigma;

  SymbolGrid sym;
  bool ok = false;
  for (double c : {0.5, 0.25, 0.75}) {
    sym = build_symbol(k, d, M, h, c);
    if (sym.min_abs >= denom_tol) {
      g.offset = c;
      ok = true;
      break;
    }
  }
  if (!ok)
    throw Error("faddeev_green: offset lattice keeps hitting near-zeros of the symbol");
  g.min_symbol = sym.min_abs;

  // Half-step synthesis by parity class: x = (t + s/2) h per axis,
  // g(x) = prod_ax e^{i 2 pi c t/M} * DFT_t[ coeff * e^{i xi s h/2} ].
  const int w = 2 * g.ext + 1;
  std::size_t table_size = 1;
  for (int ax = 0; ax < d; ++ax) table_size *= w;
  g.table.assign(table_size, cplx(0, 0));

  const double dxi = 2.0 * kPi / (M * h);
  std::vector<std::size_t> dims(d, static_cast<std::size_t>(M));
  std::vector<cplx> half_phase(M);  // e^{i xi_m h/2} per storage index
  for (int mm = 0; mm < M; ++mm) {
    const int m = (mm < M / 2) ? mm : mm - M;
    const double ph = (m + g.offset) * dxi * 0.5 * h;
    half_phase[mm] = cplx(std::cos(ph), std::sin(ph));
  }
  std::vector<cplx> twist(2 * M);  // e^{i 2 pi c t / M} for |t| < M, index t+M
  for (int t = -M; t < M; ++t) {
    const double ph = 2.0 * kPi * g.offset * t / M;
    twist[t + M] = cplx(std::cos(ph), std::sin(ph));
  }

  std::vector<cplx> buf;
  const int parities = 1 << d;
  for (int par = 0; par < parities; ++par) {
    std::array<int, 3> s{par & 1, (par >> 1) & 1, (par >> 2) & 1};
    buf = sym.coeff;
    // attach the half-step phase on the axes with odd parity
    if (d == 2) {
      for (int m0 = 0; m0 < M; ++m0)
        for (int m1 = 0; m1 < M; ++m1) {
          cplx f(1, 0);
          if (s[0]) f *= half_phase[m0];
          if (s[1]) f *= half_phase[m1];
          if (s[0] || s[1]) buf[static_cast<std::size_t>(m0) * M + m1] *= f;
        }
    } else {
      for (int m0 = 0; m0 < M; ++m0)
        for (int m1 = 0; m1 < M; ++m1)
          for (int m2 = 0; m2 < M; ++m2) {
            cplx f(1, 0);
            if (s[0]) f *= half_phase[m0];
            if (s[1]) f *= half_phase[m1];
            if (s[2]) f *= half_phase[m2];
            if (s[0] || s[1] || s[2])
              buf[(static_cast<std::size_t>(m0) * M + m1) * M + m2] *= f;
          }
    }
    fftnd(buf, dims, +1);

    // scatter into the table at matching parities
    auto wrap = [M](int t) { return ((t % M) + M) % M; };
    for (int j0 = -g.ext; j0 <= g.ext; ++j0) {
      if (((j0 % 2) + 2) % 2 != s[0]) continue;
      const int t0 = (j0 - s[0]) / 2;
      for (int j1 = -g.ext; j1 <= g.ext; ++j1) {
        if (((j1 % 2) + 2) % 2 != s[1]) continue;
        const int t1 = (j1 - s[1]) / 2;
        if (d == 2) {
          const cplx val = buf[static_cast<std::size_t>(wrap(t0)) * M + wrap(t1)] *
                           twist[t0 + M] * twist[t1 + M];
          g.table[static_cast<std::size_t>(j0 + g.ext) * w + (j1 + g.ext)] = val;
        } else {
          for (int j2 = -g.ext; j2 <= g.ext; ++j2) {
            if (((j2 % 2) + 2) % 2 != s[2]) continue;
            const int t2 = (j2 - s[2]) / 2;
            const cplx val =
                buf[(static_cast<std::size_t>(wrap(t0)) * M + wrap(t1)) * M + wrap(t2)] *
                twist[t0 + M] * twist[t1 + M] * twist[t2 + M];
            g.table[(static_cast<std::size_t>(j0 + g.ext) * w + (j1 + g.ext)) * w +
                    (j2 + g.ext)] = val;
          }
        }
      }
    }
  }

  // keep the symbol coefficients for convolution users
  g.coeff = std::move(sym.coeff);
  return g;
}

double green_delta_residual(const GreenTable& g) {
  const Domain& dom = *g.dom;
  const int d = dom.dim();
  const double h = dom.spacing();
  const double inv_h2 = 1.0 / (h * h);
  const int reach = g.ext - 2;

  CVec ephase;  // e^{i k_ax h}
  for (int ax = 0; ax < d; ++ax) {
    const cplx kh = cplx(g.k.re[ax], g.k.im[ax]) * h;
    ephase[ax] = std::exp(cplx(0, 1) * kh);
  }

  double worst = 0.0;
  auto visit = [&](int j0, int j1, int j2) {
    cplx acc = -g.sigma_k * g.at(j0, j1, j2);
    for (int ax = 0; ax < d; ++ax) {
      int u[3] = {j0, j1, j2}, v[3] = {j0, j1, j2};
      u[ax] += 2;  // one grid step = two half-steps
      v[ax] -= 2;
      acc += (ephase[ax] * g.at(u[0], u[1], u[2]) +
              g.at(v[0], v[1], v[2]) / ephase[ax] - 2.0 * g.at(j0, j1, j2)) *
             inv_h2;
    }
    const bool origin = (j0 == 0 && j1 == 0 && j2 == 0);
    const double target = origin ? std::pow(h, -d) : 0.0;
    if (!origin) worst = std::max(worst, std::abs(acc - target));
  };

  if (d == 2) {
    for (int j0 = -reach; j0 <= reach; j0 += 2)
      for (int j1 = -reach; j1 <= reach; j1 += 2) visit(j0, j1, 0);
  } else {
    for (int j0 = -reach; j0 <= reach; j0 += 2)
      for (int j1 = -reach; j1 <= reach; j1 += 2)
        for (int j2 = -reach; j2 <= reach; j2 += 2) visit(j0, j1, j2);
  }
  return worst;
}

LippmannOperator::LippmannOperator(const Potential& v, const GreenTable& g)
    : v_(&v), g_(&g) {
  if (v.domain().hash() != g.dom->hash())
    throw Error("LippmannOperator: potential and Green table domains differ");
  coeff_ = g.coeff;
  const int M = g.M;
  const int n = v.domain().resolution();
  twist_.resize(n);
  for (int i = 0; i < n; ++i) {
    const double ph = 2.0 * kPi * g.offset * i / M;
    twist_[i] = cplx(std::cos(ph), std::sin(ph));
  }
}

std::vector<cplx> LippmannOperator::convolve(const std::vector<cplx>& w) const {
  const Domain& dom = v_->domain();
  const int d = dom.dim();
  const int M = g_->M;
  const std::size_t N = dom.num_interior();
  if (w.size() != N) throw Error("LippmannOperator::convolve: size mismatch");

  std::vector<std::size_t> dims(d, static_cast<std::size_t>(M));
  std::size_t total = 1;
  for (int ax = 0; ax < d; ++ax) total *= M;
  std::vector<cplx> buf(total, cplx(0, 0));

  auto embed_index = [&](std::size_t cell) {
    const auto idx = dom.cell_of(cell);
    std::size_t f = static_cast<std::size_t>(idx[0]) * M + idx[1];
    if (d == 3) f = f * M + idx[2];
    return f;
  };

  for (std::size_t i = 0; i < N; ++i) {
    const auto idx = dom.cell_of(i);
    cplx tw = std::conj(twist_[idx[0]]) * std::conj(twist_[idx[1]]);
    if (d == 3) tw *= std::conj(twist_[idx[2]]);
    buf[embed_index(i)] = w[i] * tw;
  }
  fftnd(buf, dims, -1);
  for (std::size_t m = 0; m < total; ++m) buf[m] *= coeff_[m];
  fftnd(buf, dims, +1);

  std::vector<cplx> out(N);
  const double scale = dom.cell_volume();
  for (std::size_t i = 0; i < N; ++i) {
    const auto idx = dom.cell_of(i);
    cplx tw = twist_[idx[0]] * twist_[idx[1]];
    if (d == 3) tw *= twist_[idx[2]];
    out[i] = buf[embed_index(i)] * tw * scale;
  }
  return out;
}

std::vector<cplx> LippmannOperator::apply(const std::vector<cplx>& x) const {
  const std::size_t N = x.size();
  std::vector<cplx> vx(N);
  for (std::size_t i = 0; i < N; ++i) vx[i] = v_->value(i) * x[i];
  std::vector<cplx> conv = convolve(vx);
  std::vector<cplx> out(N);
  for (std::size_t i = 0; i < N; ++i) out[i] = x[i] - conv[i];
  return out;
}

namespace {

double max_norm(const std::vector<cplx>& a) {
  double m = 0.0;
  for (const cplx& z : a) m = std::max(m, std::abs(z));
  return m;
}

cplx inner(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  cplx s(0, 0);
  for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
  return s;
}

}  // namespace

LippmannOperator::Solution LippmannOperator::solve(const std::vector<cplx>& rhs,
                                                   double tol) const {
  const std::size_t N = rhs.size();
  Solution sol;

  // Neumann iteration x_{j+1} = rhs + K x_j while it contracts.
  std::vector<cplx> x = rhs;
  double prev_step = 0.0;
  bool neumann_ok = true;
  int it = 0;
  for (; it < 200; ++it) {
    std::vector<cplx> vx(N);
    for (std::size_t i = 0; i < N; ++i) vx[i] = v_->value(i) * x[i];
    std::vector<cplx> kx = convolve(vx);
    double step = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      const cplx nx = rhs[i] + kx[i];
      step = std::max(step, std::abs(nx - x[i]));
      x[i] = nx;
    }
    if (step <= 0.05 * tol) break;
    if (it >= 5 && prev_step > 0.0 && step >= 0.9 * prev_step) {
      neumann_ok = false;
      break;
    }
    prev_step = step;
  }

  auto residual_of = [&](const std::vector<cplx>& y) {
    std::vector<cplx> ay = apply(y);
    double r = 0.0;
    for (std::size_t i = 0; i < N; ++i) r = std::max(r, std::abs(ay[i] - rhs[i]));
    return r;
  };

  if (neumann_ok) {
    const double r = residual_of(x);
    if (r <= tol) {
      sol.x = std::move(x);
      sol.iterations = it + 1;
      sol.residual = r;
      sol.method = "neumann";
      return sol;
    }
  }

  // Bi-CGSTAB on (I - K), starting from the best Neumann iterate.
  std::vector<cplx> r(N), rhat(N), p(N, cplx(0, 0)), vv(N, cplx(0, 0));
  {
    std::vector<cplx> ax = apply(x);
    for (std::size_t i = 0; i < N; ++i) r[i] = rhs[i] - ax[i];
  }
  rhat = r;
  cplx rho_old(1, 0), alpha(1, 0), omega(1, 0);
  const double bnorm = std::max(max_norm(rhs), 1e-300);
  int kit = 0;
  for (; kit < 500; ++kit) {
    if (max_norm(r) / bnorm <= 0.1 * tol) break;
    const cplx rho = inner(rhat, r);
    if (std::abs(rho) < 1e-290) break;
    if (kit == 0) {
      p = r;
    } else {
      const cplx beta = (rho / rho_old) * (alpha / omega);
      for (std::size_t i = 0; i < N; ++i) p[i] = r[i] + beta * (p[i] - omega * vv[i]);
    }
    vv = apply(p);
    alpha = rho / inner(rhat, vv);
    std::vector<cplx> s(N);
    for (std::size_t i = 0; i < N; ++i) s[i] = r[i] - alpha * vv[i];
    if (max_norm(s) / bnorm <= 0.1 * tol) {
      for (std::size_t i = 0; i < N; ++i) x[i] += alpha * p[i];
      r = std::move(s);
      break;
    }
    std::vector<cplx> t = apply(s);
    omega = inner(t, s) / inner(t, t);
    for (std::size_t i = 0; i < N; ++i) {
      x[i] += alpha * p[i] + omega * s[i];
      r[i] = s[i] - omega * t[i];
    }
    rho_old = rho;
  }

  const double res = residual_of(x);
  sol.x = std::move(x);
  sol.iterations = it + kit + 1;
  sol.residual = res;
  sol.method = "bicgstab";
  return sol;
}

double FaddeevField::sup_mu_minus_one() const {
  double m = 0.0;
  for (const cplx& z : mu) m = std::max(m, std::abs(z - 1.0));
  return m;
}

FaddeevField lippmann_schwinger(const Potential& v, const ComplexFrequency& k,
                                const GreenTable& g, double target_residual) {
  if (norm2(g.k.re - k.re) + norm2(g.k.im - k.im) > 0.0)
    throw Error("lippmann_schwinger: Green table was built for a different k");

  const Domain& dom = v.domain();
  LippmannOperator op(v, g);
  std::vector<cplx> rhs(dom.num_interior(), cplx(1, 0));
  auto sol = op.solve(rhs, target_residual);

  constexpr double tol_ls = 1e-8;
  if (sol.residual > tol_ls) {
    std::ostringstream os;
    os << "lippmann_schwinger: no convergence at |Im k| = " << k.rho()
       << ", attained residual " << sol.residual << " (contract " << tol_ls << ")";
    throw SolverError(os.str());
  }

  FaddeevField f;
  f.k = k;
  f.dom = &dom;
  f.mu = std::move(sol.x);
  f.iterations = sol.iterations;
  f.residual = sol.residual;
  f.method = sol.method;

  // Discrete-equation check on the support of v, normalized by the stencil
  // scale: max |e^{-ikx} lap_h(e^{ikx} mu) - sigma_k mu - v mu| h^2 / max|mu|.
  const int d = dom.dim();
  const int n = dom.resolution();
  const double h = dom.spacing();
  CVec ephase;
  for (int ax = 0; ax < d; ++ax)
    ephase[ax] = std::exp(cplx(0, 1) * (cplx(k.re[ax], k.im[ax]) * h));
  double worst = 0.0, mu_max = 0.0;
  for (const cplx& z : f.mu) mu_max = std::max(mu_max, std::abs(z));
  for (std::size_t i = 0; i < dom.num_interior(); ++i) {
    if (v.value(i) == 0.0) continue;
    const auto idx = dom.cell_of(i);
    cplx acc = -g.sigma_k * f.mu[i] - v.value(i) * f.mu[i];
    for (int ax = 0; ax < d; ++ax) {
      auto up = idx, dn = idx;
      up[ax] += 1;
      dn[ax] -= 1;
      if (up[ax] >= n || dn[ax] < 0)
        throw Error("lippmann_schwinger: support touches the boundary layer");
      acc += (ephase[ax] * f.mu[dom.flat_index(up)] +
              f.mu[dom.flat_index(dn)] / ephase[ax] - 2.0 * f.mu[i]) /
             (h * h);
    }
    worst = std::max(worst, std::abs(acc));
  }
  f.pde_residual = worst * h * h / std::max(mu_max, 1e-300);
  return f;
}

std::vector<cplx> mu_on_boundary(const FaddeevField& field, const Potential& v,
                                 const GreenTable& g) {
  const Domain& dom = v.domain();
  std::vector<std::size_t> supp;
  for (std::size_t i = 0; i < dom.num_interior(); ++i)
    if (v.value(i) != 0.0) supp.push_back(i);

  std::vector<cplx> out(dom.num_boundary());
  const double volume = dom.cell_volume();
  for (std::size_t b = 0; b < dom.num_boundary(); ++b) {
    const Vec& xb = dom.face(b).position;
    cplx acc(0, 0);
    for (std::size_t i : supp)
      acc += g.between(xb, dom.interior_node(i)) * v.value(i) * field.mu[i];
    out[b] = cplx(1, 0) + acc * volume;
  }
  return out;
}

ScatteringSample amplitude_h(const Potential& v, const FaddeevField& field,
                             const ThetaPair& pair) {
  if (norm2(pair.k_re - field.k.re) + norm2(pair.im - field.k.im) > 0.0)
    throw Error("amplitude_h: field frequency does not match pair.k");
  const Domain& dom = v.domain();
  const Vec p = pair.p();
  cplx acc(0, 0);
  for (std::size_t i = 0; i < dom.num_interior(); ++i) {
    if (v.value(i) == 0.0) continue;
    const double ph = dot(p, dom.interior_node(i));
    acc += v.value(i) * field.mu[i] * cplx(std::cos(ph), std::sin(ph));
  }
  ScatteringSample s;
  s.pair = pair;
  s.h = acc * (dom.cell_volume() / std::pow(2.0 * kPi, dom.dim()));
  return s;
}

double bounded_field_threshold(const Potential& v, const Vec& p,
                               const std::vector<double>& rho_list, double c,
                               int pad_factor) {
  const Domain& dom = v.domain();
  const double pn = norm2(p);
  if (pn == 0.0) throw Error("bounded_field_threshold: p must be nonzero");
  for (double rho : rho_list) {
    // in two dimensions the variety pins |Im k| = |p|/2, so the real
    // frequency is rescaled along p instead
    ThetaPair pair = (dom.dim() == 3) ? theta_pair_3d(p, rho)
                                      : born_pair((2.0 * rho / pn) * p, 2);
    try {
      const ComplexFrequency k = pair.k();
      GreenTable g = faddeev_green(k, dom, pad_factor);
      FaddeevField f = lippmann_schwinger(v, k, g);
      double sup_mu = 0.0;
      for (const cplx& z : f.mu) sup_mu = std::max(sup_mu, std::abs(z));
      if (sup_mu <= c) return rho;
    } catch (const SolverError&) {
      // divergence: this size sits below the empirical threshold
    }
  }
  return std::numeric_limits<double>::quiet_NaN();
}

std::vector<DecayRow> asymptotic_diagnostic(const Potential& v, const Vec& p,
                                            const std::vector<double>& rho_list,
                                            int pad_factor) {
  const Domain& dom = v.domain();
  std::vector<DecayRow> rows;
  rows.reserve(rho_list.size());
  const cplx vhat = fourier_at(v, p);
  for (double rho : rho_list) {
    ThetaPair pair;
    if (dom.dim() == 3) {
      pair = theta_pair_3d(p, rho);
    } else {
      if (std::abs(rho - 0.5 * norm2(p)) > 1e-12 * std::max(1.0, rho))
        throw Error("asymptotic_diagnostic: in two dimensions the variety pins |Im k| = |p|/2");
      pair = born_pair(p, 2);
    }
    const ComplexFrequency k = pair.k();
    GreenTable g = faddeev_green(k, dom, pad_factor);
    FaddeevField f = lippmann_schwinger(v, k, g);
    ScatteringSample s = amplitude_h(v, f, pair);
    DecayRow row;
    row.rho = rho;
    row.sup_mu_minus_one = f.sup_mu_minus_one();
    row.h = s.h;
    row.vhat = vhat;
    row.h_gap = std::abs(s.h - vhat);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace dtnlab
