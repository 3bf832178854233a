#pragma once

#include <Eigen/Dense>

#include "dtnlab/dtn.hpp"
#include "dtnlab/faddeev.hpp"

namespace dtnlab {

// Complex kernel over boundary faces with quadrature-weight pairing:
// (T f)(x_i) = sum_j mat(i,j) f(y_j) w_j.
struct BoundaryKernel {
  const Domain* dom = nullptr;
  Eigen::MatrixXcd mat;
  std::vector<double> row_l1;  // weighted row sums, solvability diagnostic

  void record_rows();
};

// Resolvent-type background kernel R1(x,y,k) on boundary x for boundary
// sources y: R1 = G + G*(v1 R1). With v1 = 0 it is G(x-y,k) itself.
// `sources` selects the boundary columns to build (empty = all).
BoundaryKernel background_r1(const Potential& v1, const ComplexFrequency& k,
                             const GreenTable& g,
                             const std::vector<std::size_t>& sources = {});

// A(x,y,k) = int R1(x,z,k) dPhi(z,y) dz as a weighted matrix product.
BoundaryKernel kernel_A(const BoundaryKernel& r1, const Eigen::MatrixXd& dtn_diff,
                        const Domain& dom);

struct Psi2Solution {
  std::vector<cplx> values;  // psi2 on boundary faces
  double cond = 0.0;         // condition estimate of I - A W
  double residual = 0.0;
};

// Solve psi2 = psi1 + A W psi2 on the boundary (dense).
Psi2Solution solve_psi2(const BoundaryKernel& A, const std::vector<cplx>& psi1_trace);

// h2 - h1 = (2 pi)^-d intint psi1(x,-l) dPhi(x,y) psi2(y,k) dy dx.
cplx h_from_dtn(const ThetaPair& pair, const Eigen::MatrixXd& dtn_diff,
                const std::vector<cplx>& psi1_at_minus_l,
                const std::vector<cplx>& psi2_at_k, const Domain& dom);

// Plane-wave trace exp(i q . x) at the face midpoints.
std::vector<cplx> plane_wave_trace(const ComplexFrequency& q, const Domain& dom);

// Full zero-background reduction for one pair: from dPhi = K(v2)-K(0) to the
// amplitude, using psi1 = exp(ikx), R1 = G.
struct ReducedAmplitude {
  cplx h;
  double cond = 0.0;
  double solve_residual = 0.0;
};
ReducedAmplitude reduce_zero_background(const ThetaPair& pair,
                                        const Eigen::MatrixXd& dtn_diff,
                                        const Domain& dom, int pad_factor = 0);

}  // namespace dtnlab
