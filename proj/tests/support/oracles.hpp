#pragma once

// Independent oracles: these recompute expected values through routes that do
// not share code with the implementation paths they check.

#include "preview_gain/lifting.hpp"
#include "support/generators.hpp"

namespace pgtest {

/// Step-by-step propagation of the original model from state x with per-step
/// inputs and disturbances. Returns the final state and the per-step outputs
/// z_s = (Q_s^{1/2} x_s, R_s^{1/2} u_s).
struct StepSimResult {
  VectorXd x_final;
  std::vector<VectorXd> z;  // one (n+m)-vector per step
};

inline StepSimResult step_simulate(const ModelProvider& mp, long start, const VectorXd& x0,
                                   const std::vector<VectorXd>& u,
                                   const std::vector<VectorXd>& w) {
  StepSimResult out;
  VectorXd x = x0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const StepData s = mp.step(start + static_cast<long>(i));
    VectorXd z(s.n() + s.m());
    z.head(s.n()) = preview_gain::spd_sqrt(s.Q) * x;
    z.tail(s.m()) = preview_gain::spd_sqrt(s.R) * u[i];
    out.z.push_back(std::move(z));
    x = s.A * x + s.B * u[i] + w[i];
  }
  out.x_final = x;
  return out;
}

/// Rearranges per-step outputs into the lifted ordering: all Q^{1/2} x_s
/// components first (step order), then all R^{1/2} u_s components.
inline VectorXd lifted_order(const std::vector<VectorXd>& z_steps, Eigen::Index n,
                             Eigen::Index m) {
  const int d = static_cast<int>(z_steps.size());
  VectorXd z(static_cast<Eigen::Index>(d) * (n + m));
  for (int i = 0; i < d; ++i) {
    z.segment(i * n, n) = z_steps[static_cast<std::size_t>(i)].head(n);
    z.segment(d * n + i * m, m) = z_steps[static_cast<std::size_t>(i)].tail(m);
  }
  return z;
}

/// The lifted gain Riccati operator through the untransformed saddle route:
///   C'C + A'XA - L(X)' M(X)^{-1} L(X),
/// with M(X) = R_til + B_til' X B_til and L(X) = [D E]'C + B_til' X A_lift.
/// Rebuilds R_til from the raw lifted block, independently of transform_block.
inline MatrixXd lifted_riccati_saddle(const preview_gain::LiftedBlock& blk, double gamma,
                                      const MatrixXd& x) {
  const Eigen::Index md = blk.m * blk.d, nd = blk.n * blk.d;
  MatrixXd b_til(blk.n, md + nd);
  b_til.leftCols(md) = blk.B_lift;
  b_til.rightCols(nd) = blk.F_lift;
  MatrixXd r_til(md + nd, md + nd);
  r_til.topLeftCorner(md, md) = blk.R_lift + blk.D_lift.transpose() * blk.D_lift;
  r_til.topRightCorner(md, nd) = blk.D_lift.transpose() * blk.E_lift;
  r_til.bottomLeftCorner(nd, md) = r_til.topRightCorner(md, nd).transpose();
  r_til.bottomRightCorner(nd, nd) =
      blk.E_lift.transpose() * blk.E_lift -
      gamma * gamma * MatrixXd::Identity(nd, nd);

  MatrixXd de(nd, md + nd);
  de.leftCols(md) = blk.D_lift;
  de.rightCols(nd) = blk.E_lift;

  const MatrixXd m_mat = preview_gain::symmetrize(r_til + b_til.transpose() * x * b_til);
  Eigen::FullPivLU<MatrixXd> lu(m_mat);
  if (!lu.isInvertible()) {
    throw std::invalid_argument("lifted_riccati_saddle: M(X) singular");
  }
  const MatrixXd l_mat = de.transpose() * blk.C_lift + b_til.transpose() * x * blk.A_lift;
  return preview_gain::symmetrize(blk.C_lift.transpose() * blk.C_lift +
                                  blk.A_lift.transpose() * x * blk.A_lift -
                                  l_mat.transpose() * lu.solve(l_mat));
}

/// Brute-force Riemannian distance via an explicit P^{-1/2} X P^{-1/2}
/// similarity (eigen route independent of the pencil solver).
inline double riemannian_distance_bruteforce(const MatrixXd& x, const MatrixXd& p) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> es_p(preview_gain::symmetrize(p));
  const MatrixXd p_inv_sqrt = es_p.eigenvectors() *
                              es_p.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() *
                              es_p.eigenvectors().transpose();
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(
      preview_gain::symmetrize(p_inv_sqrt * x * p_inv_sqrt));
  double sum = 0.0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    const double l = std::log(es.eigenvalues()[i]);
    sum += l * l;
  }
  return std::sqrt(sum);
}

/// Stationary LQR Riccati map (the gamma -> infinity limit form).
inline MatrixXd lqr_step(const StepData& s, const MatrixXd& p) {
  const MatrixXd bpb = s.R + s.B.transpose() * p * s.B;
  const MatrixXd bpa = s.B.transpose() * p * s.A;
  return preview_gain::symmetrize(s.Q + s.A.transpose() * p * s.A -
                                  bpa.transpose() * bpb.ldlt().solve(bpa));
}

}  // namespace pgtest
