#pragma once

#include "preview_gain/lifting.hpp"
#include "preview_gain/model.hpp"

namespace preview_gain {

/// Gain configuration: the baseline bound gamma, the tolerated performance
/// loss beta, and the margin required of strict inequality checks.
struct GainParams {
  double gamma = 1.0;
  double beta = 0.0;
  double epsilon = 1e-9;

  void validate() const {
    if (!(gamma > 0.0)) throw std::invalid_argument("GainParams: gamma must be positive");
    if (beta < 0.0) throw std::invalid_argument("GainParams: beta must be nonnegative");
    if (!(epsilon > 0.0)) throw std::invalid_argument("GainParams: epsilon must be positive");
  }

  double alpha() const { return gamma + beta; }
};

namespace detail {

/// Block pieces of M_gamma(P) = [[R + B'PB, B'P], [PB, P - gamma^2 I]],
/// inverted via the Schur route: Cholesky of R + B'PB first, then the
/// w-block complement, which must be negative definite for the gain bound
/// to be feasible at this step.
struct GameBlocks {
  Eigen::LLT<MatrixXd> llt_u;  // factor of R + B'PB
  MatrixXd s_w;                // (P - g^2 I) - PB (R+B'PB)^{-1} B'P
  Eigen::LLT<MatrixXd> llt_w;  // factor of -s_w
};

inline GameBlocks game_blocks(const StepData& step, double gamma, const MatrixXd& p) {
  GameBlocks gb;
  const MatrixXd bpb = symmetrize(step.R + step.B.transpose() * p * step.B);
  gb.llt_u.compute(bpb);
  if (gb.llt_u.info() != Eigen::Success) {
    throw FeasibilityError("riccati_step: Schur block R + B'PB is not positive definite");
  }
  const MatrixXd pb = p * step.B;
  gb.s_w = symmetrize(p - gamma * gamma * MatrixXd::Identity(p.rows(), p.cols()) -
                      pb * gb.llt_u.solve(pb.transpose()));
  gb.llt_w.compute(-gb.s_w);
  if (gb.llt_w.info() != Eigen::Success) {
    throw FeasibilityError(
        "riccati_step: w-block Schur complement of M_gamma(P) is not negative definite "
        "(gamma too small for this step)");
  }
  return gb;
}

}  // namespace detail

/// One application of the l2-gain Riccati operator
///   R_gamma(P) = Q + A'PA - L(P)' M_gamma(P)^{-1} L(P),  L(P) = [B I]' P A.
/// Valid for symmetric PSD P with M_gamma(P) invertible.
inline MatrixXd riccati_step(const StepData& step, double gamma, const MatrixXd& p) {
  const MatrixXd ps = symmetrize(p);
  auto gb = detail::game_blocks(step, gamma, ps);
  // L = [B'PA ; PA]; solve M^{-1} L through the block factorization.
  const MatrixXd l_u = step.B.transpose() * ps * step.A;  // m x n
  const MatrixXd l_w = ps * step.A;                       // n x n
  const MatrixXd pb = ps * step.B;
  const MatrixXd m11_inv_lu = gb.llt_u.solve(l_u);
  const MatrixXd y_w = -gb.llt_w.solve(l_w - pb * m11_inv_lu);
  const MatrixXd y_u = gb.llt_u.solve(l_u - pb.transpose() * y_w);
  const MatrixXd out = step.Q + step.A.transpose() * ps * step.A -
                       (l_u.transpose() * y_u + l_w.transpose() * y_w);
  return symmetrize(out);
}

/// Equivalent form on the PD cone with P < gamma^2 I:
///   Q + A'(P^{-1} - gamma^{-2} I + B R^{-1} B')^{-1} A.
inline MatrixXd riccati_step_alt(const StepData& step, double gamma, const SpdMatrix& p,
                                 const Tolerances& tol = Tolerances{}) {
  const double g2 = gamma * gamma;
  if (!(p.eig_max() < g2 * (1.0 - tol.pd_margin_rel))) {
    throw std::invalid_argument("riccati_step_alt: requires P < gamma^2 I with margin");
  }
  const Eigen::Index n = p.dim();
  const MatrixXd mid = symmetrize(spd_inverse(p.matrix()) - MatrixXd::Identity(n, n) / g2 +
                                  step.B * sym_solve(step.R, step.B.transpose()));
  return symmetrize(step.Q + step.A.transpose() * sym_solve(mid, step.A));
}

/// Feedback gain K_alpha(X) = nabla^{-1} B' (X^{-1} - alpha^{-2} I)^{-1} A for
/// PD X < alpha^2 I (the finite-preview Woodbury form).
inline MatrixXd feedback_gain(const StepData& step, double alpha, const SpdMatrix& x,
                              const Tolerances& tol = Tolerances{}) {
  const double a2 = alpha * alpha;
  if (!(x.eig_max() < a2 * (1.0 - tol.pd_margin_rel))) {
    throw FeasibilityError("feedback_gain: X < alpha^2 I margin violated");
  }
  const Eigen::Index n = x.dim();
  const MatrixXd w = spd_inverse(
      symmetrize(spd_inverse(x.matrix()) - MatrixXd::Identity(n, n) / a2));
  const MatrixXd nabla = symmetrize(step.R + step.B.transpose() * w * step.B);
  return sym_solve(nabla, step.B.transpose() * w * step.A);
}

/// The same gain through the other algebraic route,
///   (R + B'(X + X(alpha^2 I - X)^{-1} X)B)^{-1} B'(X + X(alpha^2 I - X)^{-1} X)A.
inline MatrixXd feedback_gain_theorem1(const StepData& step, double alpha, const SpdMatrix& x,
                                       const Tolerances& tol = Tolerances{}) {
  const double a2 = alpha * alpha;
  if (!(x.eig_max() < a2 * (1.0 - tol.pd_margin_rel))) {
    throw FeasibilityError("feedback_gain: X < alpha^2 I margin violated");
  }
  const Eigen::Index n = x.dim();
  const MatrixXd gap = symmetrize(a2 * MatrixXd::Identity(n, n) - x.matrix());
  const MatrixXd w = symmetrize(x.matrix() + x.matrix() * sym_solve(gap, x.matrix()));
  const MatrixXd nabla = symmetrize(step.R + step.B.transpose() * w * step.B);
  return sym_solve(nabla, step.B.transpose() * w * step.A);
}

/// Periodic solution of the backward recursion P_t = R_gamma(P_{t+1}).
struct RiccatiSolution {
  std::vector<SpdMatrix> P;   // one period, P[t] for t in [0, N)
  double lambda_min_inf = 0;  // inf_t lambda_min(P_t)
  double margin = 0;          // measured eps in P_t - gamma^2 I <= -eps I
  double residual = 0;        // Riemannian fixed-point residual at exit
  double residual_fro = 0;    // relative Frobenius residual at exit
  int iterations = 0;

  const SpdMatrix& at(long t) const {
    return P[static_cast<std::size_t>(t % static_cast<long>(P.size()))];
  }
};

/// Fixed-point iteration of the one-period backward map, seeded from the
/// lifted terminal bound (which dominates the solution, so iterates descend
/// onto the fixed point). Convergence is geometric under the lifted-block
/// contraction, so plain iteration suffices at these sizes.
inline RiccatiSolution solve_periodic(const ModelProvider& mp, double gamma, int d,
                                      double tol_delta = 1e-10, int max_iters = 10000) {
  const auto period = mp.period();
  if (!period) throw std::invalid_argument("solve_periodic: provider must be periodic");
  const long N = *period;

  MatrixXd p = ric_upper_bound_matrix(transform_block_at(mp, 0, d, gamma));
  const auto one_period = [&](const MatrixXd& p_end) {
    MatrixXd q = p_end;
    for (long t = N - 1; t >= 0; --t) q = riccati_step(mp.step(t), gamma, q);
    return q;
  };

  RiccatiSolution sol;
  double residual = std::numeric_limits<double>::infinity();
  int it = 0;
  for (; it < max_iters; ++it) {
    MatrixXd p_next = one_period(p);
    const auto [lo, hi] = sym_eig_range(p_next);
    if (!(lo > 0.0)) {
      throw FeasibilityError("solve_periodic: iterate lost positive definiteness");
    }
    if (!(hi < gamma * gamma)) {
      throw FeasibilityError("solve_periodic: baseline gain bound infeasible at this gamma "
                             "(P reaches gamma^2 I)");
    }
    residual = riemannian_distance(p_next, p);
    sol.residual_fro = (p_next - p).norm() / std::max(p.norm(), 1e-300);
    p = std::move(p_next);
    if (residual <= tol_delta) break;
  }
  if (residual > tol_delta) {
    throw ConvergenceError("solve_periodic: no convergence within " +
                           std::to_string(max_iters) + " iterations (residual=" +
                           std::to_string(residual) + ")");
  }
  sol.iterations = it + 1;
  sol.residual = residual;

  // One backward pass over the period pinning P_t for every t.
  std::vector<MatrixXd> seq(static_cast<std::size_t>(N));
  MatrixXd q = p;  // q = P_N = P_0
  for (long t = N - 1; t >= 0; --t) {
    q = riccati_step(mp.step(t), gamma, q);
    seq[static_cast<std::size_t>(t)] = q;
  }
  sol.residual = std::max(sol.residual, riemannian_distance(seq[0], p));

  sol.lambda_min_inf = std::numeric_limits<double>::infinity();
  sol.margin = std::numeric_limits<double>::infinity();
  sol.P.reserve(static_cast<std::size_t>(N));
  for (long t = 0; t < N; ++t) {
    SpdMatrix pt(seq[static_cast<std::size_t>(t)]);
    sol.lambda_min_inf = std::min(sol.lambda_min_inf, pt.eig_min());
    sol.margin = std::min(sol.margin, gamma * gamma - pt.eig_max());
    sol.P.push_back(std::move(pt));
  }
  if (!(sol.margin > 0.0)) {
    throw FeasibilityError("solve_periodic: baseline gain bound infeasible at this gamma "
                           "(margin " + std::to_string(sol.margin) + " <= 0)");
  }
  return sol;
}

}  // namespace preview_gain
