#pragma once

#include <algorithm>
#include <map>
#include <memory>
#include <mutex>
#include <optional>

#include "preview_gain/model.hpp"

namespace preview_gain {

/// One d-step lifted block of the model, based at time `start`. The lifted
/// dynamics and output are
///   x_next = A_lift x + B_lift u + F_lift w,
///   z      = [C_lift x + D_lift u + E_lift w ; R_lift^{1/2} u],
/// where u stacks d control inputs, w stacks d disturbances, and the first
/// nd components of z stack the Q^{1/2} x_s terms in step order followed by
/// the md components R_s^{1/2} u_s.
struct LiftedBlock {
  MatrixXd A_lift;       // n x n   (equals the d-step transition matrix)
  MatrixXd B_lift;       // n x md
  MatrixXd F_lift;       // n x nd
  MatrixXd C_lift;       // nd x n
  MatrixXd D_lift;       // nd x md
  MatrixXd E_lift;       // nd x nd
  MatrixXd R_lift;       // md x md block diagonal
  MatrixXd R_lift_sqrt;  // md x md block diagonal
  long start = 0;
  int d = 1;
  Eigen::Index n = 0, m = 0;
};

/// Assembles the lifted block covering steps [start, start + d). The block
/// unit-lower-triangular structure of the lifted chain is applied by forward
/// substitution; no n(d+1) x n(d+1) matrix is ever formed.
inline LiftedBlock lift_block_at(const ModelProvider& mp, long start, int d) {
  if (d < 1) throw std::invalid_argument("lift_block: requires d >= 1");
  const Eigen::Index n = mp.n(), m = mp.m();
  LiftedBlock blk;
  blk.start = start;
  blk.d = d;
  blk.n = n;
  blk.m = m;

  std::vector<StepData> steps(static_cast<std::size_t>(d));
  std::vector<MatrixXd> q_sqrt(static_cast<std::size_t>(d));
  for (int i = 0; i < d; ++i) {
    steps[i] = mp.step(start + i);
    q_sqrt[i] = spd_sqrt(steps[i].Q);
  }

  blk.B_lift.resize(n, m * d);
  blk.F_lift.resize(n, n * d);
  blk.C_lift.resize(n * d, n);
  blk.D_lift = MatrixXd::Zero(n * d, m * d);
  blk.E_lift = MatrixXd::Zero(n * d, n * d);
  blk.R_lift = MatrixXd::Zero(m * d, m * d);
  blk.R_lift_sqrt = MatrixXd::Zero(m * d, m * d);

  // Phi_{i,0} forward products for C_lift and A_lift.
  MatrixXd phi = MatrixXd::Identity(n, n);
  for (int i = 0; i < d; ++i) {
    blk.C_lift.block(i * n, 0, n, n) = q_sqrt[i] * phi;
    phi = steps[i].A * phi;
  }
  blk.A_lift = phi;

  // Tail products Phi_{d,j+1} for B_lift and F_lift.
  MatrixXd tail = MatrixXd::Identity(n, n);
  for (int j = d - 1; j >= 0; --j) {
    blk.F_lift.block(0, j * n, n, n) = tail;
    blk.B_lift.block(0, j * m, n, m) = tail * steps[j].B;
    tail = tail * steps[j].A;
  }

  // Interior products Phi_{i,j+1} for the strictly lower rows of D/E.
  std::vector<MatrixXd> prods;
  prods.reserve(static_cast<std::size_t>(d));
  for (int i = 1; i < d; ++i) {
    for (auto& p : prods) p = steps[i - 1].A * p;
    prods.push_back(MatrixXd::Identity(n, n));
    for (int j = 0; j < i; ++j) {
      const MatrixXd e_ij = q_sqrt[i] * prods[j];
      blk.E_lift.block(i * n, j * n, n, n) = e_ij;
      blk.D_lift.block(i * n, j * m, n, m) = e_ij * steps[j].B;
    }
  }

  for (int i = 0; i < d; ++i) {
    blk.R_lift.block(i * m, i * m, m, m) = steps[i].R;
    blk.R_lift_sqrt.block(i * m, i * m, m, m) = spd_sqrt(steps[i].R);
  }
  return blk;
}

/// Lifted block k of base time t (covers steps [t + d*k, t + d*(k+1))).
inline LiftedBlock lift_block(const ModelProvider& mp, long t, long k, int d) {
  if (t < 0 || k < 0) throw std::invalid_argument("lift_block: negative index");
  return lift_block_at(mp, t + static_cast<long>(d) * k, d);
}

/// One lifted update: returns (x_next, z) for stacked inputs u (md) and w (nd).
inline std::pair<VectorXd, VectorXd> lifted_apply(const LiftedBlock& blk, const VectorXd& x,
                                                  const VectorXd& u, const VectorXd& w) {
  if (x.size() != blk.n || u.size() != blk.m * blk.d || w.size() != blk.n * blk.d) {
    throw std::invalid_argument("lifted_apply: dimension mismatch");
  }
  VectorXd x_next = blk.A_lift * x + blk.B_lift * u + blk.F_lift * w;
  VectorXd z(blk.n * blk.d + blk.m * blk.d);
  z.head(blk.n * blk.d) = blk.C_lift * x + blk.D_lift * u + blk.E_lift * w;
  z.tail(blk.m * blk.d) = blk.R_lift_sqrt * u;
  return {std::move(x_next), std::move(z)};
}

/// Gamma-transformed lifted data. R_til is symmetric indefinite; its inverse
/// absorbs the direct feedthrough of the lifted output so the lifted Riccati
/// operator takes the standard form in (Q_til, A_til, brb).
struct TransformedBlock {
  MatrixXd B_til;  // n x (m+n)d, [B_lift F_lift]
  MatrixXd R_til;  // (m+n)d x (m+n)d; empty when built slim
  MatrixXd Q_til;  // n x n symmetric
  MatrixXd A_til;  // n x n, non-singular whenever R_til is
  MatrixXd brb;    // n x n, B_til R_til^{-1} B_til'
  double gamma = 0.0;
  long start = 0;
  int d = 1;
  Eigen::Index n = 0, m = 0;
  double r_sv_min = 0.0;  // singular value extremes of R_til
  double r_sv_max = 0.0;
};

inline TransformedBlock transform_block(const LiftedBlock& blk, double gamma,
                                        const Tolerances& tol = Tolerances{}) {
  if (!(gamma > 0.0)) throw std::invalid_argument("transform_block: gamma must be positive");
  const Eigen::Index n = blk.n, m = blk.m;
  const Eigen::Index md = m * blk.d, nd = n * blk.d;
  TransformedBlock tb;
  tb.gamma = gamma;
  tb.start = blk.start;
  tb.d = blk.d;
  tb.n = n;
  tb.m = m;

  tb.B_til.resize(n, md + nd);
  tb.B_til.leftCols(md) = blk.B_lift;
  tb.B_til.rightCols(nd) = blk.F_lift;

  tb.R_til.resize(md + nd, md + nd);
  tb.R_til.topLeftCorner(md, md) = blk.R_lift + blk.D_lift.transpose() * blk.D_lift;
  tb.R_til.topRightCorner(md, nd) = blk.D_lift.transpose() * blk.E_lift;
  tb.R_til.bottomLeftCorner(nd, md) = tb.R_til.topRightCorner(md, nd).transpose();
  tb.R_til.bottomRightCorner(nd, nd) =
      blk.E_lift.transpose() * blk.E_lift - gamma * gamma * MatrixXd::Identity(nd, nd);
  tb.R_til = symmetrize(tb.R_til);

  Eigen::SelfAdjointEigenSolver<MatrixXd> es(tb.R_til);
  if (es.info() != Eigen::Success) throw std::runtime_error("transform_block: eigen solve failed");
  const VectorXd abs_ev = es.eigenvalues().cwiseAbs();
  tb.r_sv_min = abs_ev.minCoeff();
  tb.r_sv_max = abs_ev.maxCoeff();
  if (!(tb.r_sv_min > tol.rcond_min * tb.r_sv_max)) {
    throw FeasibilityError("transform_block: gamma on the boundary of feasibility for this block "
                           "(R_til singular) at start=" + std::to_string(blk.start));
  }
  const auto r_inv_apply = [&](const MatrixXd& rhs) -> MatrixXd {
    return es.eigenvectors() *
           (es.eigenvalues().cwiseInverse().asDiagonal() * (es.eigenvectors().transpose() * rhs));
  };

  MatrixXd de(nd, md + nd);
  de.leftCols(md) = blk.D_lift;
  de.rightCols(nd) = blk.E_lift;
  const MatrixXd de_t_c = de.transpose() * blk.C_lift;       // (m+n)d x n
  const MatrixXd r_inv_de_t_c = r_inv_apply(de_t_c);

  tb.Q_til = symmetrize(blk.C_lift.transpose() * blk.C_lift -
                        de_t_c.transpose() * r_inv_de_t_c);
  tb.A_til = blk.A_lift - tb.B_til * r_inv_de_t_c;
  tb.brb = symmetrize(tb.B_til * r_inv_apply(tb.B_til.transpose()));

  // Non-singularity of A_til follows from non-singularity of R_til; verify.
  Eigen::JacobiSVD<MatrixXd> svd(tb.A_til);
  const double rc = svd.singularValues().minCoeff() /
                    std::max(svd.singularValues().maxCoeff(), 1e-300);
  if (rc < tol.rcond_min) {
    throw std::runtime_error("transform_block: A_til numerically singular at start=" +
                             std::to_string(blk.start) + " (rcond=" + std::to_string(rc) + ")");
  }
  return tb;
}

inline TransformedBlock transform_block_at(const ModelProvider& mp, long start, int d,
                                           double gamma) {
  return transform_block(lift_block_at(mp, start, d), gamma);
}

/// Q_til + A_til' (brb)^{-1} A_til. Strictly dominates the lifted Riccati
/// image of every PD argument; also the terminal-matrix formula.
inline MatrixXd ric_upper_bound_matrix(const TransformedBlock& tb) {
  return symmetrize(tb.Q_til + tb.A_til.transpose() * sym_solve(tb.brb, tb.A_til));
}

/// Lifted gain Riccati operator on the PD cone, in the square-root form
///   Q_til + A' X^{1/2} (I + X^{1/2} brb X^{1/2})^{-1} X^{1/2} A.
inline SpdMatrix lifted_riccati(const TransformedBlock& tb, const SpdMatrix& x) {
  if (x.dim() != tb.n) throw std::invalid_argument("lifted_riccati: dimension mismatch");
  const MatrixXd xs = spd_sqrt(x.matrix());
  const MatrixXd s = symmetrize(MatrixXd::Identity(tb.n, tb.n) + xs * tb.brb * xs);
  Eigen::LLT<MatrixXd> llt(s);
  if (llt.info() != Eigen::Success) {
    throw FeasibilityError("lifted_riccati: I + X^{1/2} brb X^{1/2} not positive definite "
                           "(Part 2 violated) at start=" + std::to_string(tb.start));
  }
  const MatrixXd xa = xs * tb.A_til;
  return SpdMatrix(symmetrize(tb.Q_til + xa.transpose() * llt.solve(xa)));
}

/// Contraction constants of one lifted block (requires the Part-2 conditions
/// on this block): rho = zeta / (zeta + eps) < 1 bounds the Riemannian
/// contraction rate, and omega = eps / zeta.
struct ContractionStats {
  double zeta = 0.0;
  double eps = 0.0;
  double rho = 1.0;
  double omega = 0.0;
};

inline ContractionStats contraction_stats(const TransformedBlock& tb,
                                          const Tolerances& tol = Tolerances{}) {
  const auto [q_lo, q_hi] = sym_eig_range(tb.Q_til);
  if (!(q_lo > tol.pd_margin_rel * std::abs(q_hi))) {
    throw FeasibilityError("contraction_stats: Q_til not positive definite at start=" +
                           std::to_string(tb.start));
  }
  const auto [g_lo, g_hi] = sym_eig_range(tb.brb);
  if (!(g_lo > tol.pd_margin_rel * std::abs(g_hi))) {
    throw FeasibilityError("contraction_stats: B_til R_til^{-1} B_til' not positive definite "
                           "at start=" + std::to_string(tb.start));
  }
  Eigen::PartialPivLU<MatrixXd> lu(tb.A_til);
  const MatrixXd y = lu.solve(tb.brb);
  const MatrixXd g2 = symmetrize(lu.solve(y.transpose()));  // A^{-1} brb A^{-T}
  ContractionStats cs;
  cs.zeta = 1.0 / lambda_min(tb.Q_til + tb.Q_til * g2 * tb.Q_til);
  cs.eps = 1.0 / lambda_max(ric_upper_bound_matrix(tb));
  cs.rho = cs.zeta / (cs.zeta + cs.eps);
  cs.omega = cs.eps / cs.zeta;
  return cs;
}

/// Lifted deadbeat gains (diagnostic): u = -Kx x - Kw w annihilates the
/// lifted state in one block step.
struct DeadbeatGains {
  MatrixXd Kx;  // md x n
  MatrixXd Kw;  // md x nd
};

inline DeadbeatGains deadbeat_gain(const LiftedBlock& blk) {
  const MatrixXd gram = symmetrize(blk.B_lift * blk.B_lift.transpose());
  Eigen::LLT<MatrixXd> llt(gram);
  if (llt.info() != Eigen::Success) {
    throw FeasibilityError("deadbeat_gain: B_lift B_lift' singular (Assumption 2 violated) "
                           "at start=" + std::to_string(blk.start));
  }
  DeadbeatGains g;
  g.Kx = blk.B_lift.transpose() * llt.solve(blk.A_lift);
  g.Kw = blk.B_lift.transpose() * llt.solve(blk.F_lift);
  return g;
}

/// Extremes of the Theorem-style Part-2 conditions over a window:
/// 2a) singular values of R_til, 2b) eigenvalues of B_til R_til^{-1} B_til',
/// 2c) eigenvalues of Q_til.
struct Part2Report {
  double r_sv_min = 0.0, r_sv_max = 0.0;
  double brb_min = 0.0, brb_max = 0.0;
  double q_min = 0.0, q_max = 0.0;
  bool pass = false;
  std::vector<std::string> reasons;
};

/// Window-scan results that do not depend on beta.
struct CertificateExtremes {
  double kappa_lo = 0.0;   // inf lambda_min(Q_til)
  double ratio_sup = 0.0;  // sup lambda_max(ub) / lambda_min(Q_til)
  double rho_up = 1.0;     // sup 1/(1 + omega_t)
  Part2Report part2;
  long window_begin = 0, window_end = 0;
  bool window_exact = false;
  int d = 1;
  double gamma = 0.0;
};

inline CertificateExtremes scan_window(const ModelProvider& mp, int d, double gamma,
                                       std::optional<std::pair<long, long>> window = std::nullopt,
                                       const Tolerances& tol = Tolerances{}) {
  CertificateExtremes ex;
  ex.d = d;
  ex.gamma = gamma;
  if (window) {
    ex.window_begin = window->first;
    ex.window_end = window->second;
    if (auto N = mp.period()) ex.window_exact = (ex.window_end - ex.window_begin) >= *N;
  } else if (auto N = mp.period()) {
    ex.window_begin = 0;
    ex.window_end = *N;
    ex.window_exact = true;
  } else {
    throw std::invalid_argument("scan_window: non-periodic provider requires a window");
  }
  const long count = ex.window_end - ex.window_begin;
  if (count <= 0) throw std::invalid_argument("scan_window: empty window");

  struct PerT {
    double q_lo, q_hi, brb_lo, brb_hi, r_lo, r_hi, ub_hi, zeta_den;
    std::string error;
  };
  std::vector<PerT> rows(static_cast<std::size_t>(count));
  parallel_for(static_cast<std::size_t>(count), [&](std::size_t i) {
    PerT& row = rows[i];
    const long t = ex.window_begin + static_cast<long>(i);
    try {
      const TransformedBlock tb = transform_block_at(mp, t, d, gamma);
      std::tie(row.q_lo, row.q_hi) = sym_eig_range(tb.Q_til);
      std::tie(row.brb_lo, row.brb_hi) = sym_eig_range(tb.brb);
      row.r_lo = tb.r_sv_min;
      row.r_hi = tb.r_sv_max;
      row.ub_hi = lambda_max(ric_upper_bound_matrix(tb));
      Eigen::PartialPivLU<MatrixXd> lu(tb.A_til);
      const MatrixXd y = lu.solve(tb.brb);
      const MatrixXd g2 = symmetrize(lu.solve(y.transpose()));
      row.zeta_den = lambda_min(tb.Q_til + tb.Q_til * g2 * tb.Q_til);
    } catch (const std::exception& e) {
      row.error = e.what();
    }
  });

  ex.kappa_lo = std::numeric_limits<double>::infinity();
  ex.ratio_sup = 0.0;
  ex.rho_up = 0.0;
  auto& p2 = ex.part2;
  p2.r_sv_min = p2.brb_min = p2.q_min = std::numeric_limits<double>::infinity();
  p2.r_sv_max = p2.brb_max = p2.q_max = 0.0;
  p2.pass = true;
  for (long i = 0; i < count; ++i) {
    const PerT& row = rows[static_cast<std::size_t>(i)];
    const long t = ex.window_begin + i;
    if (!row.error.empty()) {
      p2.pass = false;
      p2.reasons.push_back("t=" + std::to_string(t) + ": " + row.error);
      continue;
    }
    ex.kappa_lo = std::min(ex.kappa_lo, row.q_lo);
    p2.q_min = std::min(p2.q_min, row.q_lo);
    p2.q_max = std::max(p2.q_max, row.q_hi);
    p2.brb_min = std::min(p2.brb_min, row.brb_lo);
    p2.brb_max = std::max(p2.brb_max, row.brb_hi);
    p2.r_sv_min = std::min(p2.r_sv_min, row.r_lo);
    p2.r_sv_max = std::max(p2.r_sv_max, row.r_hi);
    if (row.q_lo > 0.0) {
      ex.ratio_sup = std::max(ex.ratio_sup, row.ub_hi / row.q_lo);
      const double omega_t = row.zeta_den / row.ub_hi;
      ex.rho_up = std::max(ex.rho_up, 1.0 / (1.0 + omega_t));
    } else {
      p2.pass = false;
      p2.reasons.push_back("t=" + std::to_string(t) + ": Q_til not positive definite");
    }
  }
  if (p2.pass) {
    if (!(p2.r_sv_min > tol.pd_margin_rel * p2.r_sv_max)) {
      p2.pass = false;
      p2.reasons.push_back("condition 2a: R_til singular values not uniformly bounded away from 0");
    }
    if (!(p2.brb_min > tol.pd_margin_rel * std::abs(p2.brb_max))) {
      p2.pass = false;
      p2.reasons.push_back("condition 2b: B_til R_til^{-1} B_til' not uniformly positive definite");
    }
    if (!(p2.q_min > tol.pd_margin_rel * std::abs(p2.q_max))) {
      p2.pass = false;
      p2.reasons.push_back("condition 2c: Q_til not uniformly positive definite");
    }
  }
  return ex;
}

/// Sufficient lifted-preview count: log(log1p(alpha_lo)/delta_up) / log(rho_up).
/// Natural logarithms throughout. May be <= 0 (any T >= 1 then suffices).
inline double preview_bound_T(double alpha_lo, double delta_up, double rho_up) {
  if (!(rho_up > 0.0) || !(rho_up < 1.0)) {
    return std::numeric_limits<double>::infinity();
  }
  const double inner = std::log1p(alpha_lo) / delta_up;
  return std::log(inner) / std::log(rho_up);
}

/// The computed constants of the preview-length bound plus the hypothesis
/// verdicts used to certify the finite-preview policy.
struct PreviewCertificate {
  double kappa_lo = 0.0;
  double delta_up = 0.0;
  double rho_up = 1.0;
  double eta = 0.0;       // gamma^{-2} - (gamma+beta)^{-2}
  double alpha_lo = 0.0;  // eta * kappa_lo
  double T_bar = std::numeric_limits<double>::infinity();
  int T_chosen = 0;        // smallest integer strictly exceeding T_bar (>= 1)
  long preview_steps = 0;  // d * (max(1, ceil(T_bar)) + 1)
  int d = 1;
  double gamma = 0.0;
  double beta = 0.0;
  Part2Report part2;
  long window_begin = 0, window_end = 0;
  bool window_exact = false;
  bool feasible = false;
  std::vector<std::string> reasons;

  /// Contraction-telescoped distance bound rho_up^T * delta_up.
  double delta_bound(int T) const { return std::pow(rho_up, T) * delta_up; }
};

inline PreviewCertificate certificate_from_extremes(const CertificateExtremes& ex,
                                                    Eigen::Index state_dim, double beta) {
  PreviewCertificate c;
  c.d = ex.d;
  c.gamma = ex.gamma;
  c.beta = beta;
  c.part2 = ex.part2;
  c.window_begin = ex.window_begin;
  c.window_end = ex.window_end;
  c.window_exact = ex.window_exact;
  c.kappa_lo = ex.kappa_lo;
  c.rho_up = ex.rho_up;
  c.delta_up = ex.ratio_sup > 0.0
                   ? std::sqrt(static_cast<double>(state_dim)) * std::log(ex.ratio_sup)
                   : 0.0;
  c.feasible = ex.part2.pass;
  c.reasons = ex.part2.reasons;
  if (!(beta > 0.0)) {
    c.feasible = false;
    c.reasons.push_back("beta must be positive for a finite preview bound");
  }
  if (!(c.kappa_lo > 0.0)) {
    c.feasible = false;
    c.reasons.push_back("kappa_lo <= 0");
  }
  if (!(c.rho_up < 1.0)) {
    c.feasible = false;
    c.reasons.push_back("rho_up >= 1");
  }
  const double g = ex.gamma;
  c.eta = 1.0 / (g * g) - 1.0 / ((g + beta) * (g + beta));
  c.alpha_lo = c.eta * std::max(c.kappa_lo, 0.0);
  c.T_bar = preview_bound_T(c.alpha_lo, c.delta_up, c.rho_up);
  if (std::isnan(c.T_bar) || (std::isinf(c.T_bar) && c.T_bar > 0.0)) {
    c.feasible = false;
    c.reasons.push_back("preview bound T_bar is not finite");
  } else if (c.T_bar > 1e6) {
    c.feasible = false;
    c.reasons.push_back("preview bound T_bar exceeds 1e6");
  } else {
    c.T_chosen = static_cast<int>(std::max(1.0, std::floor(c.T_bar) + 1.0));
    const double tceil = std::max(1.0, std::ceil(c.T_bar));
    c.preview_steps = static_cast<long>(ex.d) * (static_cast<long>(tceil) + 1);
  }
  return c;
}

/// Computes the full certificate over the window (one period when periodic).
inline PreviewCertificate certificate(const ModelProvider& mp, int d, double gamma, double beta,
                                      std::optional<std::pair<long, long>> window = std::nullopt,
                                      const Tolerances& tol = Tolerances{}) {
  return certificate_from_extremes(scan_window(mp, d, gamma, window, tol), mp.n(), beta);
}

/// Beta sweep sharing one window scan (the extremes do not depend on beta).
inline std::vector<PreviewCertificate> certificate_sweep_beta(
    const ModelProvider& mp, int d, double gamma, const std::vector<double>& betas,
    std::optional<std::pair<long, long>> window = std::nullopt,
    const Tolerances& tol = Tolerances{}) {
  const CertificateExtremes ex = scan_window(mp, d, gamma, window, tol);
  std::vector<PreviewCertificate> out;
  out.reserve(betas.size());
  for (double beta : betas) out.push_back(certificate_from_extremes(ex, mp.n(), beta));
  return out;
}

/// Memoizes transformed blocks keyed by their starting time. For periodic
/// providers the key wraps modulo the period, so scans and schedules touch
/// each distinct block once. Thread-safe; duplicate concurrent builds of the
/// same key produce identical values.
class BlockCache {
 public:
  BlockCache(const ModelProvider& mp, int d, double gamma, bool keep_full = false)
      : mp_(mp), d_(d), gamma_(gamma), keep_full_(keep_full), period_(mp.period()) {}

  std::shared_ptr<const TransformedBlock> at(long start) const {
    const long k = key(start);
    {
      std::lock_guard lock(mu_);
      auto it = memo_.find(k);
      if (it != memo_.end()) return it->second;
    }
    auto tb = std::make_shared<TransformedBlock>(transform_block_at(mp_, k, d_, gamma_));
    if (!keep_full_) tb->R_til.resize(0, 0);
    std::lock_guard lock(mu_);
    auto [it, inserted] = memo_.emplace(k, std::move(tb));
    return it->second;
  }

  void prewarm(std::vector<long> starts) const {
    for (auto& s : starts) s = key(s);
    std::sort(starts.begin(), starts.end());
    starts.erase(std::unique(starts.begin(), starts.end()), starts.end());
    parallel_for(starts.size(), [&](std::size_t i) { (void)at(starts[i]); });
  }

  const ModelProvider& provider() const { return mp_; }
  int d() const { return d_; }
  double gamma() const { return gamma_; }

 private:
  long key(long start) const { return period_ ? start % *period_ : start; }

  const ModelProvider& mp_;
  int d_;
  double gamma_;
  bool keep_full_;
  std::optional<long> period_;
  mutable std::mutex mu_;
  mutable std::map<long, std::shared_ptr<const TransformedBlock>> memo_;
};

}  // namespace preview_gain
