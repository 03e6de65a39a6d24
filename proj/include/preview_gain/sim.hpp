#pragma once

#include <random>

#include "preview_gain/riccati.hpp"

namespace preview_gain {

/// Feedback gains indexed by time, optionally extended periodically.
struct GainSequence {
  std::vector<MatrixXd> K;
  bool periodic = false;

  const MatrixXd& at(long t) const {
    if (t < 0) throw std::invalid_argument("GainSequence: negative time index");
    const long len = static_cast<long>(K.size());
    if (periodic) return K[static_cast<std::size_t>(t % len)];
    if (t >= len) {
      throw std::out_of_range("GainSequence: gain requested at t=" + std::to_string(t) +
                              " beyond schedule of length " + std::to_string(len));
    }
    return K[static_cast<std::size_t>(t)];
  }
};

/// A time sequence of SPD matrices, optionally periodic (used for baseline
/// P_t and approximant X_t sequences).
struct SpdSequence {
  std::vector<SpdMatrix> items;
  bool periodic = false;
  long offset = 0;  // items[0] corresponds to time `offset`

  const SpdMatrix& at(long t) const {
    long i = t - offset;
    const long len = static_cast<long>(items.size());
    if (periodic) {
      i %= len;
      if (i < 0) i += len;
      return items[static_cast<std::size_t>(i)];
    }
    if (i < 0 || i >= len) {
      throw std::out_of_range("SpdSequence: index " + std::to_string(t) + " out of range");
    }
    return items[static_cast<std::size_t>(i)];
  }
};

/// Closed-loop record over t = 0..N: states x_0..x_N (x_0 = 0), inputs
/// u_t = -K_t x_t, outputs z_t = (Q_t^{1/2} x_t, R_t^{1/2} u_t), and the
/// disturbance w_0..w_{N-1} entering as w_scale * w_t.
struct ClosedLoopTrace {
  long N = 0;
  Eigen::Index n = 0, m = 0;
  double alpha = 0.0;    // gain bound used for the running J sums
  double w_scale = 1.0;  // disturbance channel scaling inside the dynamics
  std::vector<VectorXd> x, u, z;  // size N+1
  std::vector<VectorXd> w;        // size N (as supplied, before scaling)
  std::vector<double> running_J;  // size N+1, partial sums of z'z - alpha^2 wbar'wbar
  double zz_sum = 0.0;
  double ww_scaled_sum = 0.0;
  double J_alpha = 0.0;
};

namespace detail {

/// Q^{1/2}, R^{1/2} per step; one period for periodic providers.
struct OutputSqrtCache {
  explicit OutputSqrtCache(const ModelProvider& mp, long horizon) : mp_(mp) {
    period_ = mp.period();
    const long count = period_ ? *period_ : horizon + 1;
    qs_.resize(static_cast<std::size_t>(count));
    rs_.resize(static_cast<std::size_t>(count));
    for (long t = 0; t < count; ++t) {
      const StepData s = mp.step(t);
      qs_[static_cast<std::size_t>(t)] = spd_sqrt(s.Q);
      rs_[static_cast<std::size_t>(t)] = spd_sqrt(s.R);
    }
  }
  const MatrixXd& q(long t) const { return qs_[idx(t)]; }
  const MatrixXd& r(long t) const { return rs_[idx(t)]; }

 private:
  std::size_t idx(long t) const {
    return static_cast<std::size_t>(period_ ? t % *period_ : t);
  }
  const ModelProvider& mp_;
  std::optional<long> period_;
  std::vector<MatrixXd> qs_, rs_;
};

}  // namespace detail

/// Deterministic closed-loop simulation under u_t = -K_t x_t from x_0 = 0.
inline ClosedLoopTrace simulate(const ModelProvider& mp, const GainSequence& gains,
                                const std::vector<VectorXd>& w, long N, double alpha,
                                double w_scale = 1.0) {
  if (static_cast<long>(w.size()) < N) {
    throw std::invalid_argument("simulate: disturbance sequence shorter than horizon");
  }
  const Eigen::Index n = mp.n(), m = mp.m();
  detail::OutputSqrtCache sq(mp, N);
  ClosedLoopTrace tr;
  tr.N = N;
  tr.n = n;
  tr.m = m;
  tr.alpha = alpha;
  tr.w_scale = w_scale;
  tr.x.resize(static_cast<std::size_t>(N) + 1);
  tr.u.resize(static_cast<std::size_t>(N) + 1);
  tr.z.resize(static_cast<std::size_t>(N) + 1);
  tr.w.assign(w.begin(), w.begin() + N);
  tr.running_J.resize(static_cast<std::size_t>(N) + 1);

  VectorXd x = VectorXd::Zero(n);
  double J = 0.0;
  for (long t = 0; t <= N; ++t) {
    const StepData step = mp.step(t);
    const MatrixXd& K = gains.at(t);
    if (K.rows() != m || K.cols() != n) {
      throw std::invalid_argument("simulate: gain dimension mismatch at t=" + std::to_string(t));
    }
    const VectorXd u = -K * x;
    VectorXd z(n + m);
    z.head(n) = sq.q(t) * x;
    z.tail(m) = sq.r(t) * u;
    tr.x[static_cast<std::size_t>(t)] = x;
    tr.u[static_cast<std::size_t>(t)] = u;
    tr.z[static_cast<std::size_t>(t)] = z;
    J += z.squaredNorm();
    tr.zz_sum += z.squaredNorm();
    if (t < N) {
      if (w[static_cast<std::size_t>(t)].size() != n) {
        throw std::invalid_argument("simulate: disturbance dimension mismatch at t=" +
                                    std::to_string(t));
      }
      const VectorXd wbar = w_scale * w[static_cast<std::size_t>(t)];
      J -= alpha * alpha * wbar.squaredNorm();
      tr.ww_scaled_sum += wbar.squaredNorm();
      x = step.A * x + step.B * u + wbar;
    }
    tr.running_J[static_cast<std::size_t>(t)] = J;
  }
  tr.J_alpha = J;
  return tr;
}

/// Per-step residuals of the completion-of-squares identity
///   z'z - a^2 wbar'wbar + x+'X x+ =
///   x'R_a(X)x + (u-u*)'nabla(u-u*) + (wbar-wbar*)'(X - a^2 I)(wbar-wbar*),
/// plus the partial-sum verdicts of J_a along the trace. A reporting
/// operation: bound violations are flagged, not thrown.
struct DissipationReport {
  std::vector<double> residual;    // relative residual per step
  double max_residual = 0.0;
  std::vector<double> partial_J;   // recomputed at the alpha passed in
  double max_partial_J = 0.0;
  bool all_partial_nonpositive = true;
};

inline DissipationReport dissipation_check(const ModelProvider& mp, const ClosedLoopTrace& tr,
                                           const SpdSequence& xs, double alpha) {
  DissipationReport rep;
  rep.residual.resize(static_cast<std::size_t>(tr.N));
  rep.partial_J.resize(static_cast<std::size_t>(tr.N) + 1);
  detail::OutputSqrtCache sq(mp, tr.N);
  const double a2 = alpha * alpha;
  double J = 0.0;
  for (long t = 0; t < tr.N; ++t) {
    const StepData step = mp.step(t);
    const auto& x = tr.x[static_cast<std::size_t>(t)];
    const auto& u = tr.u[static_cast<std::size_t>(t)];
    const auto& xp = tr.x[static_cast<std::size_t>(t) + 1];
    const VectorXd wbar = tr.w_scale * tr.w[static_cast<std::size_t>(t)];
    VectorXd z(tr.n + tr.m);
    z.head(tr.n) = sq.q(t) * x;
    z.tail(tr.m) = sq.r(t) * u;

    const SpdMatrix& X = xs.at(t + 1);
    const MatrixXd& Xm = X.matrix();
    const double lhs = z.squaredNorm() - a2 * wbar.squaredNorm() + xp.dot(Xm * xp);

    const MatrixXd rx = riccati_step(step, alpha, Xm);
    const MatrixXd w_mid = spd_inverse(symmetrize(
        spd_inverse(Xm) - MatrixXd::Identity(tr.n, tr.n) / a2));
    const MatrixXd nabla = symmetrize(step.R + step.B.transpose() * w_mid * step.B);
    const VectorXd u_star = -sym_solve(nabla, step.B.transpose() * w_mid * step.A) * x;
    const MatrixXd x_minus = Xm - a2 * MatrixXd::Identity(tr.n, tr.n);
    const VectorXd w_star =
        -x_minus.ldlt().solve(Xm * (step.A * x + step.B * u));
    const VectorXd du = u - u_star;
    const VectorXd dw = wbar - w_star;
    const double rhs = x.dot(rx * x) + du.dot(nabla * du) + dw.dot(x_minus * dw);

    const double scale = 1.0 + std::abs(z.squaredNorm()) + a2 * wbar.squaredNorm() +
                         std::abs(xp.dot(Xm * xp));
    rep.residual[static_cast<std::size_t>(t)] = std::abs(lhs - rhs) / scale;
    rep.max_residual = std::max(rep.max_residual, rep.residual[static_cast<std::size_t>(t)]);

    J += z.squaredNorm() - a2 * wbar.squaredNorm();
    rep.partial_J[static_cast<std::size_t>(t)] = J;
  }
  // Closing output term at t = N.
  J += tr.z[static_cast<std::size_t>(tr.N)].squaredNorm();
  rep.partial_J[static_cast<std::size_t>(tr.N)] = J;
  for (double v : rep.partial_J) {
    rep.max_partial_J = std::max(rep.max_partial_J, v);
    if (v > 0.0) rep.all_partial_nonpositive = false;
  }
  return rep;
}

/// Finite-horizon closed-loop disturbance-to-output operator
/// F: (w_t)_{t=0..N-1} -> (z_t)_{t=1..N} under u = -Kx, x_0 = 0.
class ClosedLoopOp {
 public:
  ClosedLoopOp(const ModelProvider& mp, const GainSequence& gains, long N, double w_scale)
      : N_(N), n_(mp.n()), m_(mp.m()), w_scale_(w_scale) {
    detail::OutputSqrtCache sq(mp, N);
    a_bar_.resize(static_cast<std::size_t>(N));
    c_bar_.resize(static_cast<std::size_t>(N) + 1);
    for (long t = 0; t <= N; ++t) {
      const StepData step = mp.step(t);
      const MatrixXd& K = gains.at(t);
      if (t < N) a_bar_[static_cast<std::size_t>(t)] = step.A - step.B * K;
      MatrixXd c(n_ + m_, n_);
      c.topRows(n_) = sq.q(t);
      c.bottomRows(m_) = -sq.r(t) * K;
      c_bar_[static_cast<std::size_t>(t)] = std::move(c);
    }
  }

  long horizon() const { return N_; }
  Eigen::Index input_dim() const { return N_ * n_; }
  Eigen::Index output_dim() const { return N_ * (n_ + m_); }

  VectorXd apply(const VectorXd& w) const {
    if (w.size() != input_dim()) throw std::invalid_argument("ClosedLoopOp: bad input size");
    VectorXd z(output_dim());
    VectorXd x = VectorXd::Zero(n_);
    for (long t = 0; t < N_; ++t) {
      x = a_bar_[static_cast<std::size_t>(t)] * x + w_scale_ * w.segment(t * n_, n_);
      z.segment(t * (n_ + m_), n_ + m_) = c_bar_[static_cast<std::size_t>(t) + 1] * x;
    }
    return z;
  }

  VectorXd apply_adjoint(const VectorXd& z) const {
    if (z.size() != output_dim()) throw std::invalid_argument("ClosedLoopOp: bad output size");
    VectorXd w(input_dim());
    VectorXd mu = VectorXd::Zero(n_);  // mu_{t+2} at loop entry
    for (long t = N_ - 1; t >= 0; --t) {
      VectorXd nu = c_bar_[static_cast<std::size_t>(t) + 1].transpose() *
                    z.segment(t * (n_ + m_), n_ + m_);
      if (t + 1 < N_) nu += a_bar_[static_cast<std::size_t>(t) + 1].transpose() * mu;
      mu = std::move(nu);
      w.segment(t * n_, n_) = w_scale_ * mu;
    }
    return w;
  }

  /// Dense assembly (cross-check path for N*n small).
  MatrixXd dense() const {
    MatrixXd f(output_dim(), input_dim());
    VectorXd e = VectorXd::Zero(input_dim());
    for (Eigen::Index j = 0; j < input_dim(); ++j) {
      e[j] = 1.0;
      f.col(j) = apply(e);
      e[j] = 0.0;
    }
    return f;
  }

 private:
  long N_;
  Eigen::Index n_, m_;
  double w_scale_;
  std::vector<MatrixXd> a_bar_;
  std::vector<MatrixXd> c_bar_;
};

struct GainReport {
  double empirical = 0.0;  // largest singular value found
  double certified = std::numeric_limits<double>::quiet_NaN();
  long N = 0;
  double w_scale = 1.0;
  int iterations = 0;
  bool converged = false;
};

/// Worst-case finite-horizon gain by power iteration on F'F, using forward
/// simulation and the adjoint recursion; never assembles the operator.
/// On non-convergence the best lower bound found is reported with a flag.
inline GainReport empirical_gain(const ModelProvider& mp, const GainSequence& gains, long N,
                                 double w_scale = 1.0, double tol = 1e-8, int max_iters = 500,
                                 unsigned seed = 0x5eed) {
  const ClosedLoopOp op(mp, gains, N, w_scale);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  VectorXd v(op.input_dim());
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = gauss(rng);
  v.normalize();

  GainReport rep;
  rep.N = N;
  rep.w_scale = w_scale;
  double sigma_prev = 0.0;
  for (int it = 0; it < max_iters; ++it) {
    const VectorXd z = op.apply(v);
    const VectorXd y = op.apply_adjoint(z);
    const double lam = y.norm();
    const double sigma = std::sqrt(lam);
    rep.iterations = it + 1;
    rep.empirical = std::max(rep.empirical, z.norm());  // ||Fv|| with ||v|| = 1
    if (lam == 0.0) {
      rep.converged = true;
      return rep;
    }
    if (it > 0 && std::abs(sigma - sigma_prev) <= tol * std::max(1.0, sigma)) {
      rep.empirical = sigma;
      rep.converged = true;
      return rep;
    }
    sigma_prev = sigma;
    v = y / lam;
  }
  rep.empirical = std::max(rep.empirical, sigma_prev);
  rep.converged = false;
  return rep;
}

/// Per-time Riemannian distances between two aligned SPD sequences.
struct DeltaReport {
  std::vector<double> delta;
  double max_delta = 0.0;
};

inline DeltaReport measure_delta(const std::vector<SpdMatrix>& xs,
                                 const std::vector<SpdMatrix>& ps) {
  if (xs.size() != ps.size()) throw std::invalid_argument("measure_delta: length mismatch");
  DeltaReport rep;
  rep.delta.resize(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    rep.delta[i] = riemannian_distance(xs[i], ps[i]);
    rep.max_delta = std::max(rep.max_delta, rep.delta[i]);
  }
  return rep;
}

/// Reproducible finite-energy disturbance ensemble: unit-norm sequences with
/// geometric energy taper.
inline std::vector<std::vector<VectorXd>> seeded_disturbances(int count, long N, Eigen::Index n,
                                                              unsigned seed,
                                                              double taper = 0.99) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<std::vector<VectorXd>> out(static_cast<std::size_t>(count));
  for (auto& w : out) {
    w.resize(static_cast<std::size_t>(N));
    double energy = 0.0;
    double amp = 1.0;
    for (long t = 0; t < N; ++t) {
      VectorXd v(n);
      for (Eigen::Index i = 0; i < n; ++i) v[i] = amp * gauss(rng);
      energy += v.squaredNorm();
      w[static_cast<std::size_t>(t)] = std::move(v);
      amp *= taper;
    }
    const double scale = energy > 0.0 ? 1.0 / std::sqrt(energy) : 1.0;
    for (auto& v : w) v *= scale;
  }
  return out;
}

}  // namespace preview_gain
