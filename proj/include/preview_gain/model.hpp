#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <sstream>
#include <utility>
#include <vector>

#ifndef M_PI
#define M_PI 3.14159265358979323846
#endif

#include "preview_gain/spd.hpp"

namespace preview_gain {

/// One step of time-varying model data (A_t, B_t, Q_t, R_t).
struct StepData {
  MatrixXd A;  // n x n, invertible
  MatrixXd B;  // n x m
  MatrixXd Q;  // n x n, symmetric PSD
  MatrixXd R;  // m x m, symmetric PD

  Eigen::Index n() const { return A.rows(); }
  Eigen::Index m() const { return B.cols(); }

  /// Checks dimensions, symmetry, definiteness, and invertibility of A
  /// (reciprocal condition number against tol.rcond_min).
  void validate(const Tolerances& tol = Tolerances{}) const {
    const Eigen::Index nn = A.rows(), mm = B.cols();
    if (A.cols() != nn || B.rows() != nn || Q.rows() != nn || Q.cols() != nn ||
        R.rows() != mm || R.cols() != mm) {
      throw std::invalid_argument("StepData: inconsistent dimensions");
    }
    Eigen::JacobiSVD<MatrixXd> svd(A);
    const double smax = svd.singularValues().maxCoeff();
    const double smin = svd.singularValues().minCoeff();
    if (!(smax > 0.0) || smin / smax < tol.rcond_min) {
      std::ostringstream os;
      os << "StepData: A is numerically singular (rcond=" << (smax > 0 ? smin / smax : 0.0) << ")";
      throw std::invalid_argument(os.str());
    }
    SpdMatrix q(Q, SpdMatrix::Cone::SemiPositive, tol);
    SpdMatrix r(R, SpdMatrix::Cone::Positive, tol);
    (void)q;
    (void)r;
  }
};

/// Supplies model data indexed by t in N_0. Explicit sequences are finite,
/// periodic sequences repeat with period N, and generator providers wrap a
/// deterministic, reentrant callback.
class ModelProvider {
 public:
  enum class Kind { Explicit, Periodic, Generator };

  static ModelProvider explicit_sequence(std::vector<StepData> steps,
                                         const Tolerances& tol = Tolerances{}) {
    return ModelProvider(Kind::Explicit, std::move(steps), nullptr, tol);
  }

  static ModelProvider periodic(std::vector<StepData> steps,
                                const Tolerances& tol = Tolerances{}) {
    return ModelProvider(Kind::Periodic, std::move(steps), nullptr, tol);
  }

  static ModelProvider generator(Eigen::Index n, Eigen::Index m,
                                 std::function<StepData(long)> fn) {
    ModelProvider mp;
    mp.kind_ = Kind::Generator;
    mp.n_ = n;
    mp.m_ = m;
    mp.fn_ = std::move(fn);
    return mp;
  }

  Kind kind() const { return kind_; }
  Eigen::Index n() const { return n_; }
  Eigen::Index m() const { return m_; }

  std::optional<long> period() const {
    if (kind_ == Kind::Periodic) return static_cast<long>(steps_.size());
    return std::nullopt;
  }

  /// Number of stored steps (explicit length, or one period).
  long stored_steps() const { return static_cast<long>(steps_.size()); }

  StepData step(long t) const {
    if (t < 0) throw std::invalid_argument("ModelProvider::step: negative time index");
    switch (kind_) {
      case Kind::Explicit:
        if (t >= stored_steps()) {
          std::ostringstream os;
          os << "ModelProvider::step: preview exhausted at t=" << t
             << " (explicit sequence has " << stored_steps() << " steps)";
          throw std::out_of_range(os.str());
        }
        return steps_[static_cast<std::size_t>(t)];
      case Kind::Periodic:
        return steps_[static_cast<std::size_t>(t % stored_steps())];
      case Kind::Generator: {
        StepData s = fn_(t);
        if (s.n() != n_ || s.m() != m_) {
          throw std::invalid_argument("ModelProvider::step: generator returned wrong dimensions");
        }
        return s;
      }
    }
    throw std::logic_error("ModelProvider::step: unreachable");
  }

 private:
  ModelProvider() = default;

  ModelProvider(Kind kind, std::vector<StepData> steps, std::function<StepData(long)> fn,
                const Tolerances& tol)
      : kind_(kind), steps_(std::move(steps)), fn_(std::move(fn)) {
    if (steps_.empty()) throw std::invalid_argument("ModelProvider: empty step sequence");
    n_ = steps_.front().n();
    m_ = steps_.front().m();
    for (std::size_t i = 0; i < steps_.size(); ++i) {
      if (steps_[i].n() != n_ || steps_[i].m() != m_) {
        std::ostringstream os;
        os << "ModelProvider: step " << i << " has mismatched dimensions";
        throw std::invalid_argument(os.str());
      }
      try {
        steps_[i].validate(tol);
      } catch (const std::invalid_argument& e) {
        std::ostringstream os;
        os << "ModelProvider: step " << i << ": " << e.what();
        throw std::invalid_argument(os.str());
      }
    }
  }

  Kind kind_ = Kind::Explicit;
  Eigen::Index n_ = 0, m_ = 0;
  std::vector<StepData> steps_;
  std::function<StepData(long)> fn_;
};

/// State-transition matrix Phi_{s,t} = A_{s-1} * ... * A_t, with Phi_{t,t} = I.
inline MatrixXd transition(const ModelProvider& mp, long t, long s) {
  if (s < t) throw std::invalid_argument("transition: requires s >= t");
  MatrixXd phi = MatrixXd::Identity(mp.n(), mp.n());
  for (long r = t; r < s; ++r) phi = mp.step(r).A * phi;
  return phi;
}

/// d-step observability and controllability Gramians at base time t:
///   obs = sum Phi'_{s,t} Q_s Phi_{s,t},  ctr = sum Phi_{s,t} B_s B_s' Phi'_{s,t}.
inline std::pair<MatrixXd, MatrixXd> gramians(const ModelProvider& mp, long t, int d) {
  if (d < 1) throw std::invalid_argument("gramians: requires d >= 1");
  const Eigen::Index n = mp.n();
  MatrixXd obs = MatrixXd::Zero(n, n);
  MatrixXd ctr = MatrixXd::Zero(n, n);
  MatrixXd phi = MatrixXd::Identity(n, n);  // Phi_{s,t}
  for (long s = t; s < t + d; ++s) {
    const StepData step = mp.step(s);
    obs += phi.transpose() * step.Q * phi;
    ctr += phi * step.B * step.B.transpose() * phi.transpose();
    phi = step.A * phi;
  }
  return {symmetrize(obs), symmetrize(ctr)};
}

/// Verdict of the bounded-data and uniform observability/controllability
/// checks over a finite window. For periodic providers one period is exact;
/// for anything else the report is a finite-window check only.
struct GramianReport {
  int d = 0;
  double c_obs = 0.0;  // min over the window of lambda_min(obs Gramian)
  double c_ctr = 0.0;  // min over the window of lambda_min(ctr Gramian)
  long window_begin = 0;
  long window_end = 0;
  bool window_exact = false;  // true when the window covers one full period
  bool pass = false;
  long failed_t = -1;
  std::string failure;
};

/// Checks Assumption-style conditions: every A_t and R_t invertible within
/// the rcond threshold, and both d-step Gramian minima above eps_gram,
/// uniformly over the window [window_begin, window_end).
inline GramianReport check_assumptions(const ModelProvider& mp, int d,
                                       std::optional<std::pair<long, long>> window = std::nullopt,
                                       const Tolerances& tol = Tolerances{}) {
  GramianReport rep;
  rep.d = d;
  if (window) {
    rep.window_begin = window->first;
    rep.window_end = window->second;
    if (auto N = mp.period()) rep.window_exact = (rep.window_end - rep.window_begin) >= *N;
  } else if (auto N = mp.period()) {
    rep.window_begin = 0;
    rep.window_end = *N;
    rep.window_exact = true;
  } else {
    throw std::invalid_argument("check_assumptions: non-periodic provider requires a window");
  }
  if (rep.window_end <= rep.window_begin) {
    throw std::invalid_argument("check_assumptions: empty window");
  }

  rep.c_obs = std::numeric_limits<double>::infinity();
  rep.c_ctr = std::numeric_limits<double>::infinity();
  for (long t = rep.window_begin; t < rep.window_end; ++t) {
    const StepData step = mp.step(t);
    Eigen::JacobiSVD<MatrixXd> svd_a(step.A);
    const double rc_a = svd_a.singularValues().minCoeff() /
                        std::max(svd_a.singularValues().maxCoeff(), 1e-300);
    if (rc_a < tol.rcond_min) {
      rep.pass = false;
      rep.failed_t = t;
      rep.failure = "A_t numerically singular (rcond=" + std::to_string(rc_a) + ")";
      return rep;
    }
    const auto [rmin, rmax] = sym_eig_range(step.R);
    if (!(rmin > tol.pd_margin_rel * std::abs(rmax))) {
      rep.pass = false;
      rep.failed_t = t;
      rep.failure = "R_t not positive definite (lambda_min=" + std::to_string(rmin) + ")";
      return rep;
    }
    const auto [obs, ctr] = gramians(mp, t, d);
    const double lo = lambda_min(obs);
    const double lc = lambda_min(ctr);
    rep.c_obs = std::min(rep.c_obs, lo);
    rep.c_ctr = std::min(rep.c_ctr, lc);
    if (!(lo > tol.eps_gram)) {
      rep.pass = false;
      rep.failed_t = t;
      rep.failure = "observability Gramian minimum " + std::to_string(lo) +
                    " not above eps_gram";
      return rep;
    }
    if (!(lc > tol.eps_gram)) {
      rep.pass = false;
      rep.failed_t = t;
      rep.failure = "controllability Gramian minimum " + std::to_string(lc) +
                    " not above eps_gram";
      return rep;
    }
  }
  rep.pass = true;
  return rep;
}

/// Euler-discretized unicycle linearized along a periodic lemniscate
/// trajectory. Yaw uses the four-quadrant arctangent of the position
/// increments, unwrapped so the nominal yaw rate stays continuous; the
/// arctangent of the ratio alone is ill-defined across quadrants.
/// The disturbance channel of the returned model carries h*w_t, so gain
/// bounds stated for w in original units scale by h.
inline ModelProvider unicycle_model(double a, long N, double h, const MatrixXd& Q,
                                    const MatrixXd& R) {
  if (!(a > 0.0) || N < 3 || !(h > 0.0)) {
    throw std::invalid_argument("unicycle_model: requires a > 0, N >= 3, h > 0");
  }
  if (Q.rows() != 3 || Q.cols() != 3 || R.rows() != 2 || R.cols() != 2) {
    throw std::invalid_argument("unicycle_model: Q must be 3x3 and R 2x2");
  }

  const auto nominal = [&](long t) {
    const double k = (2.0 * M_PI / static_cast<double>(N)) * static_cast<double>(t % N);
    const double s = std::sin(k), c = std::cos(k);
    const double den = 1.0 + s * s;
    return std::pair<double, double>{a * c / den, a * s * c / den};
  };

  // Position increments and unwrapped yaw over one period (t = 0..N).
  std::vector<double> dx(N + 1), dy(N + 1), psi(N + 1);
  for (long t = 0; t <= N; ++t) {
    const auto [x0, y0] = nominal(t);
    const auto [x1, y1] = nominal(t + 1);
    dx[t] = x1 - x0;
    dy[t] = y1 - y0;
    if (dx[t] == 0.0 && dy[t] == 0.0) {
      throw std::invalid_argument("unicycle_model: degenerate nominal step at t=" +
                                  std::to_string(t % N));
    }
    const double raw = std::atan2(dy[t], dx[t]);
    if (t == 0) {
      psi[t] = raw;
    } else {
      psi[t] = raw + 2.0 * M_PI * std::round((psi[t - 1] - raw) / (2.0 * M_PI));
    }
  }

  std::vector<StepData> steps(N);
  for (long t = 0; t < N; ++t) {
    const double v = std::hypot(dx[t], dy[t]) / h;
    const double cp = std::cos(psi[t]), sp = std::sin(psi[t]);
    StepData s;
    s.A = MatrixXd::Identity(3, 3);
    s.A(0, 2) = -v * sp * h;
    s.A(1, 2) = v * cp * h;
    s.B = MatrixXd::Zero(3, 2);
    s.B(0, 0) = cp * h;
    s.B(1, 0) = sp * h;
    s.B(2, 1) = h;
    s.Q = Q;
    s.R = R;
    steps[t] = std::move(s);
  }
  return ModelProvider::periodic(std::move(steps));
}

}  // namespace preview_gain
