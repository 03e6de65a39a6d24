#pragma once

#include <deque>

#include "preview_gain/riccati.hpp"

namespace preview_gain {

/// Terminal matrix of the finite-preview construction at base time t:
/// the lifted upper bound evaluated on block T of base t+1, i.e. at
/// starting time t + 1 + d*T. Strictly dominates the true P at that time.
inline SpdMatrix terminal_matrix(const BlockCache& cache, long t, int T) {
  const auto tb = cache.at(t + 1 + static_cast<long>(cache.d()) * T);
  try {
    return SpdMatrix(ric_upper_bound_matrix(*tb));
  } catch (const std::invalid_argument& e) {
    throw FeasibilityError("terminal_matrix: terminal block at start=" +
                           std::to_string(tb->start) + " fails Part 2: " + e.what());
  }
}

inline SpdMatrix terminal_matrix(const ModelProvider& mp, long t, int d, int T, double gamma) {
  BlockCache cache(mp, d, gamma);
  return terminal_matrix(cache, t, T);
}

struct ApproximantDiagnostics {
  double rho_product = 1.0;  // product of per-block contraction factors
  int stages = 0;
};

/// Finite-preview approximant X_{t+1}: the terminal matrix pushed through the
/// lifted Riccati operators of blocks k = T-1 down to 0 of base time t+1.
/// Intermediate iterates are validated positive definite at every stage so an
/// infeasible block is reported with its (t, k) location.
inline SpdMatrix approximant(const BlockCache& cache, long t, int T,
                             ApproximantDiagnostics* diag = nullptr) {
  if (T < 0) throw std::invalid_argument("approximant: T must be nonnegative");
  SpdMatrix x = terminal_matrix(cache, t, T);
  if (diag) {
    diag->rho_product = 1.0;
    diag->stages = T;
  }
  for (int k = T - 1; k >= 0; --k) {
    const long start = t + 1 + static_cast<long>(cache.d()) * k;
    const auto tb = cache.at(start);
    try {
      x = lifted_riccati(*tb, x);
    } catch (const std::invalid_argument& e) {
      throw FeasibilityError("approximant: block (t=" + std::to_string(t) +
                             ", k=" + std::to_string(k) + ") produced a non-PD iterate: " +
                             e.what());
    }
    if (diag) diag->rho_product *= contraction_stats(*tb).rho;
  }
  return x;
}

inline SpdMatrix approximant(const ModelProvider& mp, long t, int d, int T, double gamma) {
  BlockCache cache(mp, d, gamma);
  return approximant(cache, t, T);
}

struct GainRow {
  long t = 0;
  MatrixXd K;              // m x n feedback gain at time t
  double lambda_min_X = 0;
  double margin = 0;       // (gamma+beta)^2 - lambda_max(X_{t+1})
  double delta_to_baseline = std::numeric_limits<double>::quiet_NaN();
  bool has_delta = false;
};

/// Receding-horizon gain schedule for t in [t_begin, t_end). Each row carries
/// u_t = -K x_t with K = K_{gamma+beta}(X_{t+1}); X is built with the baseline
/// gamma. When a baseline Riccati solution is supplied, the per-t Riemannian
/// distance delta(X_{t+1}, P_{t+1}) is reported.
inline std::vector<GainRow> gain_schedule(const ModelProvider& mp, long t_begin, long t_end,
                                          int d, int T, double gamma, double beta,
                                          const RiccatiSolution* baseline = nullptr) {
  if (t_end <= t_begin) throw std::invalid_argument("gain_schedule: empty range");
  GainParams params{gamma, beta};
  params.validate();
  const double alpha = params.alpha();
  BlockCache cache(mp, d, gamma);

  std::vector<long> starts;
  starts.reserve(static_cast<std::size_t>((t_end - t_begin)) * (T + 1));
  for (long t = t_begin; t < t_end; ++t) {
    for (int k = 0; k <= T; ++k) starts.push_back(t + 1 + static_cast<long>(d) * k);
  }
  cache.prewarm(starts);

  const std::size_t count = static_cast<std::size_t>(t_end - t_begin);
  std::vector<GainRow> rows(count);
  parallel_for(count, [&](std::size_t i) {
    const long t = t_begin + static_cast<long>(i);
    GainRow& row = rows[i];
    row.t = t;
    const SpdMatrix x = approximant(cache, t, T);
    row.lambda_min_X = x.eig_min();
    row.margin = alpha * alpha - x.eig_max();
    if (!(row.margin > 0.0)) {
      throw FeasibilityError("gain_schedule: X_{t+1} < (gamma+beta)^2 I margin violated at t=" +
                             std::to_string(t) + " (margin=" + std::to_string(row.margin) + ")");
    }
    row.K = feedback_gain(mp.step(t), alpha, x);
    if (baseline) {
      row.delta_to_baseline = riemannian_distance(x, baseline->at(t + 1));
      row.has_delta = true;
    }
  });
  return rows;
}

/// Receding-horizon window of model data ahead of the current time: exactly
/// d*(T+1) steps covering [t+1, t+1+d*(T+1)).
struct PreviewBuffer {
  long base_t = 0;
  int d = 1;
  int T = 1;
  std::deque<StepData> steps;

  long required() const { return static_cast<long>(d) * (T + 1); }
  bool full() const { return static_cast<long>(steps.size()) >= required(); }
};

/// Serializable controller state: enough to resume the stream and reproduce
/// subsequent gains bit-identically.
struct ControllerState {
  long t = 0;
  int d = 1;
  int T = 1;
  double gamma = 0.0;
  double beta = 0.0;
  StepData current;             // model data at time t (used by the gain formula)
  std::deque<StepData> preview; // [t+1, t+1+d(T+1)) and any extra pushed data
  MatrixXd last_K;              // empty until the first gain computation
  MatrixXd last_X;
};

/// Single-owner streaming form of the receding-horizon synthesis. The
/// controller consumes one StepData per advance and recomputes X_{t+1} from
/// its buffered window from scratch; there is no cross-step caching, so
/// streamed gains match the batch schedule exactly.
class StreamingController {
 public:
  StreamingController(int d, int T, double gamma, double beta, long t0, StepData current,
                      std::deque<StepData> preview)
      : state_{t0, d, T, gamma, beta, std::move(current), std::move(preview), {}, {}} {
    GainParams{gamma, beta}.validate();
    if (d < 1 || T < 0) throw std::invalid_argument("StreamingController: bad d or T");
    n_ = state_.current.n();
    m_ = state_.current.m();
    check_dims(state_.current);
    for (const auto& s : state_.preview) check_dims(s);
  }

  explicit StreamingController(ControllerState state) : state_(std::move(state)) {
    n_ = state_.current.n();
    m_ = state_.current.m();
  }

  long t() const { return state_.t; }
  bool ready() const { return static_cast<long>(state_.preview.size()) >= required(); }
  bool stalled() const { return stalled_; }
  const ControllerState& state() const { return state_; }

  /// Appends one step of future model data (clears a stall once enough data
  /// is buffered again). Dimensionally inconsistent data is rejected and the
  /// controller state is left unchanged.
  void push(StepData step) {
    check_dims(step);
    step.validate();
    state_.preview.push_back(std::move(step));
    if (ready()) stalled_ = false;
  }

  /// Gain at the current time, recomputed from the buffered preview.
  const GainRow& gain() {
    if (!ready()) {
      stalled_ = true;
      throw FeasibilityError("StreamingController: preview exhausted at t=" +
                             std::to_string(state_.t) + " (have " +
                             std::to_string(state_.preview.size()) + " of " +
                             std::to_string(required()) + " steps)");
    }
    if (!gain_valid_) compute_gain();
    return row_;
  }

  /// Moves to t+1, consuming one buffered step. Returns false (and stalls)
  /// when the preview window cannot be refilled from the buffer.
  bool advance() {
    if (static_cast<long>(state_.preview.size()) < required() + 1) {
      stalled_ = true;
      return false;
    }
    state_.current = std::move(state_.preview.front());
    state_.preview.pop_front();
    state_.t += 1;
    gain_valid_ = false;
    return true;
  }

 private:
  long required() const { return static_cast<long>(state_.d) * (state_.T + 1); }

  void check_dims(const StepData& s) const {
    if (s.n() != n_ || s.m() != m_) {
      throw std::invalid_argument("StreamingController: step has inconsistent dimensions");
    }
  }

  void compute_gain() {
    // Explicit provider over [t, t + 1 + d(T+1)) with indices shifted to 0.
    std::vector<StepData> window;
    window.reserve(static_cast<std::size_t>(required()) + 1);
    window.push_back(state_.current);
    for (long i = 0; i < required(); ++i) {
      window.push_back(state_.preview[static_cast<std::size_t>(i)]);
    }
    ModelProvider local = ModelProvider::explicit_sequence(std::move(window));
    BlockCache cache(local, state_.d, state_.gamma);
    const SpdMatrix x = approximant(cache, 0, state_.T);
    const double alpha = state_.gamma + state_.beta;
    row_.t = state_.t;
    row_.lambda_min_X = x.eig_min();
    row_.margin = alpha * alpha - x.eig_max();
    if (!(row_.margin > 0.0)) {
      throw FeasibilityError("StreamingController: X margin violated at t=" +
                             std::to_string(state_.t));
    }
    row_.K = feedback_gain(state_.current, alpha, x);
    state_.last_K = row_.K;
    state_.last_X = x.matrix();
    gain_valid_ = true;
  }

  ControllerState state_;
  Eigen::Index n_ = 0, m_ = 0;
  GainRow row_;
  bool gain_valid_ = false;
  bool stalled_ = false;
};

}  // namespace preview_gain
