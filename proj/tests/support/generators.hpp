#pragma once

#include <random>

#include "preview_gain/model.hpp"

namespace pgtest {

using Eigen::MatrixXd;
using Eigen::VectorXd;
using preview_gain::ModelProvider;
using preview_gain::StepData;

using Rng = std::mt19937_64;

inline MatrixXd random_matrix(Eigen::Index rows, Eigen::Index cols, Rng& rng, double scale = 1.0) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = scale * gauss(rng);
  }
  return m;
}

inline VectorXd random_vector(Eigen::Index n, Rng& rng, double scale = 1.0) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = scale * gauss(rng);
  return v;
}

/// Random symmetric PD matrix with eigenvalues in roughly [floor, floor + spread].
inline MatrixXd random_spd(Eigen::Index n, Rng& rng, double floor = 0.1, double spread = 2.0) {
  const MatrixXd g = random_matrix(n, n, rng);
  return preview_gain::symmetrize(g * g.transpose() * (spread / static_cast<double>(n)) +
                                  floor * MatrixXd::Identity(n, n));
}

/// Well-conditioned invertible matrix near the identity.
inline MatrixXd random_near_identity(Eigen::Index n, Rng& rng, double dev = 0.3) {
  return MatrixXd::Identity(n, n) + random_matrix(n, n, rng, dev / std::sqrt(double(n)));
}

/// Bounded, well-conditioned model step (A invertible, Q PD-ish, R PD).
inline StepData random_step(Eigen::Index n, Eigen::Index m, Rng& rng) {
  StepData s;
  s.A = random_near_identity(n, rng);
  s.B = random_matrix(n, m, rng, 0.7);
  s.Q = random_spd(n, rng, 0.3, 1.5);
  s.R = random_spd(m, rng, 0.3, 1.0);
  return s;
}

inline ModelProvider random_periodic(Eigen::Index n, Eigen::Index m, long period, Rng& rng) {
  std::vector<StepData> steps;
  steps.reserve(static_cast<std::size_t>(period));
  for (long t = 0; t < period; ++t) steps.push_back(random_step(n, m, rng));
  return ModelProvider::periodic(std::move(steps));
}

inline ModelProvider random_explicit(Eigen::Index n, Eigen::Index m, long len, Rng& rng) {
  std::vector<StepData> steps;
  steps.reserve(static_cast<std::size_t>(len));
  for (long t = 0; t < len; ++t) steps.push_back(random_step(n, m, rng));
  return ModelProvider::explicit_sequence(std::move(steps));
}

inline ModelProvider section5_unicycle(long period = 400) {
  return preview_gain::unicycle_model(1.0, period, 0.05,
                                      Eigen::Vector3d(2, 2, 0.2).asDiagonal(),
                                      Eigen::Vector2d(0.1, 0.01).asDiagonal());
}

inline double rel_err(double a, double b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300});
}

inline double rel_err(const MatrixXd& a, const MatrixXd& b) {
  return (a - b).norm() / std::max({a.norm(), b.norm(), 1e-300});
}

}  // namespace pgtest
