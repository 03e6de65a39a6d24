#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "preview_gain/common.hpp"

namespace preview_gain {

using Eigen::MatrixXd;
using Eigen::VectorXd;

inline MatrixXd symmetrize(const MatrixXd& m) { return 0.5 * (m + m.transpose()); }

inline double asymmetry(const MatrixXd& m) {
  return (m - m.transpose()).cwiseAbs().maxCoeff();
}

/// Eigenvalue extremes of a symmetric matrix (input is symmetrized first;
/// Riccati arithmetic drifts asymmetrically).
inline std::pair<double, double> sym_eig_range(const MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(symmetrize(m), Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw std::runtime_error("eigen solve failed");
  return {es.eigenvalues().minCoeff(), es.eigenvalues().maxCoeff()};
}

inline double lambda_min(const MatrixXd& m) { return sym_eig_range(m).first; }
inline double lambda_max(const MatrixXd& m) { return sym_eig_range(m).second; }

/// Symmetric positive (semi)definite matrix with cached eigenvalue bounds.
/// Construction validates symmetry up to a relative tolerance, symmetrizes,
/// and enforces the cone requested: strict PD uses the scale-free margin
/// lambda_min > pd_margin_rel * lambda_max.
class SpdMatrix {
 public:
  enum class Cone { Positive, SemiPositive };

  explicit SpdMatrix(MatrixXd m, Cone cone = Cone::Positive,
                     const Tolerances& tol = Tolerances{}) {
    if (m.rows() != m.cols()) throw std::invalid_argument("SpdMatrix: not square");
    const double scale = 1.0 + m.cwiseAbs().maxCoeff();
    if (asymmetry(m) > tol.sym_rel * scale) {
      std::ostringstream os;
      os << "SpdMatrix: asymmetry " << asymmetry(m) << " exceeds tolerance " << tol.sym_rel * scale;
      throw std::invalid_argument(os.str());
    }
    mat_ = symmetrize(m);
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(mat_, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw std::runtime_error("SpdMatrix: eigen solve failed");
    eig_min_ = es.eigenvalues().minCoeff();
    eig_max_ = es.eigenvalues().maxCoeff();
    const double abs_max = std::max(std::abs(eig_min_), std::abs(eig_max_));
    if (cone == Cone::Positive) {
      if (!(eig_min_ > tol.pd_margin_rel * abs_max)) {
        std::ostringstream os;
        os << "SpdMatrix: not strictly positive definite (lambda_min=" << eig_min_
           << ", lambda_max=" << eig_max_ << ")";
        throw std::invalid_argument(os.str());
      }
    } else {
      if (eig_min_ < -tol.pd_margin_rel * std::max(abs_max, 1.0)) {
        std::ostringstream os;
        os << "SpdMatrix: not positive semidefinite (lambda_min=" << eig_min_ << ")";
        throw std::invalid_argument(os.str());
      }
    }
  }

  const MatrixXd& matrix() const { return mat_; }
  Eigen::Index dim() const { return mat_.rows(); }
  double eig_min() const { return eig_min_; }
  double eig_max() const { return eig_max_; }

 private:
  MatrixXd mat_;
  double eig_min_ = 0.0;
  double eig_max_ = 0.0;
};

/// Solves M x = b for symmetric positive definite M (Cholesky).
inline MatrixXd sym_solve(const MatrixXd& m, const MatrixXd& b) {
  Eigen::LLT<MatrixXd> llt(symmetrize(m));
  if (llt.info() != Eigen::Success) {
    throw std::invalid_argument("sym_solve: matrix is not positive definite");
  }
  return llt.solve(b);
}

inline MatrixXd spd_inverse(const MatrixXd& m) {
  return sym_solve(m, MatrixXd::Identity(m.rows(), m.cols()));
}

/// Principal square root of a symmetric PSD matrix. Eigenvalues within the
/// PSD tolerance of zero are clamped; anything more negative throws.
inline MatrixXd spd_sqrt(const MatrixXd& m, const Tolerances& tol = Tolerances{}) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(symmetrize(m));
  if (es.info() != Eigen::Success) throw std::runtime_error("spd_sqrt: eigen solve failed");
  VectorXd ev = es.eigenvalues();
  const double abs_max = std::max(ev.cwiseAbs().maxCoeff(), 1.0);
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (ev[i] < -tol.pd_margin_rel * abs_max) {
      throw std::invalid_argument("spd_sqrt: matrix is not positive semidefinite");
    }
    ev[i] = std::sqrt(std::max(ev[i], 0.0));
  }
  return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
}

/// Riemannian distance on the SPD cone: sqrt of the sum of squared log
/// eigenvalues of X P^{-1}. Computed from the symmetric pencil (X, P), whose
/// spectrum coincides with spec(X P^{-1}).
inline double riemannian_distance(const MatrixXd& x, const MatrixXd& p) {
  if (x.rows() != p.rows() || x.cols() != p.cols() || x.rows() != x.cols()) {
    throw std::invalid_argument("riemannian_distance: dimension mismatch");
  }
  Eigen::LLT<MatrixXd> llt_p(symmetrize(p));
  if (llt_p.info() != Eigen::Success) {
    throw std::invalid_argument("riemannian_distance: P is not positive definite");
  }
  Eigen::GeneralizedSelfAdjointEigenSolver<MatrixXd> es(symmetrize(x), symmetrize(p),
                                                        Eigen::EigenvaluesOnly | Eigen::Ax_lBx);
  if (es.info() != Eigen::Success) {
    throw std::runtime_error("riemannian_distance: generalized eigen solve failed");
  }
  double sum = 0.0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    const double lam = es.eigenvalues()[i];
    if (!(lam > 0.0)) {
      throw std::invalid_argument("riemannian_distance: X is not positive definite");
    }
    const double l = std::log(lam);
    sum += l * l;
  }
  return std::sqrt(sum);
}

inline double riemannian_distance(const SpdMatrix& x, const SpdMatrix& p) {
  return riemannian_distance(x.matrix(), p.matrix());
}

/// Strict Loewner-order test: true iff lambda_min(Y - X) > margin.
inline bool ordering_lt(const MatrixXd& x, const MatrixXd& y, double margin = 0.0) {
  if (x.rows() != y.rows() || x.cols() != y.cols()) {
    throw std::invalid_argument("ordering_lt: dimension mismatch");
  }
  return lambda_min(y - x) > margin;
}

}  // namespace preview_gain
