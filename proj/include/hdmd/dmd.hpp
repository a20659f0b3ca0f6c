#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "hdmd/hankel.hpp"
#include "hdmd/types.hpp"

namespace hdmd {

/// Modes whose discrete eigenvalue modulus falls at or below this floor are
/// dropped: their logarithm is singular and they carry no dynamics.
inline constexpr double kEigenvalueFloor = 1e-12;

struct DmdOptions {
  /// Number of leading (undelayed) rows that form the physical state.
  /// Zero means the full augmented state.
  Index state_dim = 0;
  double eigenvalue_floor = kEigenvalueFloor;
};

/// Fitted exact-DMD model. Amplitudes are referenced to `initial_condition`,
/// the most recent augmented snapshot, so t = 0 is the prediction origin.
struct DmdModel {
  CVector eigenvalues;
  CVector exponents;
  CMatrix modes;
  CVector amplitudes;
  double dt = 1.0;
  Index state_dim = 0;
  Index aug_dim = 0;
  NormalizationContext norm;

  Vector initial_condition;
  Vector singular_values;  // all singular values of x_now, descending
  Index rank = 0;          // number of singular values treated as nonzero
  Matrix basis;            // leading left singular vectors U_r
  Matrix lifted;           // x_next * V_r * Sigma_r^-1

  Index n_modes() const { return eigenvalues.size(); }

  /// Best-fit linear operator x_next ~ A x_now applied to an augmented state.
  Vector apply_operator(const Eigen::Ref<const Vector>& x) const { return lifted * (basis.transpose() * x); }

  /// Modal reconstruction of the augmented state at time t (seconds after origin).
  CVector reconstruct(double t) const {
    CVector coeff(n_modes());
    for (Index k = 0; k < n_modes(); ++k) coeff(k) = amplitudes(k) * std::exp(exponents(k) * t);
    return modes * coeff;
  }

  double reconstruction_error() const { return (reconstruct(0.0).real() - initial_condition).norm(); }
};

/// Exact DMD on the full SVD of x_now. Every singular value above the
/// numerical-rank threshold (max(m, n) * eps * sigma_max, as in the
/// Moore-Penrose pseudo-inverse) is kept.
inline DmdModel fit_dmd(const SnapshotPair& pair, const DmdOptions& options = {}) {
  pair.validate();
  const Matrix& x = pair.x_now;
  const Matrix& xp = pair.x_next;
  require(x.cols() >= 1 && x.rows() >= 1, ErrorCode::DegenerateData, "snapshot matrices are empty");
  require(x.allFinite() && xp.allFinite(), ErrorCode::NonFinite, "snapshot matrices contain NaN or Inf");
  const Index state_dim = options.state_dim == 0 ? x.rows() : options.state_dim;
  require(state_dim >= 1 && state_dim <= x.rows() && x.rows() % state_dim == 0, ErrorCode::DimensionMismatch,
          "state dimension must divide the augmented dimension");

  Eigen::BDCSVD<Matrix> svd(x, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& sigma = svd.singularValues();
  require(sigma.size() > 0 && sigma(0) > 0.0, ErrorCode::DegenerateData, "snapshot matrix has rank zero");

  const double tol =
      static_cast<double>(std::max(x.rows(), x.cols())) * std::numeric_limits<double>::epsilon() * sigma(0);
  Index rank = 0;
  while (rank < sigma.size() && sigma(rank) > tol) ++rank;

  const Matrix u = svd.matrixU().leftCols(rank);
  const Matrix v = svd.matrixV().leftCols(rank);
  const Vector inv_sigma = sigma.head(rank).cwiseInverse();
  Matrix lifted = xp * v * inv_sigma.asDiagonal();
  const Matrix reduced = u.transpose() * lifted;

  Eigen::EigenSolver<Matrix> eig(reduced, true);
  require(eig.info() == Eigen::Success, ErrorCode::DegenerateData, "eigendecomposition of reduced operator failed");
  const CVector lambda_all = eig.eigenvalues();
  const CMatrix w_all = eig.eigenvectors();

  std::vector<Index> keep;
  for (Index k = 0; k < lambda_all.size(); ++k)
    if (std::abs(lambda_all(k)) > options.eigenvalue_floor) keep.push_back(k);
  require(!keep.empty(), ErrorCode::DegenerateData, "all DMD eigenvalues are below the floor");

  const Index n_modes = static_cast<Index>(keep.size());
  CVector lambda(n_modes);
  CMatrix w(rank, n_modes);
  for (Index j = 0; j < n_modes; ++j) {
    lambda(j) = lambda_all(keep[j]);
    w.col(j) = w_all.col(keep[j]);
  }

  DmdModel model;
  model.dt = pair.dt;
  model.state_dim = state_dim;
  model.aug_dim = x.rows();
  model.norm = NormalizationContext::identity(static_cast<std::size_t>(state_dim));
  model.singular_values = sigma;
  model.rank = rank;
  model.eigenvalues = lambda;
  model.exponents = lambda.array().log() / pair.dt;
  model.modes = lifted.cast<Complex>() * w;
  model.initial_condition = xp.col(xp.cols() - 1);
  // Phi is rectangular under delay embedding, so b is the least-squares
  // (minimum-norm) solution of Phi b = x_last.
  model.amplitudes = model.modes.completeOrthogonalDecomposition().solve(model.initial_condition.cast<Complex>());
  model.basis = u;
  model.lifted = std::move(lifted);
  return model;
}

/// Complex modal forecast restricted to the first `state_dim` rows, columns
/// j = 0..horizon_steps at t = j*dt after the origin. Values are in the
/// model's (normalized) coordinates.
inline CMatrix forecast_complex(const DmdModel& model, Index horizon_steps) {
  require(horizon_steps >= 0, ErrorCode::InvalidConfig, "forecast horizon must be non-negative");
  const CMatrix head = model.modes.topRows(model.state_dim);
  CMatrix coeff(model.n_modes(), horizon_steps + 1);
  for (Index j = 0; j <= horizon_steps; ++j) {
    const double t = static_cast<double>(j) * model.dt;
    for (Index k = 0; k < model.n_modes(); ++k)
      coeff(k, j) = model.amplitudes(k) * std::exp(model.exponents(k) * t);
  }
  return head * coeff;
}

enum class Units { Normalized, Physical };

/// Real part of the modal expansion, optionally mapped back through the
/// model's normalization context.
inline Matrix forecast(const DmdModel& model, Index horizon_steps, Units units = Units::Normalized) {
  Matrix out = forecast_complex(model, horizon_steps).real();
  if (units == Units::Physical) out = model.norm.invert(out);
  return out;
}

}  // namespace hdmd
