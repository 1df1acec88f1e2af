#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "rmtcov/estimators.hpp"
#include "rmtcov/gradients.hpp"
#include "rmtcov/metrics.hpp"

namespace rmtcov {

/// What the descent estimates: C itself or its inverse.
enum class EstimandMode { Covariance, Precision };

struct StepPolicy {
  enum class Kind { Fixed, Backtracking };
  Kind kind = Kind::Backtracking;
  double t0 = 1.0;      // initial trial step
  double shrink = 0.5;  // backtracking factor, in (0,1)
  double slope = 1e-4;  // Armijo slope, in (0, 0.5)

  static StepPolicy fixed(double t);
  static StepPolicy backtracking(double t0 = 1.0, double shrink = 0.5,
                                 double slope = 1e-4);
};

struct InitPolicy {
  enum class Kind { Identity, LinearShrinkage, Custom };
  // Identity is the alpha = 1 member of the shrinkage family and starts
  // the descent at a sample-independent point, where the divergence
  // estimate is unbiased; it is the default throughout.
  Kind kind = Kind::Identity;
  double alpha = 0.0;      // shrinkage intensity when not auto
  bool alpha_auto = true;  // Frobenius-optimal intensity from the data
  std::shared_ptr<const SpdMatrix> custom;

  static InitPolicy identity();
  static InitPolicy shrinkage_auto();
  static InitPolicy shrinkage(double alpha);
  static InitPolicy custom_matrix(SpdMatrix m0);
};

enum class RetractionKind { Exact, Order2 };

struct DescentConfig {
  MetricSpec metric = fisher();
  EstimandMode mode = EstimandMode::Covariance;
  InitPolicy init;
  StepPolicy step;
  RetractionKind retraction = RetractionKind::Exact;
  int max_iters = 200;
  double grad_tol = 1e-8;
  double objective_floor = 1e-14;
  DeltaBackend backend = DeltaBackend::ClosedForm;
  /// When set, every iterate records the population divergence to this
  /// matrix (pass C in Covariance mode, C^{-1} in Precision mode).
  std::shared_ptr<const SpdMatrix> truth;
  /// Force the generic retraction loop even for commuting inits
  /// (used to cross-check the diagonal recursion).
  bool disable_fast_path = false;
};

struct TraceRow {
  int k = 0;
  double h = 0.0;
  double delta_hat = 0.0;
  double step = 0.0;
  double grad_norm = 0.0;
  std::optional<double> true_delta;
};

struct DescentTrace {
  std::vector<TraceRow> rows;
  std::string stop_reason;  // "grad_tol" | "objective_floor" | "max_iters" | "stalled"
  bool used_fast_path = false;
};

struct DescentResult {
  SpdMatrix estimate;
  DescentTrace trace;
};

/// Riemannian gradient descent on h(M) = delta-hat(M,X)^2. X is p x n with
/// p < n and full row rank. In Precision mode the returned matrix
/// estimates C^{-1}.
DescentResult estimate(const Matrix& x, const DescentConfig& config);

/// Same entry point with the sample covariance precomputed.
DescentResult estimate_from_scm(const SpdMatrix& c_hat, const Matrix* x,
                                int n, const DescentConfig& config);

/// Shared-eigenbasis recursion: omega_i exp(-t delta_i / omega_i).
Vector diag_update(const Vector& omega, const Vector& delta, double t);

/// alpha I + sqrt(1-alpha^2) C_hat, alpha in [0,1].
SpdMatrix linear_shrinkage_init(const SpdMatrix& c_hat, double alpha);

/// Frobenius-optimal shrinkage intensity for the one-parameter family
/// alpha I + sqrt(1-alpha^2) C_hat, using the Ledoit-Wolf consistent
/// moment estimates computed from the samples.
double shrinkage_auto_alpha(const Matrix& x, const SpdMatrix& c_hat);

}  // namespace rmtcov
