#pragma once

#include <functional>
#include <optional>
#include <string>
#include <string_view>

#include "rmtcov/descent.hpp"
#include "rmtcov/spd.hpp"

namespace rmtcov {

/// Covariance/precision estimator used by the classifiers. The callable
/// receives a centered p x n sample block and the estimation mode and
/// returns an SPD estimate of C (Covariance) or C^{-1} (Precision).
struct EstimatorPlugin {
  std::string name;
  std::function<SpdMatrix(const Matrix&, EstimandMode)> fit;
};

/// Builds a plugin from its config name:
///   "scm"                      sample covariance (inverted for Precision)
///   "shrinkage:<alpha|auto>"   linear shrinkage of the SCM
///   "proposed:<metric>"        gradient-descent estimator
/// The base config supplies init/step/retraction settings for "proposed"
/// plugins; its metric and mode fields are overridden per call.
EstimatorPlugin make_plugin(std::string_view name,
                            std::optional<DescentConfig> base = std::nullopt);

struct FittedLda {
  Vector mu1, mu2;
  Matrix pooled_precision;
};

struct FittedQda {
  Vector mu1, mu2;
  Matrix prec1, prec2;
  double half_logdet_ratio = 0.0;  // (logdet prec1 - logdet prec2)/2
  double log_prior = 0.0;          // log(n2/n1)
};

/// LDA: per-class covariance estimates are pooled then inverted.
/// Requires n1 + n2 > p.
FittedLda fit_lda(const Matrix& x1, const Matrix& x2,
                  const EstimatorPlugin& plugin);

/// Classification score; class 1 iff positive, ties go to class 2.
double score_lda(const FittedLda& model, const Vector& x);
int classify_lda(const FittedLda& model, const Vector& x);

/// QDA: the plugin runs in Precision mode per class (requires n_a > p).
FittedQda fit_qda(const Matrix& x1, const Matrix& x2,
                  const EstimatorPlugin& plugin);

double score_qda(const FittedQda& model, const Vector& x);
int classify_qda(const FittedQda& model, const Vector& x);

/// Fraction of correctly classified columns; labels are 1 or 2.
double evaluate(const std::function<int(const Vector&)>& classify,
                const Matrix& x_test, const std::vector<int>& labels);

}  // namespace rmtcov
