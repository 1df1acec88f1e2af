#include "rmtcov/discriminant.hpp"

#include <cmath>

#include "rmtcov/metrics.hpp"

namespace rmtcov {

namespace {

SpdMatrix scm_of(const Matrix& x) {
  return SpdMatrix(x * x.transpose() / static_cast<double>(x.cols()));
}

Matrix centered(const Matrix& x) {
  return x.colwise() - x.rowwise().mean().eval();
}

}  // namespace

EstimatorPlugin make_plugin(std::string_view name,
                            std::optional<DescentConfig> base) {
  const std::string label(name);
  if (name == "scm") {
    return {label, [](const Matrix& x, EstimandMode mode) {
              SpdMatrix c = scm_of(x);
              if (mode == EstimandMode::Covariance) return c;
              return spd_unchecked(spd_inverse(c));
            }};
  }
  constexpr std::string_view kShrink = "shrinkage:";
  if (name.substr(0, kShrink.size()) == kShrink) {
    const std::string arg(name.substr(kShrink.size()));
    const bool is_auto = arg == "auto";
    double alpha = 0.0;
    if (!is_auto) {
      try {
        alpha = std::stod(arg);
      } catch (const std::exception&) {
        throw ConfigError("make_plugin: bad shrinkage intensity '" + arg + "'");
      }
      if (!(alpha >= 0.0 && alpha <= 1.0)) {
        throw ConfigError("make_plugin: shrinkage intensity outside [0,1]");
      }
    }
    return {label, [is_auto, alpha](const Matrix& x, EstimandMode mode) {
              SpdMatrix c = scm_of(x);
              const double a = is_auto ? shrinkage_auto_alpha(x, c) : alpha;
              SpdMatrix s = linear_shrinkage_init(c, a);
              if (mode == EstimandMode::Covariance) return s;
              return spd_unchecked(spd_inverse(s));
            }};
  }
  constexpr std::string_view kProp = "proposed:";
  if (name.substr(0, kProp.size()) == kProp) {
    DescentConfig cfg = base.value_or(DescentConfig{});
    cfg.metric = parse_metric(name.substr(kProp.size()));
    cfg.truth.reset();
    return {label, [cfg](const Matrix& x, EstimandMode mode) {
              DescentConfig run = cfg;
              run.mode = mode;
              return estimate(x, run).estimate;
            }};
  }
  throw ConfigError("make_plugin: unknown estimator '" + label +
                    "' (expected scm|shrinkage:<a|auto>|proposed:<metric>)");
}

FittedLda fit_lda(const Matrix& x1, const Matrix& x2,
                  const EstimatorPlugin& plugin) {
  if (x1.rows() != x2.rows()) {
    throw DimensionError("fit_lda: class dimensions differ");
  }
  const double n1 = static_cast<double>(x1.cols());
  const double n2 = static_cast<double>(x2.cols());
  const double p = static_cast<double>(x1.rows());
  if (n1 + n2 <= p) {
    throw RegimeError("fit_lda: requires n1 + n2 > p for an invertible pool");
  }
  FittedLda out;
  out.mu1 = x1.rowwise().mean();
  out.mu2 = x2.rowwise().mean();
  SpdMatrix c1 = plugin.fit(centered(x1), EstimandMode::Covariance);
  SpdMatrix c2 = plugin.fit(centered(x2), EstimandMode::Covariance);
  Matrix pooled = (n1 * c1.mat() + n2 * c2.mat()) / (n1 + n2);
  out.pooled_precision = spd_inverse(SpdMatrix(pooled));
  return out;
}

double score_lda(const FittedLda& model, const Vector& x) {
  const Vector diff = model.mu1 - model.mu2;
  return diff.dot(model.pooled_precision * x) +
         0.5 * model.mu2.dot(model.pooled_precision * model.mu2) -
         0.5 * model.mu1.dot(model.pooled_precision * model.mu1);
}

int classify_lda(const FittedLda& model, const Vector& x) {
  return score_lda(model, x) > 0.0 ? 1 : 2;
}

FittedQda fit_qda(const Matrix& x1, const Matrix& x2,
                  const EstimatorPlugin& plugin) {
  if (x1.rows() != x2.rows()) {
    throw DimensionError("fit_qda: class dimensions differ");
  }
  const Eigen::Index p = x1.rows();
  if (x1.cols() <= p || x2.cols() <= p) {
    throw RegimeError("fit_qda: precision estimation needs n_a > p per class");
  }
  FittedQda out;
  out.mu1 = x1.rowwise().mean();
  out.mu2 = x2.rowwise().mean();
  SpdMatrix prec1 = plugin.fit(centered(x1), EstimandMode::Precision);
  SpdMatrix prec2 = plugin.fit(centered(x2), EstimandMode::Precision);
  // log-det of the precision estimates straight from their spectra.
  const Vector e1 = eig_sym(SymMatrix(prec1.mat())).values;
  const Vector e2 = eig_sym(SymMatrix(prec2.mat())).values;
  out.half_logdet_ratio =
      0.5 * (e1.array().log().sum() - e2.array().log().sum());
  out.log_prior = std::log(static_cast<double>(x2.cols()) /
                           static_cast<double>(x1.cols()));
  out.prec1 = prec1.mat();
  out.prec2 = prec2.mat();
  return out;
}

double score_qda(const FittedQda& model, const Vector& x) {
  const double quad =
      0.5 * (x.dot(model.prec2 * x) - x.dot(model.prec1 * x));
  const double lin =
      model.mu1.dot(model.prec1 * x) - model.mu2.dot(model.prec2 * x);
  const double shift = 0.5 * model.mu2.dot(model.prec2 * model.mu2) -
                       0.5 * model.mu1.dot(model.prec1 * model.mu1);
  return quad + lin + shift + model.half_logdet_ratio - model.log_prior;
}

int classify_qda(const FittedQda& model, const Vector& x) {
  return score_qda(model, x) > 0.0 ? 1 : 2;
}

double evaluate(const std::function<int(const Vector&)>& classify,
                const Matrix& x_test, const std::vector<int>& labels) {
  if (static_cast<std::size_t>(x_test.cols()) != labels.size()) {
    throw DimensionError("evaluate: label count mismatch");
  }
  if (labels.empty()) throw DimensionError("evaluate: empty test set");
  int correct = 0;
  for (Eigen::Index j = 0; j < x_test.cols(); ++j) {
    if (classify(x_test.col(j)) == labels[static_cast<std::size_t>(j)]) {
      ++correct;
    }
  }
  return static_cast<double>(correct) / static_cast<double>(labels.size());
}

}  // namespace rmtcov
