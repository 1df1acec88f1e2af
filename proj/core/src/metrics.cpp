#include "rmtcov/metrics.hpp"

#include <cmath>
#include <numbers>

namespace rmtcov {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::complex<double> log_branch(std::complex<double> z, long k) {
  return std::log(z) + std::complex<double>(0.0, kTwoPi * static_cast<double>(k));
}

}  // namespace

MetricSpec::MetricSpec(std::string name, std::vector<MetricTerm> terms,
                       double constant)
    : name_(std::move(name)), terms_(std::move(terms)), constant_(constant) {
  if (terms_.empty()) {
    throw ConfigError("MetricSpec '" + name_ + "': at least one term required");
  }
  for (const auto& t : terms_) {
    if (t.atom.kind == AtomKind::LogShift && !(t.atom.s > 0.0)) {
      throw ConfigError("MetricSpec '" + name_ + "': LogShift needs s > 0");
    }
  }
}

double MetricSpec::eval_f(double t) const {
  double out = constant_;
  for (const auto& term : terms_) {
    out += term.weight * atom_f(term.atom, t);
  }
  return out;
}

MetricSpec fisher() {
  return MetricSpec("fisher", {{1.0, {AtomKind::LogSquared, 0.0}}}, 0.0);
}

MetricSpec bhattacharyya() {
  return MetricSpec("bhattacharyya",
                    {{-0.25, {AtomKind::Log, 0.0}},
                     {0.5, {AtomKind::LogShift, 1.0}}},
                    -0.5 * std::log(2.0));
}

MetricSpec kullback_leibler() {
  return MetricSpec("kl",
                    {{0.5, {AtomKind::Linear, 0.0}},
                     {-0.5, {AtomKind::Log, 0.0}}},
                    -0.5);
}

MetricSpec renyi(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw ConfigError("renyi: alpha must lie in (0,1), got " +
                      std::to_string(alpha));
  }
  // log(alpha + (1-alpha) t) = log(alpha) + log(1 + s t), s = (1-alpha)/alpha.
  const double s = (1.0 - alpha) / alpha;
  const double w = -1.0 / (2.0 * (alpha - 1.0));
  return MetricSpec("renyi:" + std::to_string(alpha),
                    {{w, {AtomKind::LogShift, s}},
                     {0.5, {AtomKind::Log, 0.0}}},
                    -std::log(alpha) / (2.0 * (alpha - 1.0)));
}

MetricSpec parse_metric(std::string_view name) {
  if (name == "fisher") return fisher();
  if (name == "bhattacharyya") return bhattacharyya();
  if (name == "kl") return kullback_leibler();
  constexpr std::string_view kRenyi = "renyi:";
  if (name.substr(0, kRenyi.size()) == kRenyi) {
    const std::string arg(name.substr(kRenyi.size()));
    try {
      return renyi(std::stod(arg));
    } catch (const std::invalid_argument&) {
      throw ConfigError("parse_metric: bad renyi alpha '" + arg + "'");
    }
  }
  throw ConfigError("parse_metric: unknown metric '" + std::string(name) +
                    "' (expected fisher|bhattacharyya|kl|renyi:<alpha>)");
}

double atom_f(const Atom& atom, double t) {
  if (!(t > 0.0)) {
    throw Error("atom_f: argument must be positive, got " + std::to_string(t));
  }
  switch (atom.kind) {
    case AtomKind::Linear:
      return t;
    case AtomKind::Log:
      return std::log(t);
    case AtomKind::LogShift:
      return std::log1p(atom.s * t);
    case AtomKind::LogSquared: {
      const double l = std::log(t);
      return l * l;
    }
  }
  throw Error("atom_f: unreachable");
}

std::complex<double> eval_G(const Atom& atom, std::complex<double> z,
                            long k_main, long k_shift) {
  switch (atom.kind) {
    case AtomKind::Linear:
      return log_branch(z, k_main);
    case AtomKind::Log:
      return -z * log_branch(z, k_main) + z;
    case AtomKind::LogShift: {
      const double s = atom.s;
      const auto ls = log_branch(s + z, k_shift);
      return s * ls + z * (ls - log_branch(z, k_main));
    }
    case AtomKind::LogSquared: {
      const auto l = log_branch(z, k_main);
      return z * (l * l - 2.0 * l + 2.0);
    }
  }
  throw Error("eval_G: unreachable");
}

std::complex<double> eval_F(const Atom& atom, std::complex<double> z,
                            long k_main, long k_shift) {
  switch (atom.kind) {
    case AtomKind::Linear:
      return 0.5 * z * z;
    case AtomKind::Log:
      return z * log_branch(z, k_main) - z;
    case AtomKind::LogShift: {
      const double s = atom.s;
      return (1.0 / s + z) * log_branch(1.0 + s * z, k_shift) - z;
    }
    case AtomKind::LogSquared: {
      const auto l = log_branch(z, k_main);
      return z * (l * l - 2.0 * l + 2.0);
    }
  }
  throw Error("eval_F: unreachable");
}

double true_delta(const Vector& pencil_eigenvalues, const MetricSpec& spec) {
  const Eigen::Index p = pencil_eigenvalues.size();
  if (p == 0) {
    throw DimensionError("true_delta: empty spectrum");
  }
  double acc = 0.0;
  for (Eigen::Index i = 0; i < p; ++i) {
    acc += spec.eval_f(pencil_eigenvalues(i));
  }
  return acc / static_cast<double>(p);
}

double true_delta(const SpdMatrix& m, const SpdMatrix& c,
                  const MetricSpec& spec) {
  if (m.dim() != c.dim()) {
    throw DimensionError("true_delta: dimension mismatch");
  }
  return true_delta(eig_pencil(c, m).values, spec);
}

}  // namespace rmtcov
