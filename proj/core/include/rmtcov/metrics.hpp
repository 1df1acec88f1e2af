#pragma once

#include <complex>
#include <string>
#include <string_view>
#include <vector>

#include "rmtcov/spd.hpp"

namespace rmtcov {

/// The four atomic f-functions every supported divergence decomposes into.
enum class AtomKind {
  Linear,      // f(t) = t
  Log,         // f(t) = log t
  LogShift,    // f(t) = log(1 + s t), s > 0
  LogSquared,  // f(t) = log^2 t
};

struct Atom {
  AtomKind kind = AtomKind::Linear;
  double s = 0.0;  // only meaningful for LogShift
};

struct MetricTerm {
  double weight;
  Atom atom;
};

/// A divergence expressed as a weighted sum of atoms plus a constant:
///   delta(M, C) = (1/p) sum_i [ sum_a w_a f_a(lambda_i) ] + constant
/// with lambda_i the eigenvalues of M^{-1} C. The constant contributes to
/// divergence values, never to gradients.
class MetricSpec {
 public:
  MetricSpec(std::string name, std::vector<MetricTerm> terms, double constant);

  const std::string& name() const { return name_; }
  const std::vector<MetricTerm>& terms() const { return terms_; }
  double constant() const { return constant_; }

  /// Full per-eigenvalue f including the constant; t must be positive.
  double eval_f(double t) const;

 private:
  std::string name_;
  std::vector<MetricTerm> terms_;
  double constant_;
};

/// Squared affine-invariant (Fisher) distance: f(t) = log^2 t.
MetricSpec fisher();
/// Squared Bhattacharyya distance: -1/4 log t + 1/2 log(1+t) - 1/2 log 2.
MetricSpec bhattacharyya();
/// Kullback-Leibler divergence: t/2 - (log t)/2 - 1/2.
MetricSpec kullback_leibler();
/// Renyi divergence of order alpha in (0,1).
MetricSpec renyi(double alpha);

/// Accepts "fisher", "bhattacharyya", "kl", "renyi:<alpha>".
MetricSpec parse_metric(std::string_view name);

/// f_a(t) for a single atom, t > 0.
double atom_f(const Atom& atom, double t);

/// G such that G'(z) = f(1/z), per atom. The branch offsets select the
/// sheet of each logarithm: log is evaluated as principal value plus
/// 2*pi*i*k. `k_main` applies to log(z); `k_shift` to log(s+z)
/// (LogShift only). Callers doing contour integration supply offsets that
/// keep the logs continuous along the contour.
std::complex<double> eval_G(const Atom& atom, std::complex<double> z,
                            long k_main = 0, long k_shift = 0);

/// F such that F'(z) = f(z), per atom; `k_shift` applies to log(1+sz).
std::complex<double> eval_F(const Atom& atom, std::complex<double> z,
                            long k_main = 0, long k_shift = 0);

/// Population divergence (1/p) sum_i f(lambda_i(M^{-1}C)) + constant.
double true_delta(const SpdMatrix& m, const SpdMatrix& c,
                  const MetricSpec& spec);

/// Same, over an already-computed pencil spectrum.
double true_delta(const Vector& pencil_eigenvalues, const MetricSpec& spec);

}  // namespace rmtcov
