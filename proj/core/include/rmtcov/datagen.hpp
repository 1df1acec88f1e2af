#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "rmtcov/spd.hpp"

namespace rmtcov {

/// Synthetic population covariance families.
struct CovarianceModel {
  enum class Kind { Wishart, Toeplitz, Discrete };
  Kind kind = Kind::Wishart;
  int dim = 0;
  double toeplitz_a = 0.5;            // Toeplitz: C_ij = a^|i-j|
  std::vector<double> eigenvalues;    // Discrete: values, equal multiplicity
  std::uint64_t seed = 0;             // randomness for Wishart / Haar basis
};

/// Parses "wishart", "toeplitz:<a>", "discrete:v1,v2,..." .
CovarianceModel parse_model(std::string_view text, int p, std::uint64_t seed);

std::string model_name(const CovarianceModel& model);

/// Draws/builds the population covariance. Wishart is normalized as
/// Z Z^T / (2p) with Z p x 2p standard normal so the mean spectrum is 1;
/// Discrete uses a Haar-random eigenbasis.
SpdMatrix make_covariance(const CovarianceModel& model);

enum class SampleLaw { Gaussian, Rademacher };

/// n columns C^{1/2} z with z of i.i.d. zero-mean unit-variance entries.
/// Deterministic given the seed.
Matrix sample(const SpdMatrix& c, int n, std::uint64_t seed,
              SampleLaw law = SampleLaw::Gaussian);

/// Two-class Gaussian mixture for the discriminant experiments.
struct MixtureModel {
  Vector mu1, mu2;
  SpdMatrix c1, c2;
  int n1 = 0, n2 = 0;
};

/// mu1 = 0 and mu2 = (shift/p) along the all-ones direction (set
/// `along_first_axis` for the e1 alternative).
MixtureModel make_mixture(const CovarianceModel& model1,
                          const CovarianceModel& model2, double shift, int n1,
                          int n2, bool along_first_axis = false);

/// Draws the two training blocks (p x n1, p x n2) of a mixture.
struct MixtureSample {
  Matrix x1, x2;
};
MixtureSample sample_mixture(const MixtureModel& mixture, std::uint64_t seed,
                             SampleLaw law = SampleLaw::Gaussian);

/// Haar-distributed orthogonal matrix (QR with sign fix).
Matrix haar_orthogonal(int p, std::uint64_t seed);

}  // namespace rmtcov
