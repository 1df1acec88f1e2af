#include "rmtcov/datagen.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "rmtcov/rng.hpp"

namespace rmtcov {

CovarianceModel parse_model(std::string_view text, int p, std::uint64_t seed) {
  CovarianceModel model;
  model.dim = p;
  model.seed = seed;
  if (text == "wishart") {
    model.kind = CovarianceModel::Kind::Wishart;
    return model;
  }
  constexpr std::string_view kToe = "toeplitz:";
  if (text.substr(0, kToe.size()) == kToe) {
    model.kind = CovarianceModel::Kind::Toeplitz;
    const std::string arg(text.substr(kToe.size()));
    try {
      model.toeplitz_a = std::stod(arg);
    } catch (const std::exception&) {
      throw ConfigError("parse_model: bad toeplitz parameter '" + arg + "'");
    }
    if (!(model.toeplitz_a > 0.0 && model.toeplitz_a < 1.0)) {
      throw ConfigError("parse_model: toeplitz parameter must lie in (0,1)");
    }
    return model;
  }
  constexpr std::string_view kDisc = "discrete:";
  if (text.substr(0, kDisc.size()) == kDisc) {
    model.kind = CovarianceModel::Kind::Discrete;
    std::stringstream ss{std::string(text.substr(kDisc.size()))};
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      try {
        model.eigenvalues.push_back(std::stod(tok));
      } catch (const std::exception&) {
        throw ConfigError("parse_model: bad discrete eigenvalue '" + tok + "'");
      }
      if (!(model.eigenvalues.back() > 0.0)) {
        throw ConfigError("parse_model: discrete eigenvalues must be positive");
      }
    }
    if (model.eigenvalues.empty()) {
      throw ConfigError("parse_model: discrete model needs eigenvalues");
    }
    if (p % static_cast<int>(model.eigenvalues.size()) != 0) {
      throw ConfigError("parse_model: p=" + std::to_string(p) +
                        " not divisible by " +
                        std::to_string(model.eigenvalues.size()) +
                        " discrete eigenvalues");
    }
    return model;
  }
  throw ConfigError("parse_model: unknown model '" + std::string(text) +
                    "' (expected wishart|toeplitz:<a>|discrete:<list>)");
}

std::string model_name(const CovarianceModel& model) {
  switch (model.kind) {
    case CovarianceModel::Kind::Wishart:
      return "wishart";
    case CovarianceModel::Kind::Toeplitz: {
      std::ostringstream os;
      os << "toeplitz:" << model.toeplitz_a;
      return os.str();
    }
    case CovarianceModel::Kind::Discrete: {
      std::ostringstream os;
      os << "discrete:";
      for (std::size_t i = 0; i < model.eigenvalues.size(); ++i) {
        os << (i ? "," : "") << model.eigenvalues[i];
      }
      return os.str();
    }
  }
  return "?";
}

Matrix haar_orthogonal(int p, std::uint64_t seed) {
  auto rng = make_rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix a(p, p);
  for (int j = 0; j < p; ++j) {
    for (int i = 0; i < p; ++i) a(i, j) = gauss(rng);
  }
  Eigen::HouseholderQR<Matrix> qr(a);
  Matrix q = qr.householderQ();
  Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  // Sign fix makes the distribution exactly Haar.
  for (int j = 0; j < p; ++j) {
    if (r(j, j) < 0.0) q.col(j) = -q.col(j);
  }
  return q;
}

SpdMatrix make_covariance(const CovarianceModel& model) {
  const int p = model.dim;
  if (p <= 0) throw ConfigError("make_covariance: dimension must be positive");
  switch (model.kind) {
    case CovarianceModel::Kind::Wishart: {
      auto rng = make_rng(derive_seed(model.seed, 0x77697368));
      std::normal_distribution<double> gauss(0.0, 1.0);
      Matrix z(p, 2 * p);
      for (int j = 0; j < 2 * p; ++j) {
        for (int i = 0; i < p; ++i) z(i, j) = gauss(rng);
      }
      return SpdMatrix(z * z.transpose() / (2.0 * p));
    }
    case CovarianceModel::Kind::Toeplitz: {
      Matrix c(p, p);
      for (int i = 0; i < p; ++i) {
        for (int j = 0; j < p; ++j) {
          c(i, j) = std::pow(model.toeplitz_a, std::abs(i - j));
        }
      }
      return SpdMatrix(c);
    }
    case CovarianceModel::Kind::Discrete: {
      const int groups = static_cast<int>(model.eigenvalues.size());
      const int mult = p / groups;
      Vector eigs(p);
      for (int g = 0; g < groups; ++g) {
        for (int m = 0; m < mult; ++m) eigs(g * mult + m) = model.eigenvalues[g];
      }
      Matrix q = haar_orthogonal(p, derive_seed(model.seed, 0x64697363));
      return spd_unchecked(q * eigs.asDiagonal() * q.transpose());
    }
  }
  throw ConfigError("make_covariance: unreachable");
}

Matrix sample(const SpdMatrix& c, int n, std::uint64_t seed, SampleLaw law) {
  if (n < 1) throw ConfigError("sample: n must be at least 1");
  const int p = static_cast<int>(c.dim());
  auto rng = make_rng(derive_seed(seed, 0x73616d70));
  Matrix z(p, n);
  if (law == SampleLaw::Gaussian) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int j = 0; j < n; ++j) {
      for (int i = 0; i < p; ++i) z(i, j) = gauss(rng);
    }
  } else {
    std::bernoulli_distribution coin(0.5);
    for (int j = 0; j < n; ++j) {
      for (int i = 0; i < p; ++i) z(i, j) = coin(rng) ? 1.0 : -1.0;
    }
  }
  return spd_sqrt(c) * z;
}

MixtureModel make_mixture(const CovarianceModel& model1,
                          const CovarianceModel& model2, double shift, int n1,
                          int n2, bool along_first_axis) {
  if (model1.dim != model2.dim) {
    throw DimensionError("make_mixture: class dimensions differ");
  }
  const int p = model1.dim;
  MixtureModel mix{Vector::Zero(p), Vector::Zero(p), make_covariance(model1),
                   make_covariance(model2), n1, n2};
  if (along_first_axis) {
    mix.mu2(0) = shift / p;
  } else {
    mix.mu2.setConstant(shift / p);
  }
  return mix;
}

MixtureSample sample_mixture(const MixtureModel& mixture, std::uint64_t seed,
                             SampleLaw law) {
  Matrix x1 = sample(mixture.c1, mixture.n1, derive_seed(seed, 1), law);
  Matrix x2 = sample(mixture.c2, mixture.n2, derive_seed(seed, 2), law);
  x1.colwise() += mixture.mu1;
  x2.colwise() += mixture.mu2;
  return {std::move(x1), std::move(x2)};
}

}  // namespace rmtcov
