#include <doctest.h>

#include <cmath>

#include "rmtcov/datagen.hpp"
#include "rmtcov/rng.hpp"
#include "rmtcov/spd.hpp"

using namespace rmtcov;

TEST_CASE("toeplitz model is exact") {
  auto model = parse_model("toeplitz:0.5", 3, 0);
  Matrix c = make_covariance(model).mat();
  Matrix expect(3, 3);
  expect << 1, .5, .25, .5, 1, .5, .25, .5, 1;
  CHECK((c - expect).norm() <= 1e-15);
}

TEST_CASE("discrete model spectrum and multiplicities") {
  auto model = parse_model("discrete:.1,1,3,4", 8, 5);
  SpdMatrix c = make_covariance(model);
  EigenPair e = eig_sym(SymMatrix(c.mat()));
  Vector expect(8);
  expect << .1, .1, 1, 1, 3, 3, 4, 4;
  for (int i = 0; i < 8; ++i) {
    CHECK(e.values(i) == doctest::Approx(expect(i)).epsilon(1e-10));
  }
}

TEST_CASE("discrete model divisibility guard") {
  CHECK_THROWS_AS(parse_model("discrete:.1,1,3,4", 10, 0), ConfigError);
  CHECK_THROWS_AS(parse_model("discrete:", 8, 0), ConfigError);
  CHECK_THROWS_AS(parse_model("discrete:1,-2", 8, 0), ConfigError);
}

TEST_CASE("model string parsing") {
  CHECK(parse_model("wishart", 10, 0).kind == CovarianceModel::Kind::Wishart);
  CHECK(parse_model("toeplitz:0.9", 10, 0).toeplitz_a == doctest::Approx(0.9));
  CHECK_THROWS_AS(parse_model("toeplitz:1.2", 10, 0), ConfigError);
  CHECK_THROWS_AS(parse_model("banana", 10, 0), ConfigError);
  CHECK(model_name(parse_model("wishart", 4, 0)) == "wishart");
}

TEST_CASE("wishart model: SPD with mean eigenvalue near one") {
  double mean_acc = 0.0;
  const int reps = 6;
  for (int r = 0; r < reps; ++r) {
    auto model = parse_model("wishart", 100, 40 + r);
    SpdMatrix c = make_covariance(model);
    EigenPair e = eig_sym(SymMatrix(c.mat()));
    CHECK(e.values(0) > 0.0);
    mean_acc += e.values.mean();
  }
  CHECK(mean_acc / reps == doctest::Approx(1.0).epsilon(0.2));
}

TEST_CASE("haar basis is orthogonal") {
  Matrix q = haar_orthogonal(40, 77);
  CHECK((q.transpose() * q - Matrix::Identity(40, 40)).norm() <= 1e-12 * 40);
}

TEST_CASE("sampling determinism and law of large numbers") {
  SpdMatrix c = SpdMatrix::identity(4);
  Matrix a = sample(c, 50, 123);
  Matrix b = sample(c, 50, 123);
  CHECK((a - b).norm() == 0.0);

  const int n = 100000;
  Matrix x = sample(c, n, 9);
  Matrix scm = x * x.transpose() / n;
  CHECK((scm - Matrix::Identity(4, 4)).cwiseAbs().maxCoeff() <= 0.05);

  Matrix xr = sample(c, n, 10, SampleLaw::Rademacher);
  Matrix scm_r = xr * xr.transpose() / n;
  CHECK((scm_r - Matrix::Identity(4, 4)).cwiseAbs().maxCoeff() <= 0.05);
  // Rademacher entries are +-1 so every diagonal entry is exactly one.
  CHECK(scm_r(0, 0) == doctest::Approx(1.0));
}

TEST_CASE("SCM trace matches the population trace at scale") {
  const int p = 200, n = 400;
  auto model = parse_model("discrete:.1,1,3,4", p, 3);
  SpdMatrix c = make_covariance(model);
  Matrix x = sample(c, n, 4);
  Matrix scm = x * x.transpose() / n;
  CHECK(scm.trace() / p == doctest::Approx(c.mat().trace() / p).epsilon(0.03));
}

TEST_CASE("toeplitz eigenvalues within the symbol range") {
  const double a = 0.6;
  auto model = parse_model("toeplitz:0.6", 200, 0);
  EigenPair e = eig_sym(SymMatrix(make_covariance(model).mat()));
  const double lo = (1 - a) / (1 + a);
  const double hi = (1 + a) / (1 - a);
  CHECK(e.values(0) >= lo * 0.95);
  CHECK(e.values(199) <= hi * 1.05);
}

TEST_CASE("mixture construction") {
  auto m1 = parse_model("wishart", 100, 1);
  auto m2 = parse_model("wishart", 100, 2);
  MixtureModel lda = make_mixture(m1, m2, 80.0, 60, 60);
  CHECK((lda.mu2 - lda.mu1).cwiseAbs().maxCoeff() == doctest::Approx(0.8));

  MixtureModel qda = make_mixture(m1, m2, 1.0, 120, 120);
  CHECK(qda.mu2(0) == doctest::Approx(0.01));
  CHECK(qda.mu2(99) == doctest::Approx(0.01));

  MixtureModel axis = make_mixture(m1, m2, 1.0, 10, 10, true);
  CHECK(axis.mu2(0) == doctest::Approx(0.01));
  CHECK(axis.mu2(1) == doctest::Approx(0.0));

  MixtureSample s = sample_mixture(qda, 7);
  CHECK(s.x1.cols() == 120);
  CHECK(s.x2.cols() == 120);
  CHECK(s.x1.rows() == 100);
}
