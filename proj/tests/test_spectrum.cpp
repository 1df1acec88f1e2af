#include <doctest.h>

#include <cmath>
#include <random>

#include "rmtcov/rng.hpp"
#include "rmtcov/spectrum.hpp"

using namespace rmtcov;

namespace {

EmpiricalSpectrum random_spectrum(int p, int n, std::uint64_t seed,
                                  SpectrumMode mode = SpectrumMode::Direct) {
  auto rng = make_rng(seed);
  std::uniform_real_distribution<double> u(0.05, 4.0);
  Vector lam(p);
  for (int i = 0; i < p; ++i) lam(i) = u(rng);
  std::sort(lam.data(), lam.data() + p);
  return EmpiricalSpectrum::make(std::move(lam), n, mode);
}

}  // namespace

TEST_CASE("stieltjes_tilde worked examples") {
  Vector lam(2);
  lam << 1.0, 1.0;
  auto spec = EmpiricalSpectrum::make(lam, 4, SpectrumMode::Direct);
  CHECK(stieltjes_tilde(-1.0, spec, StieltjesConvention::MinusOverZ) ==
        doctest::Approx(0.75));
  CHECK(stieltjes_tilde(-1.0, spec, StieltjesConvention::PlusOverZ) ==
        doctest::Approx(-0.25));

  Vector one(1);
  one << 1.0;
  auto spec1 = EmpiricalSpectrum::make(one, 2, SpectrumMode::Direct);
  CHECK(stieltjes_tilde_deriv(-1.0, spec1, StieltjesConvention::MinusOverZ) ==
        doctest::Approx(0.625));
}

TEST_CASE("stieltjes derivative matches central differences") {
  auto spec = random_spectrum(7, 25, 31);
  const double t = -0.3;
  const double h = 1e-6;
  for (auto conv :
       {StieltjesConvention::MinusOverZ, StieltjesConvention::PlusOverZ}) {
    const double fd = (stieltjes_tilde(t + h, spec, conv) -
                       stieltjes_tilde(t - h, spec, conv)) /
                      (2 * h);
    const double an = stieltjes_tilde_deriv(t, spec, conv);
    CHECK(std::abs(fd - an) <= 1e-7 * std::max(1.0, std::abs(an)));
  }
}

TEST_CASE("MinusOverZ derivative positive off the support") {
  auto spec = random_spectrum(6, 20, 32);
  const double lo = spec.lambdas(0);
  const double hi = spec.lambdas(5);
  for (double t : {-5.0, -1.0, -1e-3, 0.2 * lo, 0.9 * lo, hi * 1.05, hi * 10}) {
    if (t == 0.0 || (t >= lo && t <= hi)) continue;
    CHECK(stieltjes_tilde_deriv(t, spec, StieltjesConvention::MinusOverZ) >
          0.0);
  }
}

TEST_CASE("pole and origin errors") {
  auto spec = random_spectrum(4, 12, 33);
  CHECK_THROWS_AS(stieltjes_tilde(0.0, spec, StieltjesConvention::MinusOverZ),
                  PoleError);
  CHECK_THROWS_AS(
      stieltjes_tilde(spec.lambdas(1), spec, StieltjesConvention::MinusOverZ),
      PoleError);
}

TEST_CASE("xi_spectrum worked example") {
  // lambda = (1,1), n = 4: downdate [[0.75,-0.25],[-0.25,0.75]].
  Vector lam(2);
  lam << 1.0, 1.0;
  auto spec = EmpiricalSpectrum::make(lam, 4, SpectrumMode::Direct);
  SpectrumAux aux = xi_spectrum(spec);
  CHECK(aux.xis(0) == doctest::Approx(0.5));
  CHECK(aux.xis(1) == doctest::Approx(1.0));
}

TEST_CASE("xi spectrum invariants on random spectra") {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const int p = 3 + static_cast<int>(seed % 9);
    auto spec = random_spectrum(p, 4 * p, 100 + seed);
    SpectrumAux aux = xi_spectrum(spec);

    // Trace identity.
    CHECK(aux.xis.sum() ==
          doctest::Approx((1.0 - 1.0 / spec.n) * spec.lambdas.sum())
              .epsilon(1e-12));
    // Interlacing with lambda_0 := 0.
    for (int i = 0; i < p; ++i) {
      const double lo = i == 0 ? 0.0 : spec.lambdas(i - 1);
      CHECK(aux.xis(i) >= lo - 1e-12);
      CHECK(aux.xis(i) <= spec.lambdas(i) + 1e-12);
      CHECK(aux.xis(i) > 0.0);
    }
    // Secular identity under the MinusOverZ convention.
    for (int i = 0; i < p; ++i) {
      CHECK(std::abs(stieltjes_tilde(aux.xis(i), spec,
                                     StieltjesConvention::MinusOverZ)) <=
            1e-9);
    }
  }
}

TEST_CASE("kappa worked example and contract") {
  // lambda = (1,1), p=2, n=4, s=1: PlusOverZ solves 0.5/(1-t) + 0.5/t = -1,
  // root (1 - sqrt(3))/2.
  Vector lam(2);
  lam << 1.0, 1.0;
  auto spec = EmpiricalSpectrum::make(lam, 4, SpectrumMode::Direct);
  const double k_plus = kappa(1.0, spec, StieltjesConvention::PlusOverZ);
  CHECK(k_plus == doctest::Approx((1.0 - std::sqrt(3.0)) / 2.0).epsilon(1e-10));

  // MinusOverZ solves m_minus(t) = +1; for this spectrum t = -1/sqrt(2).
  const double k_minus = kappa(1.0, spec, StieltjesConvention::MinusOverZ);
  CHECK(k_minus == doctest::Approx(-1.0 / std::sqrt(2.0)).epsilon(1e-10));

  SUBCASE("bracket membership and residual on random spectra") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      auto sp = random_spectrum(6, 21, 200 + seed);
      for (double s : {0.25, 1.0, 3.0}) {
        for (auto conv : {StieltjesConvention::PlusOverZ,
                          StieltjesConvention::MinusOverZ}) {
          const double k = kappa(s, sp, conv);
          const double c = sp.c_tilde();
          CHECK(k > -1.0 / (s * (1.0 - c)));
          CHECK(k < 0.0);
          const double sign =
              conv == StieltjesConvention::PlusOverZ ? 1.0 : -1.0;
          CHECK(std::abs(stieltjes_tilde(k, sp, conv) + sign * s) <= 1e-12);
        }
      }
    }
  }
  SUBCASE("|kappa| decreases as s grows") {
    auto sp = random_spectrum(8, 30, 300);
    double prev = -1e300;
    for (double s : {0.1, 0.3, 1.0, 3.0, 10.0}) {
      const double k = kappa(s, sp, StieltjesConvention::MinusOverZ);
      CHECK(k > prev);  // toward zero
      prev = k;
    }
  }
  SUBCASE("s <= 0 rejected") {
    CHECK_THROWS_AS(kappa(0.0, spec), ConfigError);
    CHECK_THROWS_AS(kappa(-1.0, spec), ConfigError);
  }
}

TEST_CASE("inverse-mode kappa uses 1/s") {
  Vector lam(3);
  lam << 0.5, 1.0, 2.0;
  auto direct = EmpiricalSpectrum::make(lam, 12, SpectrumMode::Direct);
  auto inverse = EmpiricalSpectrum::make(lam, 12, SpectrumMode::Inverse);
  const double s = 2.0;
  const double ki = kappa(s, inverse, StieltjesConvention::MinusOverZ);
  // Same root as the direct-mode equation with s_eff = 1/s.
  const double kd = kappa(1.0 / s, direct, StieltjesConvention::MinusOverZ);
  CHECK(ki == doctest::Approx(kd).epsilon(1e-12));
}

TEST_CASE("spectrum validation") {
  Vector lam(3);
  lam << 1.0, 2.0, 3.0;
  CHECK_THROWS_AS(EmpiricalSpectrum::make(lam, 3, SpectrumMode::Direct),
                  RegimeError);
  Vector bad(2);
  bad << -1.0, 2.0;
  CHECK_THROWS_AS(EmpiricalSpectrum::make(bad, 8, SpectrumMode::Direct),
                  NumericalError);
}

TEST_CASE("degenerate spectra are regularized deterministically") {
  Vector lam(4);
  lam << 1.0, 1.0, 2.0, 2.0;
  auto spec = EmpiricalSpectrum::make(lam, 16, SpectrumMode::Direct);
  CHECK(spectrum_is_degenerate(spec));
  auto reg = regularize_spectrum(spec);
  auto reg2 = regularize_spectrum(spec);
  CHECK((reg.lambdas - reg2.lambdas).norm() == 0.0);  // deterministic
  for (int i = 0; i + 1 < 4; ++i) {
    CHECK(reg.lambdas(i + 1) > reg.lambdas(i));
  }
  // Jitter is tiny.
  CHECK((reg.lambdas - spec.lambdas).norm() <= 1e-8);
}
