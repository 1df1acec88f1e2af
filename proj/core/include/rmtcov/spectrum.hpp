#pragma once

#include <complex>

#include "rmtcov/spd.hpp"

namespace rmtcov {

/// Direct mode works on the spectrum of M^{-1} C_hat (covariance
/// estimation); Inverse mode on the spectrum of M C_hat (precision
/// estimation).
enum class SpectrumMode { Direct, Inverse };

/// Sorted sample pencil eigenvalues plus the aspect ratio c = p/n.
struct EmpiricalSpectrum {
  Vector lambdas;  // ascending, all positive
  int n = 0;       // sample count; p = lambdas.size() < n
  SpectrumMode mode = SpectrumMode::Direct;

  int p() const { return static_cast<int>(lambdas.size()); }
  double c_tilde() const { return static_cast<double>(p()) / n; }

  /// Validates positivity, ordering and 0 < p/n < 1.
  static EmpiricalSpectrum make(Vector lambdas, int n, SpectrumMode mode);
};

/// Eigenvalues of diag(lambda) - (1/n) sqrt(lambda) sqrt(lambda)^T,
/// ascending. They interlace the lambdas and are the zeros of the
/// MinusOverZ companion transform.
struct SpectrumAux {
  Vector xis;
};

/// Sign convention for the 1/z mass of the companion Stieltjes transform
///   m(t) = c * mean(1/(lambda_i - t)) + sigma * (1-c)/t.
/// MinusOverZ (sigma = -1) is the transform of the companion measure under
/// the (t - z)-denominator definition; PlusOverZ (sigma = +1) matches the
/// formula as commonly printed.
enum class StieltjesConvention { MinusOverZ, PlusOverZ };

double stieltjes_tilde(double t, const EmpiricalSpectrum& spec,
                       StieltjesConvention conv);
std::complex<double> stieltjes_tilde(std::complex<double> z,
                                     const EmpiricalSpectrum& spec,
                                     StieltjesConvention conv);

/// d/dt of stieltjes_tilde: c * mean(1/(lambda_i - t)^2) - sigma*(1-c)/t^2.
double stieltjes_tilde_deriv(double t, const EmpiricalSpectrum& spec,
                             StieltjesConvention conv);

/// Exact xi spectrum via symmetric eigendecomposition of the rank-one
/// downdate; the secular residual m_minus(xi_i) ~ 0 is checked for
/// non-degenerate spectra.
SpectrumAux xi_spectrum(const EmpiricalSpectrum& spec);

/// The unique negative root t of the shifted companion equation inside
/// (-1/(s_eff (1-c)), 0), with s_eff = s in Direct mode and 1/s in Inverse
/// mode. Under PlusOverZ the equation is m(t) = -s_eff (as printed); under
/// MinusOverZ it is m(t) = +s_eff, the form the closed-form gradients and
/// estimators require (adjudicated by the finite-difference oracle).
/// Residual at the root is at most 1e-12 * s_eff.
double kappa(double s, const EmpiricalSpectrum& spec,
             StieltjesConvention conv = StieltjesConvention::PlusOverZ);

/// Rectangle contour [a,b] x [-h,h] for the reference quadrature.
struct ContourSpec {
  double a = 0.0;
  double b = 0.0;
  double half_height = 0.0;
  int nodes = 4096;

  /// Default rectangle [0.5 min(lambda,xi), 1.5 max lambda] with
  /// half-height 0.5 min(lambda); encloses the sample support and the
  /// xi spectrum while excluding the origin.
  static ContourSpec for_spectrum(const EmpiricalSpectrum& spec,
                                  const SpectrumAux& aux, int nodes = 4096);
};

/// Multiplicative index-staggered jitter (relative size 1e-10) applied
/// when consecutive eigenvalues coincide beyond 1e-12 relative; the
/// closed forms require simple spectra. Deterministic.
EmpiricalSpectrum regularize_spectrum(const EmpiricalSpectrum& spec);

/// True when some gap lambda_{i+1}-lambda_i (or xi-lambda coincidence)
/// is below 1e-12 relative.
bool spectrum_is_degenerate(const EmpiricalSpectrum& spec);

}  // namespace rmtcov
