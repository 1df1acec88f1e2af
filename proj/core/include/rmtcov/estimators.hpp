#pragma once

#include "rmtcov/metrics.hpp"
#include "rmtcov/spectrum.hpp"

namespace rmtcov {

enum class DeltaBackend {
  /// Composite trapezoid on a rectangular contour with continuous branch
  /// tracking, refined by node doubling until successive values agree to
  /// 1e-8. Reference implementation; used as the test oracle.
  Quadrature,
  /// Residue/branch-cut reduction in terms of lambda, xi and the kappa
  /// roots. Exact for Linear/Log/LogShift; for LogSquared the remaining
  /// one-dimensional cut integrals are evaluated adaptively to ~1e-10.
  ClosedForm,
};

/// Consistent estimate of delta(M, C) for a single atom, from the sample
/// pencil spectrum. Direct mode evaluates (1/(2 pi i c)) oint G(-m(z)) dz,
/// Inverse mode the F-variant.
double delta_atom(const Atom& atom, const EmpiricalSpectrum& spec,
                  const SpectrumAux& aux,
                  DeltaBackend backend = DeltaBackend::ClosedForm);

/// Quadrature evaluation on an explicit contour without refinement.
/// Exposed for contour-invariance tests and the finite-difference oracle
/// (a fixed node count keeps the value smooth in the spectrum).
double delta_atom_quadrature_once(const Atom& atom,
                                  const EmpiricalSpectrum& spec,
                                  const ContourSpec& contour);

/// Refining quadrature starting from the given contour (node doubling to
/// the 1e-8 agreement contract).
double delta_atom_quadrature(const Atom& atom, const EmpiricalSpectrum& spec,
                             const ContourSpec& contour);

/// Weighted combination over the metric's atoms plus its constant.
double estimate_delta_spectrum(const MetricSpec& metric,
                               const EmpiricalSpectrum& spec,
                               const SpectrumAux& aux,
                               DeltaBackend backend = DeltaBackend::ClosedForm);

/// delta-hat(M, X) from matrices: spectrum of M^{-1} C_hat. May be
/// negative. Requires p < n.
double estimate_delta(const SpdMatrix& m, const SpdMatrix& c_hat, int n,
                      const MetricSpec& metric,
                      DeltaBackend backend = DeltaBackend::ClosedForm);

/// delta-hat^inv(M, X): estimates delta(M, C^{-1}) from the spectrum of
/// M C_hat.
double estimate_delta_inv(const SpdMatrix& m, const SpdMatrix& c_hat, int n,
                          const MetricSpec& metric,
                          DeltaBackend backend = DeltaBackend::ClosedForm);

/// Limiting value of the metric between C and the sample covariance:
/// integral of f against the Marchenko-Pastur law of ratio c, plus the
/// metric constant. Adaptive quadrature to 1e-8.
double mp_scm_theory(const MetricSpec& metric, double c);

}  // namespace rmtcov
