#include "rmtcov/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace rmtcov {

EmpiricalSpectrum EmpiricalSpectrum::make(Vector lambdas, int n,
                                          SpectrumMode mode) {
  const int p = static_cast<int>(lambdas.size());
  if (p == 0) throw DimensionError("EmpiricalSpectrum: empty spectrum");
  if (n <= p) {
    throw RegimeError("EmpiricalSpectrum: requires p < n, got p=" +
                      std::to_string(p) + ", n=" + std::to_string(n));
  }
  for (int i = 0; i < p; ++i) {
    if (!(lambdas(i) > 0.0)) {
      throw NumericalError("EmpiricalSpectrum: nonpositive eigenvalue " +
                           std::to_string(lambdas(i)));
    }
    if (i > 0 && lambdas(i) < lambdas(i - 1)) {
      throw NumericalError("EmpiricalSpectrum: eigenvalues not ascending");
    }
  }
  return {std::move(lambdas), n, mode};
}

namespace {

double sigma_of(StieltjesConvention conv) {
  return conv == StieltjesConvention::PlusOverZ ? 1.0 : -1.0;
}

}  // namespace

double stieltjes_tilde(double t, const EmpiricalSpectrum& spec,
                       StieltjesConvention conv) {
  if (t == 0.0) throw PoleError("stieltjes_tilde: evaluation at the origin");
  const double c = spec.c_tilde();
  double acc = 0.0;
  for (int i = 0; i < spec.p(); ++i) {
    const double d = spec.lambdas(i) - t;
    if (d == 0.0) {
      throw PoleError("stieltjes_tilde: evaluation at eigenvalue " +
                      std::to_string(t));
    }
    acc += 1.0 / d;
  }
  return c * acc / spec.p() + sigma_of(conv) * (1.0 - c) / t;
}

std::complex<double> stieltjes_tilde(std::complex<double> z,
                                     const EmpiricalSpectrum& spec,
                                     StieltjesConvention conv) {
  if (z == std::complex<double>(0.0, 0.0)) {
    throw PoleError("stieltjes_tilde: evaluation at the origin");
  }
  const double c = spec.c_tilde();
  std::complex<double> acc(0.0, 0.0);
  for (int i = 0; i < spec.p(); ++i) {
    acc += 1.0 / (spec.lambdas(i) - z);
  }
  return c * acc / static_cast<double>(spec.p()) +
         sigma_of(conv) * (1.0 - c) / z;
}

double stieltjes_tilde_deriv(double t, const EmpiricalSpectrum& spec,
                             StieltjesConvention conv) {
  if (t == 0.0) {
    throw PoleError("stieltjes_tilde_deriv: evaluation at the origin");
  }
  const double c = spec.c_tilde();
  double acc = 0.0;
  for (int i = 0; i < spec.p(); ++i) {
    const double d = spec.lambdas(i) - t;
    if (d == 0.0) {
      throw PoleError("stieltjes_tilde_deriv: evaluation at eigenvalue " +
                      std::to_string(t));
    }
    acc += 1.0 / (d * d);
  }
  return c * acc / spec.p() - sigma_of(conv) * (1.0 - c) / (t * t);
}

SpectrumAux xi_spectrum(const EmpiricalSpectrum& spec) {
  const int p = spec.p();
  const Vector root = spec.lambdas.cwiseSqrt();
  Matrix a = Matrix(spec.lambdas.asDiagonal());
  a.noalias() -= (root * root.transpose()) / spec.n;
  EigenPair e = eig_sym(SymMatrix(a));

  // Secular check: the xi are the zeros of the MinusOverZ companion
  // transform. Measured as a Newton correction |m(xi)/m'(xi)| so the test
  // stays meaningful next to the poles, where the raw residual blows up
  // for perfectly good roots.
  const double scale = spec.lambdas(p - 1);
  for (int i = 0; i < p; ++i) {
    const double xi = e.values(i);
    bool on_pole = false;
    for (int j = 0; j < p; ++j) {
      if (spec.lambdas(j) == xi) {
        on_pole = true;
        break;
      }
    }
    if (on_pole || xi == 0.0) continue;
    const double r = stieltjes_tilde(xi, spec, StieltjesConvention::MinusOverZ);
    const double dr =
        stieltjes_tilde_deriv(xi, spec, StieltjesConvention::MinusOverZ);
    if (std::abs(r) > 1e-5 * dr * scale) {
      throw NumericalError(
          "xi_spectrum: secular Newton correction " + std::to_string(r / dr) +
          " at xi=" + std::to_string(xi));
    }
  }
  return {e.values};
}

namespace {

/// Bisection with a Newton polish on [lo, hi]; f(lo), f(hi) must differ in
/// sign. Returns the midpoint of the final bracket.
template <class F, class DF>
double bracketed_root(F f, DF df, double lo, double hi, double flo,
                      double fhi) {
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    // One guarded Newton step from the midpoint accelerates convergence.
    const double d = df(mid);
    if (d != 0.0) {
      const double newton = mid - f(mid) / d;
      if (newton > lo && newton < hi) mid = newton;
    }
    const double fm = f(mid);
    if (fm == 0.0 || hi - lo < 1e-16 * std::max(1.0, std::abs(mid))) {
      return mid;
    }
    if ((flo < 0.0) != (fm < 0.0)) {
      hi = mid;
      fhi = fm;
    } else {
      lo = mid;
      flo = fm;
    }
  }
  (void)fhi;
  return 0.5 * (lo + hi);
}

}  // namespace

double kappa(double s, const EmpiricalSpectrum& spec,
             StieltjesConvention conv) {
  if (!(s > 0.0)) {
    throw ConfigError("kappa: s must be positive, got " + std::to_string(s));
  }
  const double s_eff = spec.mode == SpectrumMode::Direct ? s : 1.0 / s;
  const double c = spec.c_tilde();
  // Target residual: PlusOverZ solves m(t) + s_eff = 0, MinusOverZ solves
  // m(t) - s_eff = 0; both have exactly one root in the stated bracket.
  const double sign = conv == StieltjesConvention::PlusOverZ ? 1.0 : -1.0;
  auto f = [&](double t) { return stieltjes_tilde(t, spec, conv) + sign * s_eff; };
  auto df = [&](double t) { return stieltjes_tilde_deriv(t, spec, conv); };

  const double left = -1.0 / (s_eff * (1.0 - c));
  double lo = left * (1.0 - 1e-14);
  double hi = -1e-300;
  double flo = f(lo);
  // Near zero m is dominated by the (1-c)/t mass; walk in until the sign
  // flips rather than evaluating at the underflow edge.
  double probe = -1e-3 * std::abs(left);
  double fhi = f(probe);
  int guard = 0;
  while ((flo < 0.0) == (fhi < 0.0) && guard++ < 600) {
    probe *= 0.5;
    fhi = f(probe);
  }
  if ((flo < 0.0) == (fhi < 0.0)) {
    std::ostringstream msg;
    msg << "kappa: no sign change in bracket [" << lo << ", " << probe
        << "]; residuals " << flo << ", " << fhi;
    throw BracketError(msg.str());
  }
  hi = probe;
  const double root = bracketed_root(f, df, lo, hi, flo, fhi);
  if (std::abs(f(root)) > 1e-12 * std::max(1.0, s_eff)) {
    std::ostringstream msg;
    msg << "kappa: residual " << f(root) << " at root " << root
        << " exceeds tolerance";
    throw BracketError(msg.str());
  }
  return root;
}

ContourSpec ContourSpec::for_spectrum(const EmpiricalSpectrum& spec,
                                      const SpectrumAux& aux, int nodes) {
  ContourSpec out;
  const double lo = std::min(spec.lambdas(0), aux.xis(0));
  out.a = 0.5 * lo;
  out.b = 1.5 * spec.lambdas(spec.p() - 1);
  out.half_height = 0.5 * spec.lambdas(0);
  out.nodes = nodes;
  return out;
}

bool spectrum_is_degenerate(const EmpiricalSpectrum& spec) {
  const int p = spec.p();
  const double scale = spec.lambdas(p - 1);
  for (int i = 0; i + 1 < p; ++i) {
    if (spec.lambdas(i + 1) - spec.lambdas(i) < 1e-12 * scale) return true;
  }
  return false;
}

EmpiricalSpectrum regularize_spectrum(const EmpiricalSpectrum& spec) {
  if (!spectrum_is_degenerate(spec)) return spec;
  const int p = spec.p();
  Vector out = spec.lambdas;
  // Index-staggered multiplicative jitter; deterministic, order-preserving,
  // well below statistical noise.
  for (int i = 0; i < p; ++i) {
    out(i) *= 1.0 + 1e-10 * static_cast<double>(i + 1);
  }
  std::sort(out.data(), out.data() + p);
  return EmpiricalSpectrum::make(std::move(out), spec.n, spec.mode);
}

}  // namespace rmtcov
