#include "rmtcov/estimators.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

namespace rmtcov {

namespace {

using Complex = std::complex<double>;
constexpr double kPi = std::numbers::pi;

Complex w_of(Complex z, const EmpiricalSpectrum& spec) {
  return -stieltjes_tilde(z, spec, StieltjesConvention::MinusOverZ);
}

double w_of(double x, const EmpiricalSpectrum& spec) {
  return -stieltjes_tilde(x, spec, StieltjesConvention::MinusOverZ);
}

// ---------------------------------------------------------------------
// Quadrature backend
// ---------------------------------------------------------------------

// Order-7 smoothstep: s(0)=0, s(1)=1 with three vanishing derivatives at
// both ends. Grading each side through s makes the per-side trapezoid
// boundary terms cancel to high order despite the contour corners.
double smooth7(double t) {
  const double t4 = t * t * t * t;
  return t4 * (35.0 - 84.0 * t + 70.0 * t * t - 20.0 * t * t * t);
}

double smooth7_deriv(double t) {
  const double t3 = t * t * t;
  return t3 * (140.0 - 420.0 * t + 420.0 * t * t - 140.0 * t * t * t);
}

struct ContourNodes {
  std::vector<Complex> z;        // interior nodes along the loop
  std::vector<Complex> weight;   // z'(t) dt factor per node
};

ContourNodes rectangle_nodes(const ContourSpec& cs, int n_nodes) {
  // Counterclockwise, starting at the right edge midpoint where w is real
  // positive so every tracked log starts on the principal branch.
  const Complex corners[6] = {
      {cs.b, 0.0},  {cs.b, cs.half_height},  {cs.a, cs.half_height},
      {cs.a, -cs.half_height}, {cs.b, -cs.half_height}, {cs.b, 0.0}};
  double total = 0.0;
  double seg_len[5];
  for (int i = 0; i < 5; ++i) {
    seg_len[i] = std::abs(corners[i + 1] - corners[i]);
    total += seg_len[i];
  }
  ContourNodes out;
  out.z.reserve(n_nodes + 8);
  out.weight.reserve(n_nodes + 8);
  for (int i = 0; i < 5; ++i) {
    const int m = std::max(8, static_cast<int>(
                                  std::lround(n_nodes * seg_len[i] / total)));
    const Complex dir = corners[i + 1] - corners[i];
    const double dt = 1.0 / m;
    // Side endpoints carry zero weight (s' vanishes there), so only the
    // interior nodes enter the sum.
    for (int k = 1; k < m; ++k) {
      const double t = k * dt;
      out.z.push_back(corners[i] + smooth7(t) * dir);
      out.weight.push_back(smooth7_deriv(t) * dt * dir);
    }
  }
  return out;
}

// Phase-unwrapped logs of a sequence of nonzero complex values.
std::vector<Complex> tracked_log(const std::vector<Complex>& vals) {
  std::vector<Complex> out(vals.size());
  double prev = std::arg(vals[0]);
  double acc = prev;
  out[0] = {std::log(std::abs(vals[0])), acc};
  for (std::size_t i = 1; i < vals.size(); ++i) {
    const double ang = std::arg(vals[i]);
    double d = ang - prev;
    d -= 2.0 * kPi * std::round(d / (2.0 * kPi));
    acc += d;
    prev = ang;
    out[i] = {std::log(std::abs(vals[i])), acc};
  }
  return out;
}

double quadrature_pass(const Atom& atom, const EmpiricalSpectrum& spec,
                       const ContourSpec& cs, int n_nodes) {
  const bool direct = spec.mode == SpectrumMode::Direct;
  const ContourNodes nodes = rectangle_nodes(cs, n_nodes);
  const auto& zs = nodes.z;
  const std::size_t m = zs.size();

  std::vector<Complex> ws(m);
  for (std::size_t i = 0; i < m; ++i) ws[i] = w_of(zs[i], spec);
  const auto logw = tracked_log(ws);

  std::vector<Complex> shifted;
  if (atom.kind == AtomKind::LogShift) {
    shifted.resize(m);
    for (std::size_t i = 0; i < m; ++i) {
      shifted[i] = direct ? atom.s + ws[i] : 1.0 + atom.s * ws[i];
    }
    shifted = tracked_log(shifted);
  }

  auto integrand = [&](std::size_t i) -> Complex {
    const Complex w = ws[i];
    const Complex lw = logw[i];
    switch (atom.kind) {
      case AtomKind::Linear:
        return direct ? lw : 0.5 * w * w;
      case AtomKind::Log:
        return direct ? (-w * lw + w) : (w * lw - w);
      case AtomKind::LogShift: {
        const Complex ls = shifted[i];
        return direct ? (atom.s * ls + w * (ls - lw))
                      : ((1.0 / atom.s + w) * ls - w);
      }
      case AtomKind::LogSquared:
        return w * (lw * lw - 2.0 * lw + 2.0);
    }
    return {};
  };

  // Kahan-compensated transformed trapezoid; plain accumulation drifts to
  // ~1e-9 at the largest refinement levels.
  Complex acc(0.0, 0.0), comp(0.0, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    const Complex term = integrand(i) * nodes.weight[i] - comp;
    const Complex tmp = acc + term;
    comp = (tmp - acc) - term;
    acc = tmp;
  }

  const double c = spec.c_tilde();
  return (acc / Complex(0.0, 2.0 * kPi * c)).real();
}

}  // namespace

double delta_atom_quadrature(const Atom& atom, const EmpiricalSpectrum& spec,
                             const ContourSpec& cs) {
  constexpr int kMaxNodes = 1 << 20;
  int n_nodes = cs.nodes;
  double prev = quadrature_pass(atom, spec, cs, n_nodes);
  while (n_nodes < kMaxNodes) {
    n_nodes *= 2;
    const double cur = quadrature_pass(atom, spec, cs, n_nodes);
    if (std::abs(cur - prev) < 1e-8) return cur;
    prev = cur;
  }
  throw IntegrationError(
      "delta quadrature: no convergence below 1e-8 with 2^20 nodes");
}

namespace {

// ---------------------------------------------------------------------
// Closed-form backend
//
// With w(z) = -m_minus(z) = prod(z - xi_j) / (z prod(z - lambda_i)), the
// contour integral collapses to residues at the lambda poles plus
// branch-cut segments. Linear/Log/LogShift reduce to elementary terms in
// lambda, xi and the roots of w = -s; LogSquared leaves one regular 1-D
// integral per cut after the endpoint singularities cancel analytically.
// ---------------------------------------------------------------------

// Roots a_m in (xi_m, lambda_m) of w(x) = -s_eff; w decreases from 0 to
// -infinity across each cut, so each root is simple and bracketed.
Vector shift_cut_roots(double s_eff, const EmpiricalSpectrum& spec,
                       const SpectrumAux& aux) {
  const int p = spec.p();
  Vector out(p);
  for (int m = 0; m < p; ++m) {
    double lo = aux.xis(m);
    double hi = spec.lambdas(m);
    const double width = hi - lo;
    lo += 1e-14 * width + 1e-300;
    hi -= 1e-14 * width;
    double flo = w_of(lo, spec) + s_eff;
    double fhi = w_of(hi, spec) + s_eff;
    int guard = 0;
    while (flo < 0.0 && guard++ < 60) {  // xi-side value should be ~ +s_eff
      lo = aux.xis(m) + (lo - aux.xis(m)) * 0.5;
      flo = w_of(lo, spec) + s_eff;
    }
    while (fhi > 0.0 && guard++ < 120) {
      hi = spec.lambdas(m) - (spec.lambdas(m) - hi) * 0.5;
      fhi = w_of(hi, spec) + s_eff;
    }
    if ((flo < 0.0) == (fhi < 0.0)) {
      throw BracketError("shift_cut_roots: no bracket on cut " +
                         std::to_string(m));
    }
    for (int it = 0; it < 110; ++it) {
      const double mid = 0.5 * (lo + hi);
      const double fm = w_of(mid, spec) + s_eff;
      if ((flo < 0.0) != (fm < 0.0)) {
        hi = mid;
      } else {
        lo = mid;
        flo = fm;
      }
    }
    out(m) = 0.5 * (lo + hi);
  }
  return out;
}

double closed_linear_direct(const EmpiricalSpectrum& spec) {
  return spec.lambdas.mean();
}

double closed_log_direct(const EmpiricalSpectrum& spec) {
  const double c = spec.c_tilde();
  return 1.0 + spec.lambdas.array().log().mean() +
         (1.0 - c) / c * std::log1p(-c);
}

double closed_logshift_direct(double s, const EmpiricalSpectrum& spec,
                              const SpectrumAux& aux) {
  const double c = spec.c_tilde();
  const Vector a = shift_cut_roots(s, spec, aux);
  const double kap = kappa(s, spec, StieltjesConvention::MinusOverZ);
  double acc = s / c * (spec.lambdas - a).sum() + std::log(s);
  acc += (spec.lambdas.array() - kap).log().mean();
  acc += (1.0 - c) / c *
         (std::log1p(-c) + (spec.lambdas.array() / a.array()).log().sum());
  return acc;
}

double closed_linear_inverse(const EmpiricalSpectrum& spec) {
  const int p = spec.p();
  const double c = spec.c_tilde();
  double acc = 0.0;
  for (int i = 0; i < p; ++i) {
    double reg = 0.0;
    for (int j = 0; j < p; ++j) {
      if (j != i) reg += 1.0 / (spec.lambdas(i) - spec.lambdas(j));
    }
    acc += reg / spec.n + (1.0 - c) / spec.lambdas(i);
  }
  return acc / p;
}

double closed_logshift_inverse(double s, const EmpiricalSpectrum& spec,
                               const SpectrumAux& aux) {
  const double c = spec.c_tilde();
  const double s_eff = 1.0 / s;
  const Vector b = shift_cut_roots(s_eff, spec, aux);
  const double kap = kappa(s, spec, StieltjesConvention::MinusOverZ);
  double acc = -1.0;
  acc += ((spec.lambdas.array() - kap) / spec.lambdas.array()).log().mean();
  acc += (spec.lambdas - b).sum() / (c * s);
  acc += (1.0 - c) / c *
         (spec.lambdas.array() / b.array()).log().sum();
  return acc;
}

// LogSquared: per cut m,
//   contribution = 2 F_m + 2/n - pi^2/(3n),   delta = (1/c) sum_m (...)
// where, with u = lambda_m - x, D = lambda_m - xi_m and
// g_m(x) = n (lambda_m - x) |w(x)| smooth on the cut (g_m(lambda_m) = 1),
//   F_m = int_0^D (1/(nu)) [ (g_m-1)(log(nu)+1) - g_m log g_m ] du
//         + (1/n) ( log^2(nD)/2 + log(nD) ).
double closed_logsquared(const EmpiricalSpectrum& spec,
                         const SpectrumAux& aux) {
  const int p = spec.p();
  const int n = spec.n;
  const double c = spec.c_tilde();
  boost::math::quadrature::tanh_sinh<double> integrator(12);

  double total = 0.0;
  for (int m = 0; m < p; ++m) {
    const double lam_m = spec.lambdas(m);
    const double D = lam_m - aux.xis(m);
    if (!(D > 0.0)) {
      throw DegenerateSpectrumError(
          "delta closed form: empty branch cut at index " + std::to_string(m));
    }
    auto g_of = [&](double u) {
      const double x = lam_m - u;
      double s = 0.0;
      for (int i = 0; i < p; ++i) {
        if (i != m) s += 1.0 / (x - spec.lambdas(i));
      }
      s += static_cast<double>(n - p) / x;
      return 1.0 - u * s;
    };
    auto integrand = [&](double u) {
      const double g = g_of(u);
      const double lnu = std::log(n * u);
      const double glg = g > 0.0 ? g * std::log(g) : 0.0;
      return ((g - 1.0) * (lnu + 1.0) - glg) / (n * u);
    };
    const double fm_int = integrator.integrate(integrand, 0.0, D, 1e-10);
    const double lnD = std::log(n * D);
    const double Fm = fm_int + (0.5 * lnD * lnD + lnD) / n;
    total += 2.0 * Fm + 2.0 / n - kPi * kPi / (3.0 * n);
  }
  return total / c;
}

double closed_form(const Atom& atom, const EmpiricalSpectrum& spec,
                   const SpectrumAux& aux) {
  const bool direct = spec.mode == SpectrumMode::Direct;
  switch (atom.kind) {
    case AtomKind::Linear:
      return direct ? closed_linear_direct(spec) : closed_linear_inverse(spec);
    case AtomKind::Log:
      return direct ? closed_log_direct(spec) : -closed_log_direct(spec);
    case AtomKind::LogShift:
      return direct ? closed_logshift_direct(atom.s, spec, aux)
                    : closed_logshift_inverse(atom.s, spec, aux);
    case AtomKind::LogSquared:
      return closed_logsquared(spec, aux);
  }
  throw Error("delta closed form: unreachable");
}

}  // namespace

double delta_atom_quadrature_once(const Atom& atom,
                                  const EmpiricalSpectrum& spec,
                                  const ContourSpec& contour) {
  return quadrature_pass(atom, spec, contour, contour.nodes);
}

double delta_atom(const Atom& atom, const EmpiricalSpectrum& spec,
                  const SpectrumAux& aux, DeltaBackend backend) {
  if (backend == DeltaBackend::Quadrature) {
    return delta_atom_quadrature(atom, spec,
                                 ContourSpec::for_spectrum(spec, aux));
  }
  return closed_form(atom, spec, aux);
}

double estimate_delta_spectrum(const MetricSpec& metric,
                               const EmpiricalSpectrum& spec,
                               const SpectrumAux& aux, DeltaBackend backend) {
  double acc = metric.constant();
  for (const auto& term : metric.terms()) {
    acc += term.weight * delta_atom(term.atom, spec, aux, backend);
  }
  return acc;
}

namespace {

double estimate_from_matrices(const SpdMatrix& m, const SpdMatrix& c_hat,
                              int n, const MetricSpec& metric,
                              DeltaBackend backend, SpectrumMode mode) {
  if (m.dim() != c_hat.dim()) {
    throw DimensionError("estimate_delta: dimension mismatch");
  }
  const int p = static_cast<int>(m.dim());
  if (p >= n) {
    throw RegimeError("estimate_delta: requires p < n, got p=" +
                      std::to_string(p) + ", n=" + std::to_string(n));
  }
  Vector lam;
  if (mode == SpectrumMode::Direct) {
    lam = eig_pencil(c_hat, m).values;
  } else {
    Matrix mh = spd_sqrt(m);
    lam = eig_sym(SymMatrix(mh * c_hat.mat() * mh)).values;
  }
  auto spec =
      regularize_spectrum(EmpiricalSpectrum::make(std::move(lam), n, mode));
  const SpectrumAux aux = xi_spectrum(spec);
  return estimate_delta_spectrum(metric, spec, aux, backend);
}

}  // namespace

double estimate_delta(const SpdMatrix& m, const SpdMatrix& c_hat, int n,
                      const MetricSpec& metric, DeltaBackend backend) {
  return estimate_from_matrices(m, c_hat, n, metric, backend,
                                SpectrumMode::Direct);
}

double estimate_delta_inv(const SpdMatrix& m, const SpdMatrix& c_hat, int n,
                          const MetricSpec& metric, DeltaBackend backend) {
  return estimate_from_matrices(m, c_hat, n, metric, backend,
                                SpectrumMode::Inverse);
}

double mp_scm_theory(const MetricSpec& metric, double c) {
  if (!(c > 0.0 && c < 1.0)) {
    throw ConfigError("mp_scm_theory: c must lie in (0,1), got " +
                      std::to_string(c));
  }
  // Substitution x = 1 + c - 2 sqrt(c) cos(phi) absorbs the square-root
  // edge factors: integral = (2/pi) int_0^pi f(x) sin^2(phi) / x dphi.
  const double sc = std::sqrt(c);
  boost::math::quadrature::gauss_kronrod<double, 61> gk;
  double acc = metric.constant();
  for (const auto& term : metric.terms()) {
    auto integrand = [&](double phi) {
      const double x = 1.0 + c - 2.0 * sc * std::cos(phi);
      const double s = std::sin(phi);
      return atom_f(term.atom, x) * (2.0 / kPi) * s * s / x;
    };
    acc += term.weight * gk.integrate(integrand, 0.0, kPi, 12, 1e-9);
  }
  return acc;
}

}  // namespace rmtcov
