#include "rmtcov/gradients.hpp"

#include <cmath>
#include <string>

namespace rmtcov {

namespace {

void check_separation(const EmpiricalSpectrum& spec, const SpectrumAux& aux) {
  const int p = spec.p();
  const double scale = spec.lambdas(p - 1);
  for (int k = 0; k < p; ++k) {
    for (int i = 0; i < p; ++i) {
      if (std::abs(spec.lambdas(k) - aux.xis(i)) < 1e-12 * scale) {
        throw DegenerateSpectrumError(
            "grad_diag: lambda_" + std::to_string(k) + " coincides with xi_" +
            std::to_string(i) + "; jitter the sample spectrum and retry");
      }
    }
  }
}

Vector diag_linear_direct(const EmpiricalSpectrum& spec,
                          const SpectrumAux& aux) {
  const int p = spec.p();
  const double c = spec.c_tilde();
  Vector mprime(p);
  for (int i = 0; i < p; ++i) {
    mprime(i) = stieltjes_tilde_deriv(aux.xis(i), spec,
                                      StieltjesConvention::MinusOverZ);
  }
  Vector out(p);
  for (int k = 0; k < p; ++k) {
    double acc = 0.0;
    for (int i = 0; i < p; ++i) {
      const double d = spec.lambdas(k) - aux.xis(i);
      acc += 1.0 / (mprime(i) * d * d);
    }
    out(k) = -1.0 / c + acc / p;
  }
  return out;
}

Vector diag_logsquared_direct(const EmpiricalSpectrum& spec,
                              const SpectrumAux& aux) {
  const int p = spec.p();
  const double c = spec.c_tilde();
  Vector out(p);
  for (int k = 0; k < p; ++k) {
    const double lk = spec.lambdas(k);
    double sum_xi = 0.0, sum_logxi = 0.0, sum_lam = 0.0, sum_loglam = 0.0;
    for (int i = 0; i < p; ++i) {
      const double dxi = lk - aux.xis(i);
      sum_xi += 1.0 / dxi;
      sum_logxi += std::log(aux.xis(i)) / dxi;
      if (i != k) {
        const double dl = lk - spec.lambdas(i);
        sum_lam += 1.0 / dl;
        sum_loglam += std::log(spec.lambdas(i)) / dl;
      }
    }
    out(k) = 2.0 / p * std::log(lk) * (sum_xi - sum_lam - 1.0 / lk) -
             2.0 / p * sum_logxi + 2.0 / p * sum_loglam -
             (2.0 - 2.0 * std::log1p(-c)) / (p * lk);
  }
  return out;
}

Vector diag_logsquared_inverse(const EmpiricalSpectrum& spec,
                               const SpectrumAux& aux) {
  // Equal to -lambda_k times the direct-mode expression on the inverse
  // spectrum, with the xi-sum over all indices.
  Vector out = diag_logsquared_direct(spec, aux);
  return -(out.array() * spec.lambdas.array()).matrix();
}

}  // namespace

GradientDiag grad_diag(const Atom& atom, const EmpiricalSpectrum& spec,
                       const SpectrumAux& aux) {
  if (spec.mode != SpectrumMode::Direct) {
    throw ConfigError("grad_diag: expected a Direct-mode spectrum");
  }
  const int p = spec.p();
  Vector out(p);
  switch (atom.kind) {
    case AtomKind::Linear:
      check_separation(spec, aux);
      out = diag_linear_direct(spec, aux);
      break;
    case AtomKind::Log:
      out = -(spec.lambdas.array() * p).inverse().matrix();
      break;
    case AtomKind::LogShift: {
      const double kap = kappa(atom.s, spec, StieltjesConvention::MinusOverZ);
      out = -((spec.lambdas.array() - kap) * p).inverse().matrix();
      break;
    }
    case AtomKind::LogSquared:
      check_separation(spec, aux);
      if (!(aux.xis(0) > 0.0)) {
        throw NumericalError("grad_diag: LogSquared requires xi > 0");
      }
      out = diag_logsquared_direct(spec, aux);
      break;
  }
  return {std::move(out), atom, spec.mode};
}

GradientDiag grad_diag_inv(const Atom& atom, const EmpiricalSpectrum& spec,
                           const SpectrumAux& aux) {
  if (spec.mode != SpectrumMode::Inverse) {
    throw ConfigError("grad_diag_inv: expected an Inverse-mode spectrum");
  }
  const int p = spec.p();
  const double c = spec.c_tilde();
  Vector out(p);
  switch (atom.kind) {
    case AtomKind::Linear:
      out = (-(1.0 - c) / p) * spec.lambdas.array().inverse().matrix();
      break;
    case AtomKind::Log:
      out = Vector::Constant(p, -1.0 / p);
      break;
    case AtomKind::LogShift: {
      const double kap = kappa(atom.s, spec, StieltjesConvention::MinusOverZ);
      out = ((spec.lambdas.array() / (spec.lambdas.array() - kap)) - 1.0)
                .matrix() /
            p;
      break;
    }
    case AtomKind::LogSquared:
      check_separation(spec, aux);
      if (!(aux.xis(0) > 0.0)) {
        throw NumericalError("grad_diag_inv: LogSquared requires xi > 0");
      }
      out = diag_logsquared_inverse(spec, aux);
      break;
  }
  return {std::move(out), atom, spec.mode};
}

Vector metric_grad_diag(const MetricSpec& metric, const EmpiricalSpectrum& spec,
                        const SpectrumAux& aux) {
  Vector acc = Vector::Zero(spec.p());
  for (const auto& term : metric.terms()) {
    const GradientDiag g = spec.mode == SpectrumMode::Direct
                               ? grad_diag(term.atom, spec, aux)
                               : grad_diag_inv(term.atom, spec, aux);
    acc += term.weight * g.diag;
  }
  return acc;
}

SymMatrix assemble_gradient(const SpdMatrix& m, const SpdMatrix& c_hat, int n,
                            const MetricSpec& metric, SpectrumMode mode,
                            DeltaBackend backend) {
  if (m.dim() != c_hat.dim()) {
    throw DimensionError("assemble_gradient: dimension mismatch");
  }
  const int p = static_cast<int>(m.dim());
  if (p >= n) {
    throw RegimeError("assemble_gradient: requires p < n");
  }

  EigenPair em = eig_sym(SymMatrix(m.mat()));
  const Vector sq = em.values.cwiseSqrt();
  Matrix mh = em.vectors * sq.asDiagonal() * em.vectors.transpose();
  Matrix mih =
      em.vectors * sq.cwiseInverse().asDiagonal() * em.vectors.transpose();

  // Symmetric pencil reduction; O is orthonormal, lambda ascending.
  Matrix s_mat = mode == SpectrumMode::Direct ? (mih * c_hat.mat() * mih).eval()
                                              : (mh * c_hat.mat() * mh).eval();
  EigenPair es = eig_sym(SymMatrix(s_mat));

  auto spec =
      regularize_spectrum(EmpiricalSpectrum::make(es.values, n, mode));
  const SpectrumAux aux = xi_spectrum(spec);
  const double dh = estimate_delta_spectrum(metric, spec, aux, backend);
  const Vector diag = metric_grad_diag(metric, spec, aux);

  // In the O-basis the gradient kernel is diagonal: lambda .* diag for the
  // direct mode (the C_hat factor) and diag alone for the inverse mode.
  const Vector d = mode == SpectrumMode::Direct
                       ? (spec.lambdas.array() * diag.array()).matrix().eval()
                       : diag;
  Matrix core = es.vectors * d.asDiagonal() * es.vectors.transpose();
  Matrix grad = 2.0 * dh * (mh * core * mh);
  return sym(grad);
}

}  // namespace rmtcov
