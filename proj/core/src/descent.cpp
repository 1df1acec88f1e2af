#include "rmtcov/descent.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace rmtcov {

StepPolicy StepPolicy::fixed(double t) {
  if (!(t > 0.0)) throw ConfigError("StepPolicy: fixed step must be positive");
  StepPolicy p;
  p.kind = Kind::Fixed;
  p.t0 = t;
  return p;
}

StepPolicy StepPolicy::backtracking(double t0, double shrink, double slope) {
  if (!(t0 > 0.0) || !(shrink > 0.0 && shrink < 1.0) ||
      !(slope > 0.0 && slope < 0.5)) {
    throw ConfigError("StepPolicy: need t0 > 0, shrink in (0,1), slope in (0,0.5)");
  }
  StepPolicy p;
  p.kind = Kind::Backtracking;
  p.t0 = t0;
  p.shrink = shrink;
  p.slope = slope;
  return p;
}

InitPolicy InitPolicy::identity() {
  InitPolicy p;
  p.kind = Kind::Identity;
  return p;
}

InitPolicy InitPolicy::shrinkage_auto() {
  InitPolicy p;
  p.kind = Kind::LinearShrinkage;
  p.alpha_auto = true;
  return p;
}

InitPolicy InitPolicy::shrinkage(double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw ConfigError("InitPolicy: alpha must lie in [0,1]");
  }
  InitPolicy p;
  p.kind = Kind::LinearShrinkage;
  p.alpha = alpha;
  p.alpha_auto = false;
  return p;
}

InitPolicy InitPolicy::custom_matrix(SpdMatrix m0) {
  InitPolicy p;
  p.kind = Kind::Custom;
  p.custom = std::make_shared<const SpdMatrix>(std::move(m0));
  return p;
}

Vector diag_update(const Vector& omega, const Vector& delta, double t) {
  if (omega.size() != delta.size()) {
    throw DimensionError("diag_update: size mismatch");
  }
  if ((omega.array() <= 0.0).any()) {
    throw NumericalError("diag_update: omega must be positive");
  }
  return (omega.array() * (-t * delta.array() / omega.array()).exp()).matrix();
}

SpdMatrix linear_shrinkage_init(const SpdMatrix& c_hat, double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw ConfigError("linear_shrinkage_init: alpha must lie in [0,1]");
  }
  const double beta = std::sqrt(1.0 - alpha * alpha);
  Matrix out = beta * c_hat.mat();
  out.diagonal().array() += alpha;
  return SpdMatrix(out);
}

double shrinkage_auto_alpha(const Matrix& x, const SpdMatrix& c_hat) {
  const Eigen::Index p = x.rows();
  const Eigen::Index n = x.cols();
  if (c_hat.dim() != p) {
    throw DimensionError("shrinkage_auto_alpha: dimension mismatch");
  }
  const double dp = static_cast<double>(p);
  const double m = c_hat.mat().trace() / dp;
  Matrix centered = c_hat.mat();
  centered.diagonal().array() -= m;
  const double d2 = centered.squaredNorm() / dp;
  const double chat2 = c_hat.mat().squaredNorm();

  // (1/n^2) sum_k ||x_k x_k^T - C_hat||_F^2 / p, expanded to avoid forming
  // the rank-one matrices.
  double bbar = 0.0;
  for (Eigen::Index k = 0; k < n; ++k) {
    const auto xk = x.col(k);
    const double nrm2 = xk.squaredNorm();
    const double quad = xk.dot(c_hat.mat() * xk);
    bbar += nrm2 * nrm2 - 2.0 * quad + chat2;
  }
  bbar /= static_cast<double>(n) * static_cast<double>(n) * dp;
  const double b2 = std::min(bbar, d2);
  const double a2 = d2 - b2;

  // Plug-in risk of alpha I + sqrt(1-alpha^2) C_hat under the asymptotic
  // identities <C,C>/p ~ a^2 + m^2, <C_hat,C_hat>/p ~ d^2 + m^2.
  auto risk = [&](double al) {
    const double be = std::sqrt(std::max(0.0, 1.0 - al * al));
    return (a2 + m * m) - 2.0 * al * m - 2.0 * be * (a2 + m * m) + al * al +
           2.0 * al * be * m + be * be * (d2 + m * m);
  };
  // Golden-section search on [0,1].
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double lo = 0.0, hi = 1.0;
  double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
  double f1 = risk(x1), f2 = risk(x2);
  for (int it = 0; it < 200 && hi - lo > 1e-12; ++it) {
    if (f1 < f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - gr * (hi - lo);
      f1 = risk(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + gr * (hi - lo);
      f2 = risk(x2);
    }
  }
  return 0.5 * (lo + hi);
}

namespace {

struct SpectrumEval {
  EmpiricalSpectrum spec;     // sorted, regularized
  SpectrumAux aux;
  std::vector<int> perm;      // sorted index i came from unsorted perm[i]
  double delta_hat = 0.0;
};

SpectrumEval eval_spectrum(const Vector& lam_unsorted, int n,
                           SpectrumMode mode, const MetricSpec& metric,
                           DeltaBackend backend) {
  const int p = static_cast<int>(lam_unsorted.size());
  std::vector<int> perm(p);
  std::iota(perm.begin(), perm.end(), 0);
  std::sort(perm.begin(), perm.end(), [&](int a, int b) {
    return lam_unsorted(a) < lam_unsorted(b);
  });
  Vector lam(p);
  for (int i = 0; i < p; ++i) lam(i) = lam_unsorted(perm[i]);
  auto spec = regularize_spectrum(EmpiricalSpectrum::make(std::move(lam), n, mode));
  SpectrumAux aux = xi_spectrum(spec);
  const double dh = estimate_delta_spectrum(metric, spec, aux, backend);
  return {std::move(spec), std::move(aux), std::move(perm), dh};
}

double true_delta_for(const SpdMatrix& m_k, const DescentConfig& cfg) {
  return true_delta(m_k, *cfg.truth, cfg.metric);
}

SpdMatrix assemble_shared(const Matrix& u, const Vector& omega) {
  return spd_unchecked(u * omega.asDiagonal() * u.transpose());
}

// Shared-eigenbasis loop: M_k = U diag(omega_k) U^T with U the
// eigenvectors of C_hat; the pencil spectrum and the gradient stay
// diagonal in U, so one symmetric eigensolve per delta-hat evaluation
// (the xi downdate) is the only dense work.
DescentResult descent_fast(const Matrix& u, const Vector& lam_hat,
                           Vector omega, int n, const DescentConfig& cfg) {
  const int p = static_cast<int>(lam_hat.size());
  const SpectrumMode mode = cfg.mode == EstimandMode::Covariance
                                ? SpectrumMode::Direct
                                : SpectrumMode::Inverse;
  DescentTrace trace;
  trace.used_fast_path = true;

  auto pencil = [&](const Vector& om) -> Vector {
    return mode == SpectrumMode::Direct
               ? (lam_hat.array() / om.array()).matrix().eval()
               : (lam_hat.array() * om.array()).matrix().eval();
  };

  SpectrumEval cur = eval_spectrum(pencil(omega), n, mode, cfg.metric,
                                   cfg.backend);
  std::string stop;
  // Warm-started Armijo: each search begins at twice the last accepted
  // step, so the step can track the growing natural scale of h = dh^2.
  double t_init = cfg.step.t0;
  for (int k = 0; k < cfg.max_iters && stop.empty(); ++k) {
    const double h = cur.delta_hat * cur.delta_hat;

    Vector diag_sorted = metric_grad_diag(cfg.metric, cur.spec, cur.aux);
    Vector kernel(p);  // gradient diagonal in the U basis
    for (int i = 0; i < p; ++i) {
      const int j = cur.perm[i];
      kernel(j) = mode == SpectrumMode::Direct
                      ? lam_hat(j) * diag_sorted(i)
                      : omega(j) * diag_sorted(i);
    }
    Vector grad = 2.0 * cur.delta_hat * kernel;
    const double grad_norm =
        std::sqrt((grad.array() / omega.array()).square().sum());

    TraceRow row{k, h, cur.delta_hat, 0.0, grad_norm, std::nullopt};
    if (cfg.truth) {
      row.true_delta = true_delta_for(assemble_shared(u, omega), cfg);
    }

    if (grad_norm <= cfg.grad_tol) {
      stop = "grad_tol";
      trace.rows.push_back(row);
      break;
    }
    if (h <= cfg.objective_floor) {
      stop = "objective_floor";
      trace.rows.push_back(row);
      break;
    }

    auto retract = [&](double t) -> std::optional<Vector> {
      if (cfg.retraction == RetractionKind::Exact) {
        return diag_update(omega, grad, t);
      }
      Vector om = omega.array() - t * grad.array() +
                  0.5 * t * t * grad.array().square() / omega.array();
      if ((om.array() <= 0.0).any()) return std::nullopt;
      return om;
    };

    double t = cfg.step.kind == StepPolicy::Kind::Fixed ? cfg.step.t0 : t_init;
    bool accepted = false;
    SpectrumEval next = cur;
    Vector omega_next = omega;
    const int max_halvings = cfg.step.kind == StepPolicy::Kind::Fixed ? 1 : 60;
    for (int j = 0; j < max_halvings; ++j) {
      auto om_t = retract(t);
      if (om_t) {
        SpectrumEval ev =
            eval_spectrum(pencil(*om_t), n, mode, cfg.metric, cfg.backend);
        const double h_t = ev.delta_hat * ev.delta_hat;
        const bool ok = cfg.step.kind == StepPolicy::Kind::Fixed
                            ? true
                            : h_t <= h - cfg.step.slope * t * grad_norm * grad_norm;
        if (ok) {
          accepted = true;
          omega_next = std::move(*om_t);
          next = std::move(ev);
          break;
        }
      } else if (cfg.step.kind == StepPolicy::Kind::Fixed) {
        throw StepTooLargeError(
            "descent: order-2 retraction left the cone at fixed step t=" +
            std::to_string(t));
      }
      t *= cfg.step.shrink;
    }
    if (!accepted) {
      // A stall at numerical convergence is a stop, not a failure.
      if (h <= 1e-24 || grad_norm <= 1e-10 * std::max(1.0, std::abs(cur.delta_hat))) {
        stop = "stalled";
        trace.rows.push_back(row);
        break;
      }
      trace.rows.push_back(row);
      throw StallError("descent: no decrease after 60 halvings at iterate " +
                       std::to_string(k));
    }
    row.step = t;
    trace.rows.push_back(row);
    t_init = 2.0 * t;
    omega = std::move(omega_next);
    cur = std::move(next);
  }
  if (stop.empty()) stop = "max_iters";
  trace.stop_reason = stop;
  return {assemble_shared(u, omega), std::move(trace)};
}

// Generic loop: literal geodesic (or order-2) retraction on full matrices.
DescentResult descent_full(const SpdMatrix& c_hat, SpdMatrix m, int n,
                           const DescentConfig& cfg) {
  const SpectrumMode mode = cfg.mode == EstimandMode::Covariance
                                ? SpectrumMode::Direct
                                : SpectrumMode::Inverse;
  DescentTrace trace;
  trace.used_fast_path = false;

  auto spectrum_of = [&](const SpdMatrix& mm) -> Vector {
    if (mode == SpectrumMode::Direct) return eig_pencil(c_hat, mm).values;
    Matrix mh = spd_sqrt(mm);
    return eig_sym(SymMatrix(mh * c_hat.mat() * mh)).values;
  };

  auto eval_h = [&](const SpdMatrix& mm) -> double {
    auto ev = eval_spectrum(spectrum_of(mm), n, mode, cfg.metric, cfg.backend);
    return ev.delta_hat;
  };

  std::string stop;
  double t_init = cfg.step.t0;
  for (int k = 0; k < cfg.max_iters && stop.empty(); ++k) {
    SpectrumEval cur =
        eval_spectrum(spectrum_of(m), n, mode, cfg.metric, cfg.backend);
    const double h = cur.delta_hat * cur.delta_hat;

    SymMatrix grad =
        assemble_gradient(m, c_hat, n, cfg.metric, mode, cfg.backend);
    // Riemannian norm through the inverse square root of M.
    Matrix mih = spd_inv_sqrt(m);
    const double grad_norm = (mih * grad.mat() * mih).norm();

    TraceRow row{k, h, cur.delta_hat, 0.0, grad_norm, std::nullopt};
    if (cfg.truth) row.true_delta = true_delta_for(m, cfg);

    if (grad_norm <= cfg.grad_tol) {
      stop = "grad_tol";
      trace.rows.push_back(row);
      break;
    }
    if (h <= cfg.objective_floor) {
      stop = "objective_floor";
      trace.rows.push_back(row);
      break;
    }

    double t = cfg.step.kind == StepPolicy::Kind::Fixed ? cfg.step.t0 : t_init;
    bool accepted = false;
    SpdMatrix m_next = m;
    const int max_halvings = cfg.step.kind == StepPolicy::Kind::Fixed ? 1 : 60;
    for (int j = 0; j < max_halvings; ++j) {
      bool in_cone = true;
      SpdMatrix m_t = m;
      try {
        m_t = cfg.retraction == RetractionKind::Exact
                  ? geodesic_step(m, grad, t)
                  : geodesic_step_order2(m, grad, t);
      } catch (const StepTooLargeError&) {
        if (cfg.step.kind == StepPolicy::Kind::Fixed) throw;
        in_cone = false;
      }
      if (in_cone) {
        const double dh_t = eval_h(m_t);
        const double h_t = dh_t * dh_t;
        const bool ok = cfg.step.kind == StepPolicy::Kind::Fixed
                            ? true
                            : h_t <= h - cfg.step.slope * t * grad_norm * grad_norm;
        if (ok) {
          accepted = true;
          m_next = std::move(m_t);
          break;
        }
      }
      t *= cfg.step.shrink;
    }
    if (!accepted) {
      if (h <= 1e-24 || grad_norm <= 1e-10 * std::max(1.0, std::abs(cur.delta_hat))) {
        stop = "stalled";
        trace.rows.push_back(row);
        break;
      }
      trace.rows.push_back(row);
      throw StallError("descent: no decrease after 60 halvings at iterate " +
                       std::to_string(k));
    }
    row.step = t;
    trace.rows.push_back(row);
    t_init = 2.0 * t;
    m = std::move(m_next);
  }
  if (stop.empty()) stop = "max_iters";
  trace.stop_reason = stop;
  return {std::move(m), std::move(trace)};
}

}  // namespace

DescentResult estimate_from_scm(const SpdMatrix& c_hat, const Matrix* x,
                                int n, const DescentConfig& cfg) {
  const int p = static_cast<int>(c_hat.dim());
  if (p >= n) {
    throw RegimeError("descent: requires p < n, got p=" + std::to_string(p) +
                      ", n=" + std::to_string(n));
  }

  // Initializer.
  SpdMatrix m0 = SpdMatrix::identity(p);
  switch (cfg.init.kind) {
    case InitPolicy::Kind::Identity:
      break;
    case InitPolicy::Kind::LinearShrinkage: {
      double alpha = cfg.init.alpha;
      if (cfg.init.alpha_auto) {
        if (x == nullptr) {
          throw ConfigError(
              "descent: auto shrinkage intensity needs the sample matrix");
        }
        alpha = shrinkage_auto_alpha(*x, c_hat);
      }
      m0 = linear_shrinkage_init(c_hat, alpha);
      // Precision runs start from the inverse of the shrinkage estimate so
      // the initializer already lives on the C^{-1} scale.
      if (cfg.mode == EstimandMode::Precision) {
        m0 = spd_unchecked(spd_inverse(m0));
      }
      break;
    }
    case InitPolicy::Kind::Custom:
      if (!cfg.init.custom) throw ConfigError("descent: missing custom init");
      if (cfg.init.custom->dim() != p) {
        throw DimensionError("descent: custom init dimension mismatch");
      }
      m0 = *cfg.init.custom;
      break;
  }

  // Fast path whenever the initializer commutes with C_hat.
  const double comm_scale = m0.mat().norm() * c_hat.mat().norm();
  const double comm =
      (m0.mat() * c_hat.mat() - c_hat.mat() * m0.mat()).norm();
  if (!cfg.disable_fast_path && comm <= 1e-12 * std::max(comm_scale, 1e-300)) {
    EigenPair e = eig_sym(SymMatrix(c_hat.mat()));
    if (!(e.values(0) > 0.0)) {
      throw RegimeError("descent: sample covariance is singular (rank < p)");
    }
    // omega = diagonal of M0 in the C_hat eigenbasis.
    Vector omega(p);
    switch (cfg.init.kind) {
      case InitPolicy::Kind::Identity:
        omega.setOnes();
        break;
      default:
        omega = (e.vectors.transpose() * m0.mat() * e.vectors).diagonal();
        break;
    }
    return descent_fast(e.vectors, e.values, std::move(omega), n, cfg);
  }
  return descent_full(c_hat, std::move(m0), n, cfg);
}

DescentResult estimate(const Matrix& x, const DescentConfig& cfg) {
  const int p = static_cast<int>(x.rows());
  const int n = static_cast<int>(x.cols());
  if (p >= n) {
    throw RegimeError("descent: requires p < n, got p=" + std::to_string(p) +
                      ", n=" + std::to_string(n));
  }
  Matrix scm = x * x.transpose() / static_cast<double>(n);
  SpdMatrix c_hat = SpdMatrix(scm);  // also verifies full row rank
  return estimate_from_scm(c_hat, &x, n, cfg);
}

}  // namespace rmtcov
