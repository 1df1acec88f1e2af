// Command-line driver: data generation, single estimations, benchmark
// sweeps and per-iteration traces. All outputs are CSV with a '#'-prefixed
// JSON metadata line; identical config + seed gives byte-identical files.

#include <CLI11.hpp>
#include <json.hpp>

#include <atomic>
#include <cmath>
#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "rmtcov/csv.hpp"
#include "rmtcov/datagen.hpp"
#include "rmtcov/descent.hpp"
#include "rmtcov/discriminant.hpp"
#include "rmtcov/estimators.hpp"
#include "rmtcov/metrics.hpp"
#include "rmtcov/rng.hpp"

namespace {

using json = nlohmann::json;
using namespace rmtcov;

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitIo = 4;

// ----------------------------------------------------------------------
// Shared option plumbing
// ----------------------------------------------------------------------

struct CommonOpts {
  std::string metric = "fisher";
  std::string mode = "cov";
  std::string init = "identity";
  std::string step = "backtrack";
  std::string retraction = "exact";
  std::uint64_t seed = 1;
  int threads = 0;  // 0 = hardware concurrency
};

InitPolicy parse_init(const std::string& text) {
  if (text == "identity") return InitPolicy::identity();
  if (text == "shrinkage" || text == "shrinkage:auto") {
    return InitPolicy::shrinkage_auto();
  }
  constexpr std::string_view kShrink = "shrinkage:";
  if (text.rfind(kShrink, 0) == 0) {
    return InitPolicy::shrinkage(std::stod(text.substr(kShrink.size())));
  }
  // Anything else is a path to a CSV initializer.
  return InitPolicy::custom_matrix(SpdMatrix(read_matrix_csv(text)));
}

StepPolicy parse_step(const std::string& text) {
  if (text == "backtrack") return StepPolicy::backtracking();
  constexpr std::string_view kFixed = "fixed:";
  if (text.rfind(kFixed, 0) == 0) {
    return StepPolicy::fixed(std::stod(text.substr(kFixed.size())));
  }
  throw ConfigError("step: expected 'backtrack' or 'fixed:<t>', got '" + text +
                    "'");
}

RetractionKind parse_retraction(const std::string& text) {
  if (text == "exact") return RetractionKind::Exact;
  if (text == "order2") return RetractionKind::Order2;
  throw ConfigError("retraction: expected 'exact' or 'order2'");
}

EstimandMode parse_mode(const std::string& text) {
  if (text == "cov") return EstimandMode::Covariance;
  if (text == "prec") return EstimandMode::Precision;
  throw ConfigError("mode: expected 'cov' or 'prec'");
}

DescentConfig descent_config(const CommonOpts& opts) {
  DescentConfig cfg;
  cfg.metric = parse_metric(opts.metric);
  cfg.mode = parse_mode(opts.mode);
  cfg.init = parse_init(opts.init);
  cfg.step = parse_step(opts.step);
  cfg.retraction = parse_retraction(opts.retraction);
  return cfg;
}

std::vector<double> parse_ratio_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    const double r = std::stod(tok);
    if (!(r > 1.0)) {
      throw ConfigError("ratios: every ratio must exceed 1, got " + tok);
    }
    out.push_back(r);
  }
  if (out.empty()) throw ConfigError("ratios: empty list");
  return out;
}

std::vector<std::string> parse_name_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (!tok.empty()) out.push_back(tok);
  }
  return out;
}

/// Runs fn(i) for i in [0, count) on a small worker pool. Tasks write to
/// preallocated slots, so scheduling never affects the output.
void parallel_for(std::size_t count, int threads,
                  const std::function<void(std::size_t)>& fn) {
  unsigned hw = threads > 0 ? static_cast<unsigned>(threads)
                            : std::max(1u, std::thread::hardware_concurrency());
  hw = std::min<unsigned>(hw, count == 0 ? 1 : static_cast<unsigned>(count));
  if (hw <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(hw);
  for (unsigned w = 0; w < hw; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= count) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

struct Aggregate {
  double mean = 0.0;
  double stddev = 0.0;
};

Aggregate aggregate(const std::vector<double>& values) {
  double sum = 0.0;
  for (double v : values) sum += v;
  const double mean = sum / static_cast<double>(values.size());
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  const double var =
      values.size() > 1 ? ss / static_cast<double>(values.size() - 1) : 0.0;
  return {mean, std::sqrt(var)};
}

// ----------------------------------------------------------------------
// estimate
// ----------------------------------------------------------------------

struct EstimateOpts {
  CommonOpts common;
  std::string input;
  std::string out;
  std::string trace_out;
};

int cmd_estimate(const EstimateOpts& opts) {
  Matrix x = read_matrix_csv(opts.input);
  if (x.rows() >= x.cols()) {
    throw RegimeError("estimate: input is " + std::to_string(x.rows()) + "x" +
                      std::to_string(x.cols()) + "; need p < n");
  }
  DescentConfig cfg = descent_config(opts.common);
  DescentResult res = estimate(x, cfg);
  write_matrix_csv(opts.out, res.estimate.mat());

  const auto& rows = res.trace.rows;
  json meta{{"command", "estimate"},
            {"metric", opts.common.metric},
            {"mode", opts.common.mode},
            {"p", x.rows()},
            {"n", x.cols()}};
  if (!opts.trace_out.empty()) {
    write_trace_csv(opts.trace_out, res.trace, meta.dump());
  }
  std::cout << "estimate: " << rows.size() << " iterations, stop="
            << res.trace.stop_reason << ", final delta_hat="
            << format_double(rows.empty() ? 0.0 : rows.back().delta_hat)
            << ", fast_path=" << (res.trace.used_fast_path ? "yes" : "no")
            << "\n  -> " << opts.out << "\n";
  return 0;
}

// ----------------------------------------------------------------------
// bench-distance / bench-precision
// ----------------------------------------------------------------------

struct BenchDistanceOpts {
  CommonOpts common;
  std::string model = "discrete:.1,1,3,4";
  int p = 200;
  std::string ratios = "1.0526,1.2263,1.4,1.5789,1.7526,1.9263,2.1053,2.2789,2.4526,2.6316";
  int trials = 100;
  std::string estimators = "scm,shrinkage:auto,proposed";
  std::string out;
  std::string baseline;
  bool redraw_model = false;
  bool precision = false;
};

int cmd_bench_distance(const BenchDistanceOpts& opts) {
  const MetricSpec metric = parse_metric(opts.common.metric);
  const auto ratios = parse_ratio_list(opts.ratios);
  auto estimator_names = parse_name_list(opts.estimators);
  for (auto& name : estimator_names) {
    if (name == "proposed") name = "proposed:" + opts.common.metric;
  }
  if (opts.trials < 1) throw ConfigError("trials must be >= 1");

  const EstimandMode mode =
      opts.precision ? EstimandMode::Precision : EstimandMode::Covariance;
  const CovarianceModel base_model =
      parse_model(opts.model, opts.p, derive_seed(opts.common.seed, 0xC0));

  struct Cell {
    std::vector<double> values;  // one per trial
  };
  const std::size_t n_est = estimator_names.size();
  std::vector<Cell> cells(ratios.size() * n_est);
  for (auto& c : cells) c.values.resize(static_cast<std::size_t>(opts.trials));

  const std::size_t tasks = ratios.size() * static_cast<std::size_t>(opts.trials);
  parallel_for(tasks, opts.common.threads, [&](std::size_t task) {
    const std::size_t ri = task / static_cast<std::size_t>(opts.trials);
    const int trial = static_cast<int>(task % static_cast<std::size_t>(opts.trials));
    const int n = static_cast<int>(std::lround(ratios[ri] * opts.p));

    CovarianceModel model = base_model;
    if (opts.redraw_model) {
      model.seed = derive_seed(opts.common.seed, 0xC1 + ri, trial);
    }
    const SpdMatrix c = make_covariance(model);
    const SpdMatrix target =
        mode == EstimandMode::Covariance ? c : spd_unchecked(spd_inverse(c));
    const Matrix x =
        sample(c, n, derive_seed(opts.common.seed, 0xA000 + ri, trial));

    for (std::size_t e = 0; e < n_est; ++e) {
      const EstimatorPlugin plugin =
          make_plugin(estimator_names[e], descent_config(opts.common));
      const SpdMatrix est = plugin.fit(x, mode);
      cells[ri * n_est + e].values[static_cast<std::size_t>(trial)] =
          true_delta(est, target, metric);
    }
  });

  ResultTable table;
  json meta{{"command", opts.precision ? "bench-precision" : "bench-distance"},
            {"model", opts.model},
            {"p", opts.p},
            {"metric", opts.common.metric},
            {"trials", opts.trials},
            {"seed", opts.common.seed},
            {"estimators", estimator_names},
            {"init", opts.common.init},
            {"redraw_model", opts.redraw_model},
            {"version", "rmtcov-0.1.0"}};
  table.metadata_json = meta.dump();
  for (std::size_t ri = 0; ri < ratios.size(); ++ri) {
    for (std::size_t e = 0; e < n_est; ++e) {
      const Aggregate a = aggregate(cells[ri * n_est + e].values);
      table.rows.push_back(
          {ratios[ri], estimator_names[e], a.mean, a.stddev, opts.trials});
    }
    // Deterministic Marchenko-Pastur reference for the SCM column.
    const int n = static_cast<int>(std::lround(ratios[ri] * opts.p));
    const double c_ratio = static_cast<double>(opts.p) / n;
    table.rows.push_back(
        {ratios[ri], "scm-th", mp_scm_theory(metric, c_ratio), 0.0, 0});
  }
  if (!opts.baseline.empty()) merge_baseline(table, opts.baseline);
  write_result_table(opts.out, table);
  std::cout << (opts.precision ? "bench-precision" : "bench-distance")
            << ": wrote " << table.rows.size() << " rows -> " << opts.out
            << "\n";
  return 0;
}

// ----------------------------------------------------------------------
// bench-classify
// ----------------------------------------------------------------------

struct BenchClassifyOpts {
  CommonOpts common;
  std::string task = "qda";
  std::string model1 = "toeplitz:0.2";
  std::string model2 = "toeplitz:0.4";
  int p = 100;
  std::string ratios = "2.069,2.2388,2.4291,2.6549,2.9268,3.2609,3.681,4.2254,4.9587,6";
  int trials = 10;
  std::string estimators = "scm,proposed";
  int test_size = 2000;
  double shift = -1.0;  // <0: task default (80 for LDA, 1 for QDA)
  std::string out;
  std::string baseline;
};

int cmd_bench_classify(const BenchClassifyOpts& opts) {
  if (opts.task != "lda" && opts.task != "qda") {
    throw ConfigError("task: expected 'lda' or 'qda'");
  }
  const bool is_lda = opts.task == "lda";
  const double shift = opts.shift >= 0.0 ? opts.shift : (is_lda ? 80.0 : 1.0);
  const auto ratios = parse_ratio_list(opts.ratios);
  auto estimator_names = parse_name_list(opts.estimators);
  for (auto& name : estimator_names) {
    if (name == "proposed") name = "proposed:" + opts.common.metric;
  }

  const CovarianceModel m1 =
      parse_model(opts.model1, opts.p, derive_seed(opts.common.seed, 0xD1));
  const CovarianceModel m2 =
      parse_model(opts.model2, opts.p, derive_seed(opts.common.seed, 0xD2));

  const std::size_t n_est = estimator_names.size();
  std::vector<std::vector<double>> acc(
      ratios.size() * n_est,
      std::vector<double>(static_cast<std::size_t>(opts.trials)));

  const std::size_t tasks = ratios.size() * static_cast<std::size_t>(opts.trials);
  parallel_for(tasks, opts.common.threads, [&](std::size_t task) {
    const std::size_t ri = task / static_cast<std::size_t>(opts.trials);
    const int trial = static_cast<int>(task % static_cast<std::size_t>(opts.trials));
    const int n_a =
        static_cast<int>(std::lround(ratios[ri] * opts.p / 2.0));

    const MixtureModel mix = make_mixture(m1, m2, shift, n_a, n_a);
    const MixtureSample train =
        sample_mixture(mix, derive_seed(opts.common.seed, 0xB000 + ri, trial));

    // Balanced test set with fixed labels.
    MixtureModel test_mix = mix;
    test_mix.n1 = test_mix.n2 = opts.test_size;
    const MixtureSample test = sample_mixture(
        test_mix, derive_seed(opts.common.seed, 0xE000 + ri, trial));
    Matrix x_test(opts.p, 2 * opts.test_size);
    x_test << test.x1, test.x2;
    std::vector<int> labels(static_cast<std::size_t>(2 * opts.test_size), 1);
    for (int j = 0; j < opts.test_size; ++j) {
      labels[static_cast<std::size_t>(opts.test_size + j)] = 2;
    }

    for (std::size_t e = 0; e < n_est; ++e) {
      const EstimatorPlugin plugin =
          make_plugin(estimator_names[e], descent_config(opts.common));
      double a;
      if (is_lda) {
        const FittedLda model = fit_lda(train.x1, train.x2, plugin);
        a = evaluate([&](const Vector& v) { return classify_lda(model, v); },
                     x_test, labels);
      } else {
        const FittedQda model = fit_qda(train.x1, train.x2, plugin);
        a = evaluate([&](const Vector& v) { return classify_qda(model, v); },
                     x_test, labels);
      }
      acc[ri * n_est + e][static_cast<std::size_t>(trial)] = a;
    }
  });

  ResultTable table;
  json meta{{"command", "bench-classify"},
            {"task", opts.task},
            {"model1", opts.model1},
            {"model2", opts.model2},
            {"p", opts.p},
            {"metric", opts.common.metric},
            {"trials", opts.trials},
            {"seed", opts.common.seed},
            {"test_size", opts.test_size},
            {"shift", shift},
            {"estimators", estimator_names},
            {"version", "rmtcov-0.1.0"}};
  table.metadata_json = meta.dump();
  for (std::size_t ri = 0; ri < ratios.size(); ++ri) {
    for (std::size_t e = 0; e < n_est; ++e) {
      const Aggregate a = aggregate(acc[ri * n_est + e]);
      table.rows.push_back(
          {ratios[ri], estimator_names[e], a.mean, a.stddev, opts.trials});
    }
  }
  if (!opts.baseline.empty()) merge_baseline(table, opts.baseline);
  write_result_table(opts.out, table);
  std::cout << "bench-classify: wrote " << table.rows.size() << " rows -> "
            << opts.out << "\n";
  return 0;
}

// ----------------------------------------------------------------------
// trace
// ----------------------------------------------------------------------

struct TraceOpts {
  CommonOpts common;
  std::string model = "discrete:.1,1,3,4";
  int p = 64;
  double ratio = 2.0;
  int max_iters = 400;
  std::string out;
};

int cmd_trace(const TraceOpts& opts) {
  const int n = static_cast<int>(std::lround(opts.ratio * opts.p));
  const CovarianceModel model =
      parse_model(opts.model, opts.p, derive_seed(opts.common.seed, 0xC0));
  const SpdMatrix c = make_covariance(model);
  const Matrix x = sample(c, n, derive_seed(opts.common.seed, 0xA0));

  DescentConfig cfg = descent_config(opts.common);
  cfg.max_iters = opts.max_iters;
  // Let delta-hat run to numerical zero; the printed true divergence shows
  // where the estimate actually plateaus.
  cfg.objective_floor = 1e-40;
  cfg.grad_tol = 1e-14;
  cfg.truth = std::make_shared<const SpdMatrix>(
      cfg.mode == EstimandMode::Covariance ? c
                                           : spd_unchecked(spd_inverse(c)));
  DescentResult res = estimate(x, cfg);

  json meta{{"command", "trace"},    {"model", opts.model},
            {"p", opts.p},           {"n", n},
            {"metric", opts.common.metric}, {"mode", opts.common.mode},
            {"init", opts.common.init},     {"seed", opts.common.seed},
            {"version", "rmtcov-0.1.0"}};
  write_trace_csv(opts.out, res.trace, meta.dump());
  std::cout << "trace: " << res.trace.rows.size() << " iterations, stop="
            << res.trace.stop_reason << " -> " << opts.out << "\n";
  return 0;
}

// ----------------------------------------------------------------------
// datagen
// ----------------------------------------------------------------------

struct DatagenOpts {
  CommonOpts common;
  std::string model = "wishart";
  int p = 100;
  int n = 400;
  std::string law = "gaussian";
  std::string out;
  std::string cov_out;
};

int cmd_datagen(const DatagenOpts& opts) {
  const CovarianceModel model =
      parse_model(opts.model, opts.p, derive_seed(opts.common.seed, 0xC0));
  const SpdMatrix c = make_covariance(model);
  SampleLaw law;
  if (opts.law == "gaussian") {
    law = SampleLaw::Gaussian;
  } else if (opts.law == "rademacher") {
    law = SampleLaw::Rademacher;
  } else {
    throw ConfigError("law: expected 'gaussian' or 'rademacher'");
  }
  const Matrix x = sample(c, opts.n, derive_seed(opts.common.seed, 0xA0), law);
  write_matrix_csv(opts.out, x);
  if (!opts.cov_out.empty()) write_matrix_csv(opts.cov_out, c.mat());
  std::cout << "datagen: wrote " << opts.p << "x" << opts.n << " samples -> "
            << opts.out << "\n";
  return 0;
}

void add_common(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("--metric", opts.metric,
                  "fisher|bhattacharyya|kl|renyi:<alpha>");
  cmd->add_option("--mode", opts.mode, "cov|prec");
  cmd->add_option("--init", opts.init,
                  "identity|shrinkage[:a]|<file.csv>");
  cmd->add_option("--step", opts.step, "backtrack|fixed:<t>");
  cmd->add_option("--retraction", opts.retraction, "exact|order2");
  cmd->add_option("--seed", opts.seed, "Master RNG seed");
  cmd->add_option("--threads", opts.threads, "Worker threads (0 = all)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Covariance and precision estimation via spectral divergence "
               "minimization, with benchmark sweeps"};
  app.set_config("--config", "", "INI config file ([subcommand] sections; "
                                 "command-line flags take precedence");
  app.require_subcommand(1);

  EstimateOpts est;
  auto* c_est = app.add_subcommand("estimate", "Estimate C (or C^-1) from a CSV sample matrix");
  add_common(c_est, est.common);
  c_est->add_option("--in", est.input, "p x n sample CSV")->required();
  c_est->add_option("--out", est.out, "Output matrix CSV")->required();
  c_est->add_option("--trace", est.trace_out, "Optional per-iteration trace CSV");

  BenchDistanceOpts bd;
  auto* c_bd = app.add_subcommand("bench-distance", "Covariance estimation sweep over n/p");
  add_common(c_bd, bd.common);
  c_bd->add_option("--model", bd.model, "wishart|toeplitz:<a>|discrete:<list>");
  c_bd->add_option("--p", bd.p, "Dimension");
  c_bd->add_option("--ratios", bd.ratios, "Comma-separated n/p grid");
  c_bd->add_option("--trials", bd.trials, "Monte Carlo trials per ratio");
  c_bd->add_option("--estimators", bd.estimators, "Estimator list");
  c_bd->add_option("--out", bd.out, "Result table CSV")->required();
  c_bd->add_option("--baseline", bd.baseline, "Wide baseline CSV to merge");
  c_bd->add_flag("--redraw-model", bd.redraw_model,
                 "Redraw the population matrix per trial");

  BenchDistanceOpts bp;
  bp.precision = true;
  auto* c_bp = app.add_subcommand("bench-precision", "Precision estimation sweep over n/p");
  add_common(c_bp, bp.common);
  c_bp->add_option("--model", bp.model, "wishart|toeplitz:<a>|discrete:<list>");
  c_bp->add_option("--p", bp.p, "Dimension");
  c_bp->add_option("--ratios", bp.ratios, "Comma-separated n/p grid");
  c_bp->add_option("--trials", bp.trials, "Monte Carlo trials per ratio");
  c_bp->add_option("--estimators", bp.estimators, "Estimator list");
  c_bp->add_option("--out", bp.out, "Result table CSV")->required();
  c_bp->add_option("--baseline", bp.baseline, "Wide baseline CSV to merge");
  c_bp->add_flag("--redraw-model", bp.redraw_model,
                 "Redraw the population matrix per trial");

  BenchClassifyOpts bc;
  auto* c_bc = app.add_subcommand("bench-classify", "LDA/QDA accuracy sweep over (n1+n2)/p");
  add_common(c_bc, bc.common);
  c_bc->add_option("--task", bc.task, "lda|qda");
  c_bc->add_option("--model1", bc.model1, "Class 1 covariance model");
  c_bc->add_option("--model2", bc.model2, "Class 2 covariance model");
  c_bc->add_option("--p", bc.p, "Dimension");
  c_bc->add_option("--ratios", bc.ratios, "Comma-separated (n1+n2)/p grid");
  c_bc->add_option("--trials", bc.trials, "Realizations per ratio");
  c_bc->add_option("--estimators", bc.estimators, "Estimator list");
  c_bc->add_option("--test-size", bc.test_size, "Test points per class");
  c_bc->add_option("--shift", bc.shift, "Mean shift (default 80 LDA, 1 QDA)");
  c_bc->add_option("--out", bc.out, "Result table CSV")->required();
  c_bc->add_option("--baseline", bc.baseline, "Wide baseline CSV to merge");

  TraceOpts tr;
  tr.common.init = "identity";
  auto* c_tr = app.add_subcommand("trace", "Per-iteration estimated vs true divergence");
  add_common(c_tr, tr.common);
  c_tr->add_option("--model", tr.model, "Population covariance model");
  c_tr->add_option("--p", tr.p, "Dimension");
  c_tr->add_option("--ratio", tr.ratio, "n/p");
  c_tr->add_option("--max-iters", tr.max_iters, "Iteration cap");
  c_tr->add_option("--out", tr.out, "Trace CSV")->required();

  DatagenOpts dg;
  auto* c_dg = app.add_subcommand("datagen", "Draw samples from a synthetic model");
  add_common(c_dg, dg.common);
  c_dg->add_option("--model", dg.model, "Population covariance model");
  c_dg->add_option("--p", dg.p, "Dimension");
  c_dg->add_option("--n", dg.n, "Sample count");
  c_dg->add_option("--law", dg.law, "gaussian|rademacher");
  c_dg->add_option("--out", dg.out, "Sample CSV")->required();
  c_dg->add_option("--cov-out", dg.cov_out, "Also write the population matrix");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (c_est->parsed()) return cmd_estimate(est);
    if (c_bd->parsed()) return cmd_bench_distance(bd);
    if (c_bp->parsed()) return cmd_bench_distance(bp);
    if (c_bc->parsed()) return cmd_bench_classify(bc);
    if (c_tr->parsed()) return cmd_trace(tr);
    if (c_dg->parsed()) return cmd_datagen(dg);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const ParseError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return kExitIo;
  } catch (const Error& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
  return 0;
}
