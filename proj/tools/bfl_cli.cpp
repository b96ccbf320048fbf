// bfl command-line driver: experiment configuration, deterministic parallel
// replica execution, CSV/SVG emission and run manifests.

#include <atomic>
#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "bfl/analysis.hpp"
#include "bfl/bou.hpp"
#include "bfl/coalescent.hpp"
#include "bfl/front.hpp"
#include "bfl/genealogy.hpp"
#include "bfl/io.hpp"
#include "bfl/model.hpp"
#include "bfl/rng.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kVersion = "0.1.0";

std::size_t default_threads() {
  if (const char* env = std::getenv("BFL_THREADS")) {
    char* end = nullptr;
    const unsigned long v = std::strtoul(env, &end, 10);
    if (end && *end == '\0' && v >= 1) return std::size_t(v);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw ? hw : 1;
}

std::string timestamp_utc() {
  const std::time_t t =
      std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char buf[32];
  std::tm tm_utc{};
  gmtime_r(&t, &tm_utc);
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
  return buf;
}

/// Run fn(0..n-1) on a worker pool. Work is claimed by index, so any result
/// keyed by index is independent of the thread count.
template <class Fn>
void parallel_for(std::size_t n, std::size_t threads, const Fn& fn) {
  threads = std::max<std::size_t>(1, std::min(threads, n));
  if (threads == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (std::size_t w = 0; w < threads; ++w)
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= n) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

struct GlobalOptions {
  std::uint64_t seed = 1;
  std::size_t threads = default_threads();
  std::string out_dir = ".";
  bool plot = false;
};

/// Output files accumulated in memory; written atomically only on success so
/// a failing run leaves no partial outputs behind.
struct RunOutput {
  std::vector<std::pair<std::string, std::string>> files;  // name -> content
  json config = json::object();
  std::string summary;

  void add(std::string name, std::string content) {
    files.emplace_back(std::move(name), std::move(content));
  }
};

// ---------------------------------------------------------------------------
// front

struct FrontArgs {
  std::size_t N = 1000;
  double a = 0.5;
  std::size_t steps = 500;
  std::size_t replicas = 100;
};

RunOutput run_front(const FrontArgs& args, const GlobalOptions& g) {
  const bfl::ModelParams params{args.N, args.a};
  params.validate();
  if (args.steps < 1) throw std::invalid_argument("front: --steps must be >= 1");
  if (args.replicas < 1)
    throw std::invalid_argument("front: --replicas must be >= 1");

  std::vector<std::vector<bfl::StepRecord>> results(args.replicas);
  parallel_for(args.replicas, g.threads, [&](std::size_t r) {
    bfl::RngStream rng(g.seed, r);
    results[r] = bfl::simulate_front(params, std::vector<double>(args.N, 0.0),
                                     args.steps, rng);
  });

  bfl::CsvWriter csv({"replica", "step", "x_eq", "max", "min", "zeta"});
  for (std::size_t r = 0; r < args.replicas; ++r)
    for (const auto& rec : results[r])
      csv.row(r, rec.generation, rec.x_eq, rec.max, rec.min, rec.zeta);

  RunOutput out;
  out.add("front.csv", csv.content());
  out.config = {{"command", "front"}, {"N", args.N},       {"a", args.a},
                {"steps", args.steps}, {"replicas", args.replicas}};
  if (g.plot) {
    bfl::PlotSpec spec;
    spec.title = "front trajectory (replica 0)";
    spec.xlabel = "step";
    spec.ylabel = "position";
    bfl::PlotSeries xeq{"x_eq", {}}, mx{"max", {}}, mn{"min", {}};
    for (const auto& rec : results[0]) {
      xeq.points.emplace_back(double(rec.generation), rec.x_eq);
      mx.points.emplace_back(double(rec.generation), rec.max);
      mn.points.emplace_back(double(rec.generation), rec.min);
    }
    spec.series = {xeq, mx, mn};
    out.add("front.svg", bfl::render_svg(spec));
  }
  out.summary = "front: " + std::to_string(args.replicas) + " replicas x " +
                std::to_string(args.steps) + " steps";
  return out;
}

// ---------------------------------------------------------------------------
// xi-check

struct XiCheckArgs {
  std::size_t N = 50;
  double a = 0.75;
  std::size_t samples = 10000;
};

RunOutput run_xi_check(const XiCheckArgs& args, const GlobalOptions& g) {
  const bfl::ModelParams params{args.N, args.a};
  params.validate();
  if (args.samples < 2)
    throw std::invalid_argument("xi-check: --samples must be >= 2");

  std::vector<double> zeta(args.samples), identity(args.samples);
  bfl::RngStream rng_zeta(g.seed, 0), rng_id(g.seed, 1);
  for (auto& z : zeta) z = bfl::sample_zeta(params, rng_zeta);
  for (auto& v : identity) {
    const double zn = bfl::sample_zN(args.N, rng_id);
    const std::vector<double> e = bfl::sample_exponentials(args.N, rng_id);
    std::vector<double> scaled(args.N);
    for (std::size_t j = 0; j < args.N; ++j) scaled[j] = args.a * e[j];
    v = args.a * zn + bfl::log_sum_exp(scaled);
  }
  const bfl::KsResult ks = bfl::ks_two_sample(zeta, identity);

  double mean_zeta = 0.0, mean_id = 0.0;
  for (double z : zeta) mean_zeta += z;
  for (double v : identity) mean_id += v;
  mean_zeta /= double(args.samples);
  mean_id /= double(args.samples);

  bfl::CsvWriter csv({"name", "N", "a", "value"});
  csv.row("ks_statistic", args.N, args.a, ks.statistic);
  csv.row("ks_p_value", args.N, args.a, ks.p_value);
  csv.row("mc_mean_zeta", args.N, args.a, mean_zeta);
  csv.row("mc_mean_identity", args.N, args.a, mean_id);
  if (args.a > 0.0 && args.a < 1.0)
    csv.row("analytic_mean_xi", args.N, args.a,
            bfl::analytic_mean_xi(args.N, args.a));

  RunOutput out;
  out.add("analytic.csv", csv.content());
  out.config = {{"command", "xi-check"},
                {"N", args.N},
                {"a", args.a},
                {"samples", args.samples}};
  if (g.plot) {
    std::vector<double> qa = zeta, qb = identity;
    std::sort(qa.begin(), qa.end());
    std::sort(qb.begin(), qb.end());
    bfl::PlotSpec spec;
    spec.title = "increment law vs. distributional identity (QQ)";
    spec.xlabel = "zeta quantile";
    spec.ylabel = "identity quantile";
    bfl::PlotSeries qq{"quantiles", {}}, diag{"y = x", {}};
    const std::size_t step = std::max<std::size_t>(1, args.samples / 400);
    for (std::size_t i = 0; i < args.samples; i += step)
      qq.points.emplace_back(qa[i], qb[i]);
    diag.points.emplace_back(qa.front(), qa.front());
    diag.points.emplace_back(qa.back(), qa.back());
    spec.series = {qq, diag};
    out.add("xi_check.svg", bfl::render_svg(spec));
  }
  out.summary = "xi-check: KS statistic " + bfl::format_number(ks.statistic) +
                ", p " + bfl::format_number(ks.p_value);
  return out;
}

// ---------------------------------------------------------------------------
// genealogy

struct GenealogyArgs {
  std::size_t N = 100;
  double a = 0.75;
  std::string mode = "pair";
  std::size_t sample = 8;
  std::size_t horizon = 0;  // 0 -> auto
  std::size_t replicas = 10000;
};

RunOutput run_genealogy(const GenealogyArgs& args, const GlobalOptions& g) {
  const bfl::ModelParams params{args.N, args.a};
  params.validate();
  if (args.N < 2) throw std::invalid_argument("genealogy: --N must be >= 2");
  if (args.replicas < 1)
    throw std::invalid_argument("genealogy: --replicas must be >= 1");

  RunOutput out;
  if (args.mode == "pair") {
    std::vector<std::uint64_t> times(args.replicas);
    parallel_for(args.replicas, g.threads, [&](std::size_t r) {
      bfl::RngStream rng(g.seed, r);
      times[r] = bfl::pair_coalescence_time(params, rng);
    });
    bfl::CsvWriter csv({"replica", "pair_time"});
    for (std::size_t r = 0; r < args.replicas; ++r) csv.row(r, times[r]);
    out.add("genealogy.csv", csv.content());
    if (g.plot) {
      std::vector<std::uint64_t> sorted = times;
      std::sort(sorted.begin(), sorted.end());
      bfl::PlotSpec spec;
      spec.title = "pair coalescence time survival";
      spec.xlabel = "generations";
      spec.ylabel = "P(T > t)";
      spec.log_y = true;
      bfl::PlotSeries surv{"empirical", {}};
      for (std::size_t i = 0; i + 1 < sorted.size();
           i += std::max<std::size_t>(1, sorted.size() / 200)) {
        const double p = 1.0 - double(i) / double(sorted.size());
        surv.points.emplace_back(double(sorted[i]), p);
      }
      spec.series = {surv};
      out.add("genealogy.svg", bfl::render_svg(spec));
    }
    double mean = 0.0;
    for (auto t : times) mean += double(t);
    out.summary = "genealogy: mean pair time " +
                  bfl::format_number(mean / double(args.replicas));
  } else if (args.mode == "blocks") {
    if (args.sample < 1 || args.sample > args.N)
      throw std::invalid_argument("genealogy: need 1 <= --sample <= N");
    std::size_t horizon = args.horizon;
    if (horizon == 0) {
      const double ts = args.a > 0.0
                            ? bfl::theoretical_timescale(args.N, args.a)
                            : double(args.N);
      horizon = std::max<std::size_t>(100, std::size_t(10.0 * ts));
    }
    std::vector<std::vector<std::size_t>> counts(args.replicas);
    parallel_for(args.replicas, g.threads, [&](std::size_t r) {
      bfl::RngStream rng(g.seed, r);
      const auto path =
          bfl::simulate_ancestral_process(params, args.sample, horizon, rng);
      counts[r].reserve(path.size());
      for (const auto& p : path) counts[r].push_back(p.block_count());
    });
    bfl::CsvWriter csv({"replica", "step", "block_count"});
    for (std::size_t r = 0; r < args.replicas; ++r)
      for (std::size_t s = 0; s < counts[r].size(); ++s)
        csv.row(r, s, counts[r][s]);
    out.add("genealogy.csv", csv.content());
    if (g.plot) {
      bfl::PlotSpec spec;
      spec.title = "mean ancestral block count";
      spec.xlabel = "backward generation";
      spec.ylabel = "blocks";
      bfl::PlotSeries mean_series{"mean", {}};
      for (std::size_t s = 0; s <= horizon; ++s) {
        double m = 0.0;
        for (std::size_t r = 0; r < args.replicas; ++r) m += double(counts[r][s]);
        mean_series.points.emplace_back(double(s), m / double(args.replicas));
      }
      spec.series = {mean_series};
      out.add("genealogy.svg", bfl::render_svg(spec));
    }
    out.summary = "genealogy: block-count paths over " +
                  std::to_string(horizon) + " generations";
  } else {
    throw std::invalid_argument("genealogy: --mode must be pair or blocks");
  }
  out.config = {{"command", "genealogy"}, {"N", args.N},
                {"a", args.a},           {"mode", args.mode},
                {"sample", args.sample},  {"horizon", args.horizon},
                {"replicas", args.replicas}};
  return out;
}

// ---------------------------------------------------------------------------
// scaling

struct ScalingArgs {
  double a = 2.0 / 3.0;
  std::vector<std::size_t> n_list = {64, 128, 256, 512, 1024, 2048, 4096};
  std::size_t replicas = 20000;
};

RunOutput run_scaling(const ScalingArgs& args, const GlobalOptions& g) {
  if (args.n_list.empty())
    throw std::invalid_argument("scaling: --N-list must be nonempty");
  for (std::size_t n : args.n_list) {
    const bfl::ModelParams params{n, args.a};
    params.validate();
    if (n < 2) throw std::invalid_argument("scaling: every N must be >= 2");
  }
  if (args.replicas < 2)
    throw std::invalid_argument("scaling: --replicas must be >= 2");

  struct Row {
    double mean = 0.0, se = 0.0, c_hat = 0.0;
  };
  std::vector<Row> rows(args.n_list.size());
  parallel_for(args.n_list.size(), g.threads, [&](std::size_t i) {
    const bfl::ModelParams params{args.n_list[i], args.a};
    const std::uint64_t base = std::uint64_t(i) * (args.replicas + 2);
    const auto times = bfl::pair_coalescence_times_common_env(
        params, args.replicas, g.seed, base);
    double sum = 0.0, sumsq = 0.0;
    for (auto t : times) {
      sum += double(t);
      sumsq += double(t) * double(t);
    }
    const double n = double(times.size());
    rows[i].mean = sum / n;
    const double var =
        std::max(0.0, (sumsq - n * rows[i].mean * rows[i].mean) / (n - 1.0));
    rows[i].se = std::sqrt(var / n);
    bfl::RngStream crng(g.seed, base + args.replicas + 1);
    rows[i].c_hat = bfl::estimate_cN(params, args.replicas, crng).first;
  });

  bfl::CsvWriter csv({"N", "mean_pair_time", "se", "c_N_hat"});
  std::vector<std::pair<double, double>> points;
  for (std::size_t i = 0; i < args.n_list.size(); ++i) {
    csv.row(args.n_list[i], rows[i].mean, rows[i].se, rows[i].c_hat);
    points.emplace_back(double(args.n_list[i]), rows[i].mean);
  }

  RunOutput out;
  out.add("scaling.csv", csv.content());
  out.config = {{"command", "scaling"},
                {"a", args.a},
                {"N_list", args.n_list},
                {"replicas", args.replicas}};
  if (points.size() >= 3) {
    const bfl::FitResult fit = bfl::fit_power_law(points);
    out.summary = "fitted exponent ≈ " + bfl::format_number(fit.slope);
  } else {
    out.summary = "scaling: fewer than 3 N values, no exponent fit";
  }
  if (g.plot) {
    bfl::PlotSpec spec;
    spec.title = "mean pair coalescence time vs N";
    spec.xlabel = "N";
    spec.ylabel = "mean pair time";
    spec.log_x = true;
    spec.log_y = true;
    spec.series = {{"mean pair time", points}};
    out.add("scaling.svg", bfl::render_svg(spec));
  }
  return out;
}

// ---------------------------------------------------------------------------
// coalescent-ref

struct CoalescentRefArgs {
  double a = 0.75;
  double alpha = 0.0;  // > 0 overrides a
  double beta = 0.0;
  std::size_t n = 8;
  double horizon = 10.0;
  std::size_t replicas = 10000;
};

RunOutput run_coalescent_ref(const CoalescentRefArgs& args,
                             const GlobalOptions& g) {
  bfl::LambdaMeasure measure;
  if (args.alpha > 0.0 || args.beta > 0.0)
    measure = bfl::LambdaMeasure::beta(args.alpha, args.beta);
  else
    measure = bfl::LambdaMeasure::from_pulling_parameter(args.a);
  if (args.n < 1)
    throw std::invalid_argument("coalescent-ref: --n must be >= 1");
  if (!(args.horizon > 0.0))
    throw std::invalid_argument("coalescent-ref: --horizon must be > 0");
  if (args.replicas < 1)
    throw std::invalid_argument("coalescent-ref: --replicas must be >= 1");

  std::vector<bfl::BlockCountPath> paths(args.replicas);
  parallel_for(args.replicas, g.threads, [&](std::size_t r) {
    bfl::RngStream rng(g.seed, r);
    paths[r] = bfl::simulate_block_counting(measure, args.n, args.horizon, rng);
  });

  bfl::CsvWriter csv({"replica", "time", "block_count"});
  for (std::size_t r = 0; r < args.replicas; ++r) {
    csv.row(r, 0.0, args.n);
    for (const auto& [t, b] : paths[r].events) csv.row(r, t, b);
  }

  RunOutput out;
  out.add("ref.csv", csv.content());
  out.config = {{"command", "coalescent-ref"}, {"a", args.a},
                {"alpha", args.alpha},         {"beta", args.beta},
                {"n", args.n},                 {"horizon", args.horizon},
                {"replicas", args.replicas}};
  if (g.plot) {
    bfl::PlotSpec spec;
    spec.title = "reference coalescent mean block count";
    spec.xlabel = "time";
    spec.ylabel = "blocks";
    bfl::PlotSeries mean_series{"mean", {}};
    for (int i = 0; i <= 50; ++i) {
      const double t = args.horizon * double(i) / 50.0;
      double m = 0.0;
      for (const auto& p : paths) m += double(p.count_at(t, args.n));
      mean_series.points.emplace_back(t, m / double(args.replicas));
    }
    spec.series = {mean_series};
    out.add("ref.svg", bfl::render_svg(spec));
  }
  out.summary = "coalescent-ref: " + std::to_string(args.replicas) +
                " block-counting paths";
  return out;
}

// ---------------------------------------------------------------------------
// analytic

struct AnalyticArgs {
  std::vector<std::size_t> n_list = {10, 100, 1000};
  std::vector<double> a_list = {0.25, 0.5, 0.75};
};

RunOutput run_analytic(const AnalyticArgs& args, const GlobalOptions&) {
  if (args.n_list.empty() || args.a_list.empty())
    throw std::invalid_argument("analytic: --N-list and --a-list nonempty");
  for (double a : args.a_list)
    if (!(a > 0.0 && a < 1.0))
      throw std::invalid_argument("analytic: every a must be in (0,1)");
  for (std::size_t n : args.n_list)
    if (n < 1) throw std::invalid_argument("analytic: every N must be >= 1");

  bfl::CsvWriter csv({"name", "N", "a", "value"});
  std::vector<std::pair<double, double>> mean_points;
  for (double a : args.a_list)
    for (std::size_t n : args.n_list) {
      const double exact = bfl::analytic_mean_xi(n, a);
      csv.row("analytic_mean_xi", n, a, exact);
      csv.row("asymptotic_mean_xi", n, a, bfl::asymptotic_mean_xi(n, a));
      csv.row("jn_prime0", n, a, bfl::compute_jn_prime0(n, a));
      const auto [limit_max, limit_min] = bfl::front_position_limits(a);
      csv.row("limit_max_minus_logN", n, a, limit_max);
      csv.row("limit_min", n, a, limit_min);
      if (n >= 2)
        csv.row("timescale", n, a, bfl::theoretical_timescale(n, a));
      mean_points.emplace_back(double(n), exact);
    }

  RunOutput out;
  out.add("analytic.csv", csv.content());
  out.config = {{"command", "analytic"},
                {"N_list", args.n_list},
                {"a_list", args.a_list}};
  out.summary = "analytic: " + std::to_string(args.n_list.size()) + " x " +
                std::to_string(args.a_list.size()) + " grid";
  return out;
}

// ---------------------------------------------------------------------------
// bou

struct BouArgs {
  std::vector<double> gamma_list = {2.0};
  std::vector<std::size_t> n_list = {10, 20, 50, 100, 200};
  double horizon = 0.0;
  std::size_t pair_samples = 4096;
  std::size_t replicas = 2;
};

RunOutput run_bou(const BouArgs& args, const GlobalOptions& g) {
  if (args.gamma_list.empty() || args.n_list.empty())
    throw std::invalid_argument("bou: --gamma-list and --N-list nonempty");
  if (args.replicas < 1)
    throw std::invalid_argument("bou: --replicas must be >= 1");
  std::vector<bfl::BOUConfig> configs;
  for (double gamma : args.gamma_list)
    for (std::size_t n : args.n_list) {
      bfl::BOUConfig cfg;
      cfg.N = n;
      cfg.gamma_pull = gamma;
      cfg.horizon = args.horizon;
      cfg.pair_samples = args.pair_samples;
      cfg.validate();
      configs.push_back(cfg);
    }

  const std::size_t runs = configs.size() * args.replicas;
  std::vector<bfl::BouResult> results(runs);
  parallel_for(runs, g.threads, [&](std::size_t i) {
    bfl::RngStream rng(g.seed, i);
    results[i] = bou_run(configs[i / args.replicas], rng);
  });

  bfl::CsvWriter csv({"gamma", "N", "avg_mrca_age", "se", "censored_fraction"});
  std::vector<bfl::PlotSeries> series;
  std::size_t p = 0;
  bool warned = false;
  for (double gamma : args.gamma_list) {
    bfl::PlotSeries s{"gamma = " + bfl::format_number(gamma), {}};
    for (std::size_t n : args.n_list) {
      double age = 0.0, cens = 0.0, se = 0.0;
      for (std::size_t r = 0; r < args.replicas; ++r) {
        const auto& res = results[p * args.replicas + r];
        age += res.avg_mrca_age;
        cens += res.censored_fraction;
        warned = warned || res.horizon_warning;
      }
      age /= double(args.replicas);
      cens /= double(args.replicas);
      if (args.replicas > 1) {
        double ss = 0.0;
        for (std::size_t r = 0; r < args.replicas; ++r) {
          const double d = results[p * args.replicas + r].avg_mrca_age - age;
          ss += d * d;
        }
        se = std::sqrt(ss / double(args.replicas - 1) / double(args.replicas));
      } else {
        se = results[p * args.replicas].standard_error;
      }
      csv.row(gamma, n, age, se, cens);
      s.points.emplace_back(double(n), age);
      ++p;
    }
    series.push_back(std::move(s));
  }

  RunOutput out;
  out.add("bou.csv", csv.content());
  out.config = {{"command", "bou"},
                {"gamma_list", args.gamma_list},
                {"N_list", args.n_list},
                {"horizon", args.horizon},
                {"pair_samples", args.pair_samples},
                {"replicas", args.replicas}};
  if (g.plot) {
    bfl::PlotSpec spec;
    spec.title = "average MRCA age vs N";
    spec.xlabel = "N";
    spec.ylabel = "avg MRCA age";
    spec.log_x = true;
    spec.log_y = true;
    spec.series = std::move(series);
    out.add("bou.svg", bfl::render_svg(spec));
  }
  out.summary = warned ? "bou: done (horizon warning: high censoring on some runs)"
                       : "bou: done";
  return out;
}

// ---------------------------------------------------------------------------

void write_outputs(RunOutput& out, const GlobalOptions& g,
                   const std::string& started_at) {
  const fs::path dir(g.out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw bfl::IoError("cannot create output directory " + dir.string());

  std::vector<fs::path> written;
  try {
    json manifest;
    manifest["version"] = kVersion;
    manifest["config"] = out.config;
    manifest["config"]["seed"] = g.seed;
    manifest["config"]["threads"] = g.threads;
    manifest["config"]["out_dir"] = g.out_dir;
    manifest["config"]["plot"] = g.plot;
    manifest["started_at"] = started_at;
    manifest["outputs"] = json::object();
    for (const auto& [name, content] : out.files) {
      const fs::path path = dir / name;
      bfl::write_file_atomic(path, content);
      written.push_back(path);
      manifest["outputs"][name] = {{"checksum_fnv1a", bfl::fnv1a_hex(content)},
                                   {"bytes", content.size()}};
    }
    manifest["finished_at"] = timestamp_utc();
    bfl::write_file_atomic(dir / "manifest.json", manifest.dump(2) + "\n");
  } catch (...) {
    for (const auto& path : written) {
      std::error_code rm;
      fs::remove(path, rm);
    }
    throw;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simulation and numerics for an exponential branching-selection "
               "particle system and its coalescent genealogies"};
  app.set_version_flag("--version", kVersion);
  app.set_config("--config", "", "key=value config file (flags take precedence)");
  app.require_subcommand(1);

  GlobalOptions g;
  app.add_option("--seed", g.seed, "master RNG seed")->capture_default_str();
  app.add_option("--threads", g.threads,
                 "worker threads (default: BFL_THREADS env or hardware)")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_option("--out-dir", g.out_dir, "output directory")
      ->capture_default_str();
  app.add_flag("--plot", g.plot, "emit an SVG chart per CSV");

  FrontArgs front_args;
  auto* front_cmd = app.add_subcommand("front", "simulate front trajectories");
  front_cmd->fallthrough();
  front_cmd->add_option("--N", front_args.N)->check(CLI::PositiveNumber);
  front_cmd->add_option("--a", front_args.a);
  front_cmd->add_option("--steps", front_args.steps)->check(CLI::PositiveNumber);
  front_cmd->add_option("--replicas", front_args.replicas)
      ->check(CLI::PositiveNumber);

  XiCheckArgs xi_args;
  auto* xi_cmd = app.add_subcommand(
      "xi-check", "test the increment law against its distributional identity");
  xi_cmd->fallthrough();
  xi_cmd->add_option("--N", xi_args.N)->check(CLI::PositiveNumber);
  xi_cmd->add_option("--a", xi_args.a);
  xi_cmd->add_option("--samples", xi_args.samples)->check(CLI::PositiveNumber);

  GenealogyArgs gen_args;
  auto* gen_cmd =
      app.add_subcommand("genealogy", "backward-in-time ancestral sampling");
  gen_cmd->fallthrough();
  gen_cmd->add_option("--N", gen_args.N)->check(CLI::PositiveNumber);
  gen_cmd->add_option("--a", gen_args.a);
  gen_cmd->add_option("--mode", gen_args.mode, "pair or blocks")
      ->check(CLI::IsMember({"pair", "blocks"}));
  gen_cmd->add_option("--sample", gen_args.sample)->check(CLI::PositiveNumber);
  gen_cmd->add_option("--horizon", gen_args.horizon);
  gen_cmd->add_option("--replicas", gen_args.replicas)
      ->check(CLI::PositiveNumber);

  ScalingArgs scaling_args;
  auto* scaling_cmd = app.add_subcommand(
      "scaling", "pair coalescence timescale across population sizes");
  scaling_cmd->fallthrough();
  scaling_cmd->add_option("--a", scaling_args.a);
  scaling_cmd->add_option("--N-list", scaling_args.n_list)->delimiter(',');
  scaling_cmd->add_option("--replicas", scaling_args.replicas)
      ->check(CLI::PositiveNumber);

  CoalescentRefArgs ref_args;
  auto* ref_cmd = app.add_subcommand(
      "coalescent-ref", "reference Lambda-coalescent block counting");
  ref_cmd->fallthrough();
  ref_cmd->add_option("--a", ref_args.a);
  ref_cmd->add_option("--alpha", ref_args.alpha, "Beta alpha' (overrides --a)");
  ref_cmd->add_option("--beta", ref_args.beta, "Beta beta' (overrides --a)");
  ref_cmd->add_option("--n", ref_args.n)->check(CLI::PositiveNumber);
  ref_cmd->add_option("--horizon", ref_args.horizon);
  ref_cmd->add_option("--replicas", ref_args.replicas)
      ->check(CLI::PositiveNumber);

  AnalyticArgs analytic_args;
  auto* analytic_cmd =
      app.add_subcommand("analytic", "closed-form and quadrature values");
  analytic_cmd->fallthrough();
  analytic_cmd->add_option("--N-list", analytic_args.n_list)->delimiter(',');
  analytic_cmd->add_option("--a-list", analytic_args.a_list)->delimiter(',');

  BouArgs bou_args;
  auto* bou_cmd = app.add_subcommand(
      "bou", "branching Ornstein-Uhlenbeck MRCA age measurement");
  bou_cmd->fallthrough();
  bou_cmd->add_option("--gamma-list", bou_args.gamma_list)->delimiter(',');
  bou_cmd->add_option("--N-list", bou_args.n_list)->delimiter(',');
  bou_cmd->add_option("--horizon", bou_args.horizon);
  bou_cmd->add_option("--pair-samples", bou_args.pair_samples)
      ->check(CLI::PositiveNumber);
  bou_cmd->add_option("--replicas", bou_args.replicas)
      ->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  const std::string started_at = timestamp_utc();
  try {
    RunOutput out;
    if (*front_cmd)
      out = run_front(front_args, g);
    else if (*xi_cmd)
      out = run_xi_check(xi_args, g);
    else if (*gen_cmd)
      out = run_genealogy(gen_args, g);
    else if (*scaling_cmd)
      out = run_scaling(scaling_args, g);
    else if (*ref_cmd)
      out = run_coalescent_ref(ref_args, g);
    else if (*analytic_cmd)
      out = run_analytic(analytic_args, g);
    else if (*bou_cmd)
      out = run_bou(bou_args, g);

    write_outputs(out, g, started_at);
    if (!out.summary.empty()) std::cout << out.summary << "\n";
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid config: " << e.what() << "\n";
    return 2;
  } catch (const bfl::QuadratureError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const bfl::IoError& e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return 4;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
