// SPDX-License-Identifier: Apache-2.0
#include <CLI11.hpp>
#include <chrono>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "blr/gmjmcmc.hpp"
#include "blr/ingest.hpp"
#include "blr/parallel.hpp"
#include "blr/report.hpp"
#include "blr/run_config.hpp"
#include "blr/simbench.hpp"

namespace {

using namespace blr;
using Clock = std::chrono::steady_clock;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Common {
  std::string config;
  std::vector<std::string> overrides;
  std::string prior = "jeffreys";
  std::uint64_t seed = 1;
  std::size_t chains = 4;
  double threshold = 0.5;
  std::string out = ".";
  std::size_t threads = 0;
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("--config", c.config, "key = value file with tuning parameters");
  app->add_option("--set", c.overrides, "override one tuning parameter, e.g. --set M_fin=5000");
  app->add_option("--prior", c.prior, "jeffreys or robust_g")->capture_default_str();
  app->add_option("--seed", c.seed, "master seed")->capture_default_str();
  app->add_option("--chains", c.chains, "independent chains per analysis")->capture_default_str();
  app->add_option("--threshold", c.threshold, "detection threshold on inclusion probability")->capture_default_str();
  app->add_option("--out", c.out, "output directory")->capture_default_str();
  app->add_option("--threads", c.threads, "worker threads (default: BLR_THREADS or all cores)");
}

GmjmcmcConfig resolve(GmjmcmcConfig base, const Common& c) {
  try {
    if (!c.config.empty()) apply_config_file(base, c.config);
    for (const auto& kv : c.overrides) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw std::invalid_argument("--set expects key=value, got '" + kv + "'");
      set_config_value(base, kv.substr(0, eq), kv.substr(eq + 1));
    }
    base.prior = parse_prior(c.prior);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  base.seed = c.seed;
  base.chains = c.chains;
  if (!(c.threshold > 0.0 && c.threshold < 1.0)) throw UsageError("--threshold must lie in (0, 1)");
  return base;
}

void check(const GmjmcmcConfig& cfg, std::size_t m) {
  try {
    cfg.validate(m);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

std::string out_path(const Common& c, const std::string& file) {
  std::filesystem::create_directories(c.out);
  return (std::filesystem::path(c.out) / file).string();
}

void write_timing(const Common& c, const std::string& command, Clock::time_point start) {
  const double secs = std::chrono::duration<double>(Clock::now() - start).count();
  const nlohmann::json t{{"command", command}, {"wall_clock_seconds", secs}, {"threads", resolve_threads(c.threads)}};
  write_file(out_path(c, "timing.json"), t.dump(2) + "\n");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayesian logic regression with GMJMCMC"};
  app.require_subcommand(1);

  Common an_c;
  std::string input, response, family = "gaussian";
  bool trace = false;
  auto* analyze = app.add_subcommand("analyze", "fit a CSV dataset and report detected trees");
  analyze->add_option("--input", input, "CSV file with a header row")->required();
  analyze->add_option("--response", response, "response column name")->required();
  analyze->add_option("--family", family, "gaussian or binomial")->capture_default_str();
  analyze->add_flag("--trace-populations", trace, "include every generation's population in the report");
  add_common(analyze, an_c);

  Common be_c;
  int scen = 1;
  std::size_t reps = 20, n = 1000;
  std::uint32_t m_override = 0;
  auto* bench_cmd = app.add_subcommand("bench", "run a simulation scenario and report detection metrics");
  bench_cmd->add_option("--scenario", scen, "scenario 1-6")->capture_default_str();
  bench_cmd->add_option("--replicates", reps, "simulated datasets")->capture_default_str();
  bench_cmd->add_option("--n", n, "observations per dataset")->capture_default_str();
  bench_cmd->add_option("--m", m_override, "covariate count override");
  add_common(bench_cmd, be_c);

  Common sw_c;
  std::string axis = "beta4", grid = "1:10:10";
  std::size_t sw_reps = 10, sw_n = 1000;
  double beta4 = 7.0;
  std::uint32_t sw_m = 0;
  auto* sweep_cmd = app.add_subcommand("sweep", "power curve for the four-way tree of scenario 5");
  sweep_cmd->add_option("--axis", axis, "beta4, n or d")->capture_default_str();
  sweep_cmd->add_option("--grid", grid, "lo:hi:count or a comma list")->capture_default_str();
  sweep_cmd->add_option("--replicates", sw_reps, "replicates per grid point")->capture_default_str();
  sweep_cmd->add_option("--n", sw_n, "observations (when not sweeping n)")->capture_default_str();
  sweep_cmd->add_option("--beta4", beta4, "coefficient (when not sweeping beta4)")->capture_default_str();
  sweep_cmd->add_option("--m", sw_m, "covariate count override");
  add_common(sweep_cmd, sw_c);

  std::string sc_out;
  auto* sc_cmd = app.add_subcommand("scenarios", "print the built-in scenario definitions as JSON");
  sc_cmd->add_option("--out", sc_out, "write to this file instead of stdout");

  CLI11_PARSE(app, argc, argv);

  try {
    const auto start = Clock::now();
    if (*analyze) {
      GmjmcmcConfig cfg = resolve(GmjmcmcConfig{}, an_c);
      cfg.trace_populations = trace;
      Family fam;
      try {
        fam = parse_family(family);
      } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
      }
      IngestResult data = ingest_file(input, response, fam);
      for (const auto& w : data.warnings) std::cerr << "warning: " << w << '\n';
      check(cfg, data.data.m);
      const auto chains = run_chains(data.data, cfg, an_c.threads);
      const Aggregate agg = aggregate(chains);
      const auto det = detect(agg, an_c.threshold);
      AnalysisInfo info{input, response, fam, an_c.threshold, data.data.n, data.data.names, data.warnings};
      write_file(out_path(an_c, "detections.json"), analysis_json(info, cfg, chains, agg, det).dump(2) + "\n");
      write_file(out_path(an_c, "detections.csv"), detections_csv(det));
      write_timing(an_c, "analyze", start);
      for (const auto& d : det) std::cout << d.prob << '\t' << d.text << '\n';
    } else if (*bench_cmd) {
      const Scenario& s = scenario(scen);
      BenchOptions opts;
      opts.scenario = scen;
      opts.n = n;
      opts.replicates = reps;
      opts.cfg = resolve(GmjmcmcConfig::preset(s.tuning_row), be_c);
      opts.threshold = be_c.threshold;
      opts.threads = be_c.threads;
      opts.m = m_override;
      check(opts.cfg, m_override ? m_override : s.m);
      const BenchResult res = bench(opts);
      write_file(out_path(be_c, "metrics.json"), bench_json(opts, res).dump(2) + "\n");
      write_timing(be_c, "bench", start);
      std::cout << "overall power " << res.raw.overall_power << ", FP " << res.raw.fp_mean << ", FDR " << res.raw.fdr
                << ", WL " << res.raw.wl_total << '\n';
    } else if (*sweep_cmd) {
      SweepOptions opts;
      try {
        opts.axis = parse_axis(axis);
        opts.grid = parse_grid(grid);
      } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
      }
      opts.replicates = sw_reps;
      opts.n = sw_n;
      opts.beta4 = beta4;
      opts.cfg = resolve(SweepOptions::default_sweep_config(), sw_c);
      opts.threshold = sw_c.threshold;
      opts.threads = sw_c.threads;
      opts.m = sw_m;
      if (opts.axis != SweepAxis::PopulationSize) check(opts.cfg, sw_m ? sw_m : 50);
      const auto points = sweep(opts);
      write_file(out_path(sw_c, "curve.csv"), curve_csv(opts.axis, points));
      write_timing(sw_c, "sweep", start);
      std::cout << curve_csv(opts.axis, points);
    } else if (*sc_cmd) {
      const std::string text = scenarios_json().dump(2) + "\n";
      if (sc_out.empty())
        std::cout << text;
      else
        write_file(sc_out, text);
    }
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
