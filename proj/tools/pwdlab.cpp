// pwdlab command line: run / forward / reverse / events / verify.
#include <CLI11.hpp>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "pwdlab/harness.hpp"
#include "pwdlab/scenario.hpp"
#include "pwdlab/verify.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kAssertFailed = 1;
constexpr int kUsage = 2;

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> trials;
  std::string out;
  bool assert_ = false;
  bool verbose = false;
  bool timing = false;
};

void add_common(CLI::App* cmd, Common& c, bool needs_config) {
  auto* cfg = cmd->add_option("--config", c.config, "scenario JSON file");
  if (needs_config) cfg->required()->check(CLI::ExistingFile);
  cmd->add_option("--seed", c.seed, "master seed (overrides the config)");
  cmd->add_option("--trials", c.trials, "number of trials (overrides the config)")->check(CLI::PositiveNumber);
  cmd->add_option("--out", c.out, "output path (default stdout)");
  cmd->add_flag("--assert", c.assert_, "exit 1 when the acceptance threshold is missed");
  cmd->add_flag("--verbose", c.verbose, "progress and summary on stderr");
  cmd->add_flag("--timing", c.timing, "record wall-clock runtimes in the output");
}

void emit(const std::string& text, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw pwdlab::ConfigError("--out", "cannot open '" + path + "' for writing");
  f << text;
  if (!f) throw pwdlab::ConfigError("--out", "write to '" + path + "' failed");
}

int run_pipeline(const Common& c, std::optional<pwdlab::PipelineKind> pipeline) {
  const pwdlab::ScenarioSpec spec = pwdlab::load_scenario(c.config);
  pwdlab::RunOptions opts;
  opts.trials = c.trials;
  opts.seed = c.seed;
  opts.pipeline = pipeline;
  opts.workers = pwdlab::workers_from_env();
  opts.timing = c.timing;
  if (c.verbose)
    std::cerr << "scenario " << spec.name << ": " << opts.trials.value_or(spec.trials) << " trials, "
              << opts.workers << " worker(s)\n";
  const auto rows = pwdlab::run_experiment(spec, opts);
  emit(pwdlab::to_csv(rows), c.out);
  const double frac = pwdlab::success_fraction(rows);
  if (c.verbose) {
    for (const auto& r : rows)
      std::cerr << "  trial " << r.trial << ": err_T=" << r.err_T << " via " << r.chosen_provenance
                << (r.success ? "" : "  FAIL") << '\n';
    std::cerr << "success fraction " << frac << " (required " << spec.min_success << ")\n";
  }
  if (c.assert_ && frac < spec.min_success) {
    std::cerr << "assertion failed: success fraction " << frac << " < " << spec.min_success << '\n';
    return kAssertFailed;
  }
  return kOk;
}

int run_events(const Common& c) {
  const pwdlab::ScenarioSpec spec = pwdlab::load_scenario(c.config);
  const auto rows = pwdlab::event_table(spec);
  emit(pwdlab::events_csv(rows), c.out);
  std::size_t separating = 0;
  for (const auto& r : rows) separating += r.sep_exact >= r.sep_bound;
  if (c.verbose)
    std::cerr << rows.size() << " events, " << separating << " meet the class separation bound\n";
  if (c.assert_ && separating == 0) {
    std::cerr << "assertion failed: no event reaches the class separation bound\n";
    return kAssertFailed;
  }
  return kOk;
}

int run_verify(const Common& c, const std::string& which, double scale) {
  pwdlab::VerifyOptions opts;
  if (c.seed) opts.seed = *c.seed;
  opts.scale = scale;
  opts.timing = c.timing;
  const auto results = pwdlab::run_suites(which, opts);
  emit(pwdlab::suites_json(results, opts), c.out);
  bool all = true;
  for (const auto& r : results) {
    all = all && r.passed;
    if (c.verbose) std::cerr << (r.passed ? "PASS " : "FAIL ") << r.name << '\n';
  }
  if (c.assert_ && !all) {
    std::cerr << "assertion failed: at least one suite failed\n";
    return kAssertFailed;
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pwdlab: learning with distributions lab"};
  app.require_subcommand(1);

  Common run_c, fwd_c, rev_c, ev_c, ver_c;
  auto* run = app.add_subcommand("run", "run the scenario's pipeline, CSV report");
  add_common(run, run_c, true);
  auto* fwd = app.add_subcommand("forward", "run the forward pipeline on a scenario");
  add_common(fwd, fwd_c, true);
  auto* rev = app.add_subcommand("reverse", "run the reverse pipeline on a scenario");
  add_common(rev, rev_c, true);
  auto* ev = app.add_subcommand("events", "list the scenario's event class with exact separations");
  add_common(ev, ev_c, true);
  auto* ver = app.add_subcommand("verify", "run property suites, JSON report");
  add_common(ver, ver_c, false);
  std::string which = "all";
  double scale = 1.0;
  ver->add_option("suite", which, "suite name or 'all'");
  ver->add_option("--scale", scale, "trial count multiplier")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*run) return run_pipeline(run_c, std::nullopt);
    if (*fwd) return run_pipeline(fwd_c, pwdlab::PipelineKind::forward);
    if (*rev) return run_pipeline(rev_c, pwdlab::PipelineKind::reverse);
    if (*ev) return run_events(ev_c);
    if (*ver) return run_verify(ver_c, which, scale);
  } catch (const pwdlab::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kUsage;
  } catch (const pwdlab::BudgetExhausted& e) {
    std::cerr << "draw budget exhausted: " << e.what() << '\n';
    return kUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid parameters: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  }
  return kUsage;
}
