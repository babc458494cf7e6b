#include "pwdlab/harness.hpp"

#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>

namespace pwdlab {

std::string format_double(double v) {
  if (std::isnan(v)) return "NA";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::uint64_t trial_seed(std::uint64_t master, std::size_t trial) {
  return derive_seed(master, {stream::trial, trial});
}

ReportRow run_trial(const ScenarioSpec& spec, const TargetModel& target, PipelineKind pipeline,
                    std::size_t trial, std::uint64_t seed, bool timing) {
  const auto start = std::chrono::steady_clock::now();
  DrawBudget budget(spec.params.draw_budget);
  GenOracle gen(target, &budget);
  PipelineResult res;
  switch (pipeline) {
    case PipelineKind::forward: res = forward_learn(gen, spec.params, seed); break;
    case PipelineKind::reverse: res = reverse_learn(gen, spec.params, seed); break;
    case PipelineKind::direct: res = direct_learn(gen, spec.params, seed); break;
  }
  ReportRow row;
  row.scenario = spec.name;
  row.trial = trial;
  row.seed = seed;
  row.pipeline = std::string(to_string(pipeline));
  row.err_T = model_error(target, res.chosen).value;
  row.err_h = classification_error(target.c, res.chosen.hypothesis, target.context_dist);
  row.kl0 = kl_divergence(target.p0, res.chosen.q0);
  row.kl1 = kl_divergence(target.p1, res.chosen.q1);
  row.chosen_provenance = std::string(to_string(res.chosen_provenance.tag));
  row.draws_used = budget.used();
  row.success = row.err_T <= spec.params.epsilon;
  if (timing)
    row.runtime_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return row;
}

std::vector<ReportRow> run_experiment(const ScenarioSpec& spec, const RunOptions& options) {
  const std::size_t trials = options.trials.value_or(spec.trials);
  const std::uint64_t master = options.seed.value_or(spec.seed);
  const PipelineKind pipeline = options.pipeline.value_or(spec.pipeline);
  const TargetModel target = build_target(spec);
  std::vector<std::optional<ReportRow>> rows(trials);

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t t = next++; t < trials; t = next++) {
      try {
        rows[t] = run_trial(spec, target, pipeline, t, trial_seed(master, t), options.timing);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = trials;
      }
    }
  };
  const std::size_t workers = std::max<std::size_t>(1, std::min(options.workers, trials));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);
  std::vector<ReportRow> out;
  out.reserve(trials);
  for (auto& r : rows) out.push_back(std::move(*r));
  return out;
}

double success_fraction(const std::vector<ReportRow>& rows) {
  if (rows.empty()) return 0.0;
  std::size_t ok = 0;
  for (const auto& r : rows) ok += r.success;
  return static_cast<double>(ok) / static_cast<double>(rows.size());
}

std::string report_header() {
  return std::string(kReportSchema) +
         ",scenario,trial,seed,pipeline,err_T,err_h,kl0,kl1,chosen_provenance,draws_used,runtime_ms,success";
}

std::string format_row(const ReportRow& r) {
  std::ostringstream os;
  os << "1," << r.scenario << ',' << r.trial << ',' << r.seed << ',' << r.pipeline << ','
     << format_double(r.err_T) << ',' << format_double(r.err_h) << ',' << format_double(r.kl0) << ','
     << format_double(r.kl1) << ',' << r.chosen_provenance << ',' << r.draws_used << ','
     << (r.runtime_ms ? format_double(*r.runtime_ms) : "NA") << ',' << (r.success ? 1 : 0);
  return os.str();
}

std::string to_csv(const std::vector<ReportRow>& rows) {
  std::string out = report_header() + "\n";
  for (const auto& r : rows) out += format_row(r) + "\n";
  return out;
}

std::vector<EventRow> event_table(const ScenarioSpec& spec) {
  const TargetModel target = build_target(spec);
  const OutcomeShape& shape = target.p0.shape();
  const BoundednessBudget mb = BoundednessBudget::for_shape(shape, spec.params.gaussian_m_cap);
  const double gamma = spec.params.gamma > 0.0
                           ? spec.params.gamma
                           : default_gamma(mb.m_cap, spec.params.m_p, spec.params.epsilon);
  const EventClass cls = enumerate_event_class(shape, gamma, mb);
  std::vector<EventRow> rows;
  for (std::size_t i = 0; i < cls.events.size(); ++i) {
    const Event& e = cls.events[i];
    EventRow row;
    row.event_id = i;
    row.kind = std::string(to_string(e.kind()));
    row.j = e.coordinate() + 1;
    row.t = e.kind() == EventKind::coordinate_equals ? static_cast<double>(e.symbol()) : e.threshold();
    row.sep_exact =
        std::abs(event_probability_exact(target.p0, e) - event_probability_exact(target.p1, e));
    row.sep_bound = cls.xi_bound;
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string events_csv(const std::vector<EventRow>& rows) {
  std::ostringstream os;
  os << "event_id,kind,j,t,sep_exact,sep_bound\n";
  for (const auto& r : rows)
    os << r.event_id << ',' << r.kind << ',' << r.j << ',' << format_double(r.t) << ','
       << format_double(r.sep_exact) << ',' << format_double(r.sep_bound) << '\n';
  return os.str();
}

std::size_t workers_from_env() {
  const char* raw = std::getenv("PWDLAB_WORKERS");
  if (raw == nullptr || *raw == '\0') return 1;
  std::size_t value = 0;
  const char* end = raw + std::char_traits<char>::length(raw);
  const auto res = std::from_chars(raw, end, value);
  if (res.ec != std::errc() || res.ptr != end || value == 0)
    throw ConfigError("PWDLAB_WORKERS", "expected a positive integer, got '" + std::string(raw) + "'");
  return value;
}

}  // namespace pwdlab
