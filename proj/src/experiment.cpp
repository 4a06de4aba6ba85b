#include "ncbcast/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "ncbcast/analytic.hpp"
#include "ncbcast/random.hpp"

namespace ncbcast {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::uint64_t parse_count(std::string_view text) {
  std::uint64_t value = 0;
  const char* end = text.data() + text.size();
  const auto res = std::from_chars(text.data(), end, value);
  if (res.ec == std::errc{} && res.ptr == end) return value;
  // Accept forms such as 1e6.
  const double d = parse_number(text);
  if (!(d >= 0.0) || d != std::floor(d) || d > 1.8e19) {
    throw std::invalid_argument("expected a non-negative integer, got '" + std::string(text) + "'");
  }
  return static_cast<std::uint64_t>(d);
}

template <typename T>
std::string join(const std::vector<T>& values) {
  std::string out;
  for (const auto& v : values) {
    if (!out.empty()) out += ';';
    if constexpr (std::is_same_v<T, std::string>) {
      out += v;
    } else if constexpr (std::is_same_v<T, double>) {
      out += format_number(v);
    } else if constexpr (std::is_integral_v<T>) {
      out += format_number(static_cast<std::uint64_t>(v));
    } else {
      out += std::string(to_string(v));
    }
  }
  return out;
}

// Sum of per-run counters; averages are then taken over the pooled counts.
void pool(Metrics& into, const Metrics& m) {
  auto add_hist = [](std::vector<std::uint64_t>& a, const std::vector<std::uint64_t>& b) {
    if (a.size() < b.size()) a.resize(b.size(), 0);
    for (std::size_t i = 0; i < b.size(); ++i) a[i] += b[i];
  };
  into.receivers = m.receivers;
  into.slots += m.slots;
  into.added += m.added;
  into.transmissions += m.transmissions;
  into.uncoded_directives += m.uncoded_directives;
  into.delivered += m.delivered;
  into.delay_sum += m.delay_sum;
  add_hist(into.state_occupancy, m.state_occupancy);
  add_hist(into.leader_occupancy, m.leader_occupancy);
  add_hist(into.coded_count, m.coded_count);
  add_hist(into.cycle_length, m.cycle_length);
  add_hist(into.deliverable_slots, m.deliverable_slots);
  add_hist(into.coefficient_deliveries, m.coefficient_deliveries);
  for (std::size_t i = 0; i < 3; ++i) {
    into.delivery_events[i] += m.delivery_events[i];
    into.delivered_packets[i] += m.delivered_packets[i];
    for (std::size_t j = 0; j < 3; ++j) into.joint_moves[i][j] += m.joint_moves[i][j];
  }
  if (into.lambda_est.empty()) into.lambda_est = m.lambda_est;
  into.rlnc_draws += m.rlnc_draws;
  into.rlnc_max_draws = std::max(into.rlnc_max_draws, m.rlnc_max_draws);
  into.violations.innovation += m.violations.innovation;
  into.violations.lemma2 += m.violations.lemma2;
  into.violations.markov_mismatch += m.violations.markov_mismatch;
  into.violations.prefix_regression += m.violations.prefix_regression;
  into.violations.zero_state += m.violations.zero_state;
  into.violations.leader_flush += m.violations.leader_flush;
  into.violations.dynamic_metric += m.violations.dynamic_metric;
}

struct Job {
  SimConfig config;
  std::uint64_t point = 0;  // seed index; shared by jobs that should see the same randomness
};

// Runs every job `repetitions` times and pools the repetitions.
std::vector<Metrics> execute(const ExperimentSpec& spec, const std::vector<Job>& jobs) {
  std::vector<SimConfig> configs;
  configs.reserve(jobs.size() * spec.repetitions);
  for (const auto& job : jobs) {
    for (std::uint64_t rep = 0; rep < spec.repetitions; ++rep) {
      SimConfig c = job.config;
      c.seed = point_seed(spec, rep, job.point);
      configs.push_back(c);
    }
  }
  const auto results = run_many(configs);
  std::vector<Metrics> pooled(jobs.size());
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    for (std::uint64_t rep = 0; rep < spec.repetitions; ++rep) {
      pool(pooled[i], results[i * spec.repetitions + rep]);
    }
  }
  return pooled;
}

SimConfig base_config(const ExperimentSpec& spec) {
  SimConfig c;
  c.receivers = spec.receivers.front();
  c.mu = spec.mu.front();
  c.coding = spec.coding.front();
  c.rate.scheme = spec.rate.front();
  c.rate.lambda = spec.lambda.front();
  c.rate.threshold_slots = spec.threshold.front();
  c.rate.weight = spec.weight.front();
  c.field_exponent = spec.field_exponent.front();
  c.delivery_mode = spec.delivery.front();
  c.horizon = spec.horizon;
  c.record_lambda_series = false;
  return c;
}

SimConfig baseline(const ExperimentSpec& spec, unsigned receivers, double lambda,
                   CodingScheme coding, DeliveryMode mode) {
  SimConfig c = base_config(spec);
  c.receivers = receivers;
  c.coding = coding;
  c.rate.scheme = RateScheme::baseline;
  c.rate.lambda = lambda;
  c.delivery_mode = mode;
  return c;
}

CsvTable table(std::vector<std::string> header) {
  CsvTable t;
  t.header = std::move(header);
  return t;
}

void push(CsvTable& t, CsvRow row) { t.rows.push_back(row.take()); }

// Receiver-independent delivery-cycle distribution, cumulative in T.
std::vector<OutputTable> fig2(const ExperimentSpec& spec) {
  CsvTable t = table({"lambda", "mu", "rho", "T", "probability", "cumulative"});
  for (double mu : spec.mu) {
    for (double lambda : spec.lambda) {
      const ChainParams c{lambda, mu};
      const auto P = cycle_probabilities(c, spec.t_max);
      double cumulative = 0.0;
      for (std::uint64_t T = 1; T <= spec.t_max; ++T) {
        cumulative += P[T - 1];
        push(t, CsvRow() << lambda << mu << c.rho() << T << P[T - 1] << cumulative);
      }
    }
  }
  return {{"fig2.csv", std::move(t)}};
}

std::vector<OutputTable> fig3(const ExperimentSpec& spec) {
  std::vector<Job> jobs;
  std::uint64_t point = 0;
  for (double mu : spec.mu) {
    for (double lambda : spec.lambda) {
      SimConfig c = baseline(spec, spec.receivers.front(), lambda, spec.coding.front(),
                             DeliveryMode::zero_state_only);
      c.mu = mu;
      jobs.push_back({c, point++});
    }
  }
  const auto metrics = execute(spec, jobs);

  CsvTable sim = table({"lambda", "mu", "delay"});
  CsvTable consistent = sim;
  CsvTable printed = sim;
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    const double lambda = jobs[i].config.rate.lambda;
    const double mu = jobs[i].config.mu;
    const ChainParams c{lambda, mu};
    push(sim, CsvRow() << lambda << mu << metrics[i].mean_delay());
    push(consistent, CsvRow() << lambda << mu
                              << zero_state_delay_estimate(c, spec.t_max,
                                                           DelayDenominator::consistent));
    push(printed, CsvRow() << lambda << mu
                           << zero_state_delay_estimate(c, spec.t_max,
                                                        DelayDenominator::as_printed));
  }
  return {{"fig3_sim.csv", std::move(sim)},
          {"fig3_analytic.csv", std::move(consistent)},
          {"fig3_analytic_printed.csv", std::move(printed)}};
}

// Leader (best receiver) state occupancy against the independent model.
std::vector<OutputTable> fig5(const ExperimentSpec& spec) {
  std::vector<Job> jobs;
  for (unsigned R : spec.receivers) {
    jobs.push_back({baseline(spec, R, spec.lambda.front(), spec.coding.front(),
                             DeliveryMode::full),
                    0});
  }
  const auto metrics = execute(spec, jobs);
  CsvTable sim = table({"receivers", "lambda", "mu", "k", "probability"});
  CsvTable model = sim;
  const ChainParams c{spec.lambda.front(), spec.mu.front()};
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    const unsigned R = jobs[i].config.receivers;
    const auto& hist = metrics[i].leader_occupancy;
    const double slots = static_cast<double>(metrics[i].slots);
    for (std::uint64_t k = 0; k < 20; ++k) {
      const double observed = k < hist.size() ? static_cast<double>(hist[k]) / slots : 0.0;
      push(sim, CsvRow() << R << c.lambda << c.mu << k << observed);
      push(model, CsvRow() << R << c.lambda << c.mu << k << leader_state_model(c, R, k));
    }
  }
  return {{"fig5_sim.csv", std::move(sim)}, {"fig5_model.csv", std::move(model)}};
}

// Zero-and-leader delay per receiver count, plus the zero-state-only curve.
std::vector<OutputTable> fig6(const ExperimentSpec& spec) {
  std::vector<Job> jobs;
  std::vector<std::string> series;
  for (std::size_t li = 0; li < spec.lambda.size(); ++li) {
    const double lambda = spec.lambda[li];
    for (unsigned R : spec.receivers) {
      jobs.push_back({baseline(spec, R, lambda, spec.coding.front(),
                               DeliveryMode::zero_and_leader_only),
                      li});
      series.push_back("leader_R" + std::to_string(R));
    }
    jobs.push_back({baseline(spec, spec.receivers.back(), lambda, spec.coding.front(),
                             DeliveryMode::zero_state_only),
                    li});
    series.push_back("zero");
  }
  const auto metrics = execute(spec, jobs);
  CsvTable t = table({"series", "receivers", "lambda", "delay"});
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    push(t, CsvRow() << series[i] << jobs[i].config.receivers << jobs[i].config.rate.lambda
                     << metrics[i].mean_delay());
  }
  return {{"fig6.csv", std::move(t)}};
}

std::vector<OutputTable> fig7(const ExperimentSpec& spec) {
  std::vector<Job> jobs;
  for (CodingScheme coding : spec.coding) {
    jobs.push_back({baseline(spec, spec.receivers.front(), spec.lambda.front(), coding,
                             DeliveryMode::full),
                    0});
  }
  const auto metrics = execute(spec, jobs);
  CsvTable t = table({"coding", "s_star", "deliverable", "delivered", "probability",
                      "rlnc_formula"});
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    const unsigned M = 1u << jobs[i].config.resolved_field_exponent();
    for (const auto& p : coefficient_delivery_profile(metrics[i])) {
      push(t, CsvRow() << to_string(jobs[i].config.coding) << p.s_star << p.deliverable
                       << p.delivered << p.probability
                       << rlnc_delivery_probability(M, p.s_star));
    }
  }
  return {{"fig7.csv", std::move(t)}};
}

std::vector<OutputTable> fig8(const ExperimentSpec& spec) {
  std::vector<Job> jobs;
  std::vector<std::string> series;
  const unsigned R = spec.receivers.front();
  for (std::size_t li = 0; li < spec.lambda.size(); ++li) {
    const double lambda = spec.lambda[li];
    for (CodingScheme coding : spec.coding) {
      jobs.push_back({baseline(spec, R, lambda, coding, DeliveryMode::full), li});
      series.emplace_back(to_string(coding));
    }
    jobs.push_back({baseline(spec, R, lambda, CodingScheme::scheme_b,
                             DeliveryMode::zero_and_leader_only),
                    li});
    series.emplace_back("leader");
    jobs.push_back({baseline(spec, R, lambda, CodingScheme::scheme_b,
                             DeliveryMode::zero_state_only),
                    li});
    series.emplace_back("zero");
  }
  const auto metrics = execute(spec, jobs);
  CsvTable t = table({"series", "lambda", "delay"});
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    push(t, CsvRow() << series[i] << jobs[i].config.rate.lambda << metrics[i].mean_delay());
  }
  return {{"fig8.csv", std::move(t)}};
}

// Distribution of the number of packets coded into a transmission; idle
// slots (nothing to send) count as zero.
std::vector<OutputTable> fig9(const ExperimentSpec& spec) {
  std::vector<Job> jobs;
  for (unsigned R : spec.receivers) {
    jobs.push_back({baseline(spec, R, spec.lambda.front(), spec.coding.front(),
                             DeliveryMode::full),
                    0});
  }
  const auto metrics = execute(spec, jobs);
  CsvTable t = table({"receivers", "coded", "probability"});
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    const Metrics& m = metrics[i];
    const double slots = static_cast<double>(m.slots);
    push(t, CsvRow() << jobs[i].config.receivers << std::uint64_t{0}
                     << static_cast<double>(m.slots - m.transmissions) / slots);
    for (std::size_t n = 1; n < m.coded_count.size(); ++n) {
      push(t, CsvRow() << jobs[i].config.receivers << static_cast<std::uint64_t>(n)
                       << static_cast<double>(m.coded_count[n]) / slots);
    }
  }
  return {{"fig9.csv", std::move(t)}};
}

std::vector<OutputTable> fig10(const ExperimentSpec& spec) {
  std::vector<Job> jobs;
  std::vector<double> params;
  for (unsigned R : spec.receivers) {
    SimConfig c = base_config(spec);
    c.receivers = R;
    c.delivery_mode = DeliveryMode::full;
    for (double lambda : spec.lambda) {
      c.rate.scheme = RateScheme::baseline;
      c.rate.lambda = lambda;
      jobs.push_back({c, 0});
      params.push_back(lambda);
    }
    for (std::uint64_t td : spec.threshold) {
      c.rate.scheme = RateScheme::delay_threshold;
      c.rate.threshold_slots = td;
      jobs.push_back({c, 0});
      params.push_back(static_cast<double>(td));
    }
    for (double f : spec.weight) {
      c.rate.scheme = RateScheme::dynamic;
      c.rate.weight = f;
      jobs.push_back({c, 0});
      params.push_back(f);
    }
  }
  const auto metrics = execute(spec, jobs);
  std::vector<OutputTable> out;
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    const std::string file = "fig10_R" + std::to_string(jobs[i].config.receivers) + ".csv";
    if (out.empty() || out.back().file != file) {
      out.push_back({file, table({"scheme", "param", "throughput", "delay"})});
    }
    push(out.back().table, CsvRow() << to_string(jobs[i].config.rate.scheme) << params[i]
                                    << metrics[i].throughput() << metrics[i].mean_delay());
  }
  return out;
}

std::vector<OutputTable> fig11(const ExperimentSpec& spec) {
  std::vector<Job> jobs;
  for (double f : spec.weight) {
    SimConfig c = base_config(spec);
    c.rate.scheme = RateScheme::dynamic;
    c.rate.weight = f;
    c.delivery_mode = DeliveryMode::full;
    c.record_lambda_series = true;
    jobs.push_back({c, 0});
  }
  const auto metrics = execute(spec, jobs);
  const std::uint64_t stride = std::max<std::uint64_t>(1, spec.horizon / 1000);
  CsvTable t = table({"f", "slot", "lambda_est"});
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    const auto& series = metrics[i].lambda_est;
    for (std::uint64_t s = stride; s <= series.size(); s += stride) {
      push(t, CsvRow() << jobs[i].config.rate.weight << s << series[s - 1]);
    }
  }
  return {{"fig11.csv", std::move(t)}};
}

}  // namespace

void ExperimentSpec::validate() const {
  if (receivers.empty() || mu.empty() || coding.empty() || rate.empty() || lambda.empty() ||
      threshold.empty() || weight.empty() || field_exponent.empty() || delivery.empty()) {
    throw std::invalid_argument("every parameter grid needs at least one value");
  }
  if (repetitions < 1) throw std::invalid_argument("repetitions must be at least 1");
  if (t_max < 2) throw std::invalid_argument("t_max must be at least 2");
  for (unsigned R : receivers) {
    if (R < 1) throw std::invalid_argument("receivers must be at least 1");
  }
  for (double m : mu) {
    if (!(m >= 0.0 && m <= 1.0)) throw std::invalid_argument("mu must lie in [0, 1]");
  }
  for (double l : lambda) {
    if (!(l >= 0.0 && l <= 1.0)) throw std::invalid_argument("lambda must lie in [0, 1]");
  }
  for (auto td : threshold) {
    if (td < 1) throw std::invalid_argument("T_D must be at least 1");
  }
  for (double f : weight) {
    if (!(f > 0.0)) throw std::invalid_argument("f must be positive");
  }
  for (unsigned m : field_exponent) {
    if (m > FieldContext::kMaxExponent) throw std::invalid_argument("field exponent above 8");
  }
}

ExperimentSpec figure_spec(std::string_view name) {
  ExperimentSpec s;
  s.name = std::string(name);
  if (name == "custom") return s;
  s.out = ".";
  if (name == "fig2") {
    s.lambda = {0.1, 0.3, 0.5, 0.7};
    s.t_max = 1000;
  } else if (name == "fig3") {
    s.receivers = {1};
    s.lambda = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7};
    s.horizon = 1'000'000;
  } else if (name == "fig5") {
    s.receivers = {2, 4, 8};
    s.lambda = {0.7};
    s.horizon = 1'000'000;
  } else if (name == "fig6") {
    s.receivers = {1, 2, 4, 10};
    s.lambda = {0.3, 0.4, 0.5, 0.6, 0.7};
    s.coding = {CodingScheme::scheme_a};
  } else if (name == "fig7") {
    s.coding = {CodingScheme::scheme_a, CodingScheme::scheme_b, CodingScheme::rlnc};
    s.lambda = {0.7};
    s.horizon = 1'000'000;
  } else if (name == "fig8") {
    s.coding = {CodingScheme::scheme_a, CodingScheme::scheme_b, CodingScheme::rlnc};
    s.lambda = {0.3, 0.4, 0.5, 0.6, 0.7, 0.75};
  } else if (name == "fig9") {
    s.receivers = {4, 8};
    s.lambda = {0.7};
  } else if (name == "fig10") {
    s.receivers = {4, 8};
    s.lambda = {0.5, 0.55, 0.6, 0.65, 0.7, 0.75};
    s.threshold = {2, 3, 5, 10, 20, 50, 100};
    s.weight = {2, 5, 10, 20, 50, 100, 200, 500};
    s.horizon = 200'000;
  } else if (name == "fig11") {
    s.weight = {2, 10, 100, 500};
    s.rate = {RateScheme::dynamic};
  } else {
    throw std::invalid_argument("unknown experiment '" + std::string(name) + "'");
  }
  return s;
}

void SpecBuilder::set(std::string_view key, std::string_view value) {
  key = trim(key);
  value = trim(value);
  // Scalars: the last assignment wins.
  if (key == "horizon") {
    spec_.horizon = parse_count(value);
    return;
  }
  if (key == "seed") {
    spec_.seed = parse_count(value);
    return;
  }
  if (key == "reps" || key == "repetitions") {
    spec_.repetitions = parse_count(value);
    return;
  }
  if (key == "t_max") {
    spec_.t_max = parse_count(value);
    return;
  }
  if (key == "out") {
    spec_.out = std::string(value);
    return;
  }
  if (key == "name" || key == "experiment") {
    spec_.name = std::string(value);
    return;
  }

  const std::string canonical = key == "threshold" ? "td" : key == "weight" ? "f"
                                : key == "field_exponent" ? "field_exp"
                                : key == "delivery" ? "delivery_mode"
                                                     : std::string(key);
  const bool first = std::find(touched_.begin(), touched_.end(), canonical) == touched_.end();
  if (first) touched_.push_back(canonical);

  auto each = [&](auto& grid, auto parse) {
    if (first) grid.clear();
    std::string_view rest = value;
    while (true) {
      const auto comma = rest.find(',');
      const auto item = trim(rest.substr(0, comma));
      if (item.empty()) throw std::invalid_argument("empty value for '" + canonical + "'");
      grid.push_back(parse(item));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
  };

  if (canonical == "receivers") {
    each(spec_.receivers, [](std::string_view v) { return static_cast<unsigned>(parse_count(v)); });
  } else if (canonical == "mu") {
    each(spec_.mu, parse_number);
  } else if (canonical == "coding") {
    each(spec_.coding, parse_coding_scheme);
  } else if (canonical == "rate") {
    each(spec_.rate, parse_rate_scheme);
  } else if (canonical == "lambda") {
    each(spec_.lambda, parse_number);
  } else if (canonical == "td") {
    each(spec_.threshold, parse_count);
  } else if (canonical == "f") {
    each(spec_.weight, parse_number);
  } else if (canonical == "field_exp") {
    each(spec_.field_exponent,
         [](std::string_view v) { return static_cast<unsigned>(parse_count(v)); });
  } else if (canonical == "delivery_mode") {
    each(spec_.delivery, parse_delivery_mode);
  } else {
    throw std::invalid_argument("unknown setting '" + std::string(key) + "'");
  }
}

void SpecBuilder::load_text(std::string_view text) {
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw std::invalid_argument("line " + std::to_string(line_no) + ": expected key=value");
    }
    try {
      set(line.substr(0, eq), line.substr(eq + 1));
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
}

void SpecBuilder::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  load_text(buf.str());
}

unsigned worker_count() {
  if (const char* env = std::getenv("NCBCAST_WORKERS")) {
    unsigned n = 0;
    const std::string_view text(env);
    const auto res = std::from_chars(text.data(), text.data() + text.size(), n);
    if (res.ec == std::errc{} && n > 0) return n;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::vector<Metrics> run_many(const std::vector<SimConfig>& configs, unsigned workers) {
  for (const auto& c : configs) c.validate();
  std::vector<Metrics> results(configs.size());
  if (workers == 0) workers = worker_count();
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, configs.size()));

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    for (std::size_t i = next++; i < configs.size(); i = next++) {
      try {
        results[i] = run(configs[i]);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);
  return results;
}

std::uint64_t point_seed(const ExperimentSpec& spec, std::uint64_t run, std::uint64_t point) {
  return child_seed(spec.seed, run, point);
}

CsvTable sweep_table(const ExperimentSpec& spec) {
  spec.validate();
  // The seed index ignores the coding and delivery-mode axes so that those
  // alternatives are compared on common random numbers.
  std::vector<Job> jobs;
  std::vector<double> params;
  std::uint64_t point = 0;
  for (unsigned R : spec.receivers) {
    for (double mu : spec.mu) {
      for (unsigned m : spec.field_exponent) {
        for (RateScheme rate : spec.rate) {
          std::vector<double> values;
          if (rate == RateScheme::baseline) values = spec.lambda;
          if (rate == RateScheme::delay_threshold) {
            for (auto td : spec.threshold) values.push_back(static_cast<double>(td));
          }
          if (rate == RateScheme::dynamic) values = spec.weight;
          for (double v : values) {
            for (CodingScheme coding : spec.coding) {
              for (DeliveryMode mode : spec.delivery) {
                SimConfig c = base_config(spec);
                c.receivers = R;
                c.mu = mu;
                c.field_exponent = m;
                c.coding = coding;
                c.delivery_mode = mode;
                c.rate.scheme = rate;
                if (rate == RateScheme::baseline) c.rate.lambda = v;
                if (rate == RateScheme::delay_threshold) {
                  c.rate.threshold_slots = static_cast<std::uint64_t>(v);
                }
                if (rate == RateScheme::dynamic) c.rate.weight = v;
                jobs.push_back({c, point});
                params.push_back(v);
              }
            }
            ++point;
          }
        }
      }
    }
  }

  std::vector<SimConfig> configs;
  for (const auto& job : jobs) {
    for (std::uint64_t rep = 0; rep < spec.repetitions; ++rep) {
      SimConfig c = job.config;
      c.seed = point_seed(spec, rep, job.point);
      configs.push_back(c);
    }
  }
  const auto results = run_many(configs);

  CsvTable t = table({"point", "rep", "seed", "receivers", "mu", "coding", "rate", "param",
                      "field_exp", "delivery_mode", "horizon", "throughput", "delay",
                      "added_rate", "uncoded_fraction", "violations"});
  for (std::size_t i = 0; i < configs.size(); ++i) {
    const SimConfig& c = configs[i];
    const Metrics& m = results[i];
    push(t, CsvRow() << jobs[i / spec.repetitions].point << static_cast<std::uint64_t>(
                                                                 i % spec.repetitions)
                     << c.seed << c.receivers << c.mu << to_string(c.coding)
                     << to_string(c.rate.scheme) << params[i / spec.repetitions]
                     << c.resolved_field_exponent() << to_string(c.delivery_mode) << c.horizon
                     << m.throughput() << m.mean_delay() << m.added_rate()
                     << m.uncoded_fraction() << m.violations.total());
  }
  return t;
}

CsvTable analytic_table(const ExperimentSpec& spec) {
  spec.validate();
  const ChainParams c{spec.lambda.front(), spec.mu.front()};
  const unsigned R = spec.receivers.front();
  const unsigned m = spec.field_exponent.front() != 0 ? spec.field_exponent.front()
                                                      : FieldContext::exponent_for_receivers(R);
  CsvTable t = table({"quantity", "index", "value"});
  auto row = [&](std::string_view q, std::uint64_t i, double v) { push(t, CsvRow() << q << i << v); };
  row("p", 0, c.p());
  row("q", 0, c.q());
  row("rho", 0, c.rho());
  for (std::uint64_t T = 1; T <= 20; ++T) row("cycle_probability", T, cycle_probability(c, T));
  row("cycle_mass", spec.t_max, expected_cycle_mass(c, spec.t_max));
  for (std::uint64_t s = 1; s <= 8; ++s) {
    row("rlnc_delivery_probability", s, rlnc_delivery_probability(1u << m, s));
  }
  if (c.lambda < c.mu) {
    for (std::uint64_t k = 0; k <= 20; ++k) row("stationary", k, stationary(c, k));
    for (std::uint64_t k = 0; k <= 20; ++k) row("leader_state", k, leader_state_model(c, R, k));
    for (std::uint64_t k = 0; k <= 20; ++k) {
      row("expected_time_to_zero", k, expected_time_to_zero(k, c.lambda, c.mu));
    }
    row("zero_state_delay_printed", spec.t_max,
        zero_state_delay_estimate(c, spec.t_max, DelayDenominator::as_printed));
    row("zero_state_delay_consistent", spec.t_max,
        zero_state_delay_estimate(c, spec.t_max, DelayDenominator::consistent));
    row("decision_threshold", R, undelivered_threshold(c.lambda, spec.weight.front(), R, c.mu));
  }
  return t;
}

std::vector<OutputTable> build_experiment(const ExperimentSpec& spec) {
  spec.validate();
  const std::string& n = spec.name;
  if (n == "fig2") return fig2(spec);
  if (n == "fig3") return fig3(spec);
  if (n == "fig5") return fig5(spec);
  if (n == "fig6") return fig6(spec);
  if (n == "fig7") return fig7(spec);
  if (n == "fig8") return fig8(spec);
  if (n == "fig9") return fig9(spec);
  if (n == "fig10") return fig10(spec);
  if (n == "fig11") return fig11(spec);
  if (n == "custom") return {{"custom.csv", sweep_table(spec)}};
  throw std::invalid_argument("unknown experiment '" + n + "'");
}

std::vector<std::string> run_experiment(const ExperimentSpec& spec) {
  auto tables = build_experiment(spec);
  std::filesystem::create_directories(spec.out);
  std::vector<std::string> paths;
  for (const auto& t : tables) {
    const auto path = (std::filesystem::path(spec.out) / t.file).string();
    write_csv_file(path, t.table);
    paths.push_back(path);
  }
  return paths;
}

bool CompareReport::all_pass() const {
  return std::all_of(rows.begin(), rows.end(), [](const CompareRow& r) { return r.pass; });
}

CsvTable CompareReport::to_table() const {
  CsvTable t = table({"key", "simulated", "analytic", "relative_error", "pass"});
  for (const auto& r : rows) {
    push(t, CsvRow() << r.key << r.simulated << r.analytic << r.relative_error
                     << (r.pass ? "yes" : "no"));
  }
  return t;
}

CompareReport compare(const CsvTable& simulated, const CsvTable& analytic, double tolerance) {
  if (simulated.header != analytic.header) {
    throw std::runtime_error("headers differ: '" + join(simulated.header) + "' vs '" +
                             join(analytic.header) + "'");
  }
  if (simulated.header.empty()) throw std::runtime_error("empty CSV");
  const std::size_t value = simulated.header.size() - 1;
  auto key_of = [&](const std::vector<std::string>& row) {
    std::string key;
    for (std::size_t i = 0; i < value; ++i) {
      if (i) key += ';';
      key += simulated.header[i] + "=" + row[i];
    }
    return key;
  };

  std::map<std::string, double> reference;
  for (const auto& row : analytic.rows) {
    if (!reference.emplace(key_of(row), parse_number(row[value])).second) {
      throw std::runtime_error("duplicate key " + key_of(row));
    }
  }
  if (reference.size() != simulated.rows.size()) {
    throw std::runtime_error("key sets differ: " + std::to_string(simulated.rows.size()) +
                             " vs " + std::to_string(reference.size()) + " rows");
  }
  CompareReport report;
  for (const auto& row : simulated.rows) {
    const std::string key = key_of(row);
    const auto it = reference.find(key);
    if (it == reference.end()) throw std::runtime_error("no analytic row for " + key);
    CompareRow r;
    r.key = key;
    r.simulated = parse_number(row[value]);
    r.analytic = it->second;
    const double diff = std::abs(r.simulated - r.analytic);
    r.relative_error = r.analytic != 0.0 ? diff / std::abs(r.analytic) : diff;
    r.pass = r.relative_error <= tolerance;
    report.rows.push_back(std::move(r));
  }
  return report;
}

}  // namespace ncbcast
