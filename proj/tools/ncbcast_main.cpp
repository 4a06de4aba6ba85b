// Command line front end: simulate, analyze, sweep, compare, reproduce.

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "ncbcast/csv.hpp"
#include "ncbcast/experiment.hpp"
#include "ncbcast/sim.hpp"

using namespace ncbcast;

namespace {

struct SpecFlags {
  std::string config;
  std::vector<std::string> receivers, mu, coding, rate, lambda, td, f, field_exp, delivery;
  std::optional<std::string> horizon, seed, reps, t_max, out;

  void attach(CLI::App* cmd, bool out_is_dir) {
    cmd->add_option("--config", config, "key=value file; repeated keys form grids")
        ->check(CLI::ExistingFile);
    cmd->add_option("--receivers,-R", receivers, "number of receivers R")->delimiter(',');
    cmd->add_option("--mu", mu, "channel success probability")->delimiter(',');
    cmd->add_option("--coding", coding, "a | b | rlnc")->delimiter(',');
    cmd->add_option("--rate", rate, "baseline | threshold | dynamic")->delimiter(',');
    cmd->add_option("--lambda", lambda, "baseline addition rate")->delimiter(',');
    cmd->add_option("--td", td, "delay-threshold age limit T_D")->delimiter(',');
    cmd->add_option("--f", f, "dynamic weighting factor")->delimiter(',');
    cmd->add_option("--field-exp", field_exp, "field exponent m (0 = smallest with 2^m >= R)")
        ->delimiter(',');
    cmd->add_option("--delivery-mode", delivery, "full | zero | zero-leader")->delimiter(',');
    cmd->add_option("--horizon", horizon, "slots per run");
    cmd->add_option("--seed", seed, "master seed");
    cmd->add_option("--reps", reps, "repetitions per grid point");
    cmd->add_option("--t-max", t_max, "truncation of the analytic sums");
    cmd->add_option("--out,-o", out, out_is_dir ? "output directory" : "output file (default stdout)");
  }

  ExperimentSpec build(ExperimentSpec base) const {
    SpecBuilder b(std::move(base));
    if (!config.empty()) b.load_file(config);
    b.new_layer();
    auto grid = [&](const char* key, const std::vector<std::string>& values) {
      for (const auto& v : values) b.set(key, v);
    };
    grid("receivers", receivers);
    grid("mu", mu);
    grid("coding", coding);
    grid("rate", rate);
    grid("lambda", lambda);
    grid("td", td);
    grid("f", f);
    grid("field_exp", field_exp);
    grid("delivery_mode", delivery);
    if (horizon) b.set("horizon", *horizon);
    if (seed) b.set("seed", *seed);
    if (reps) b.set("reps", *reps);
    if (t_max) b.set("t_max", *t_max);
    if (out) b.set("out", *out);
    return b.spec();
  }
};

// Writes to --out when given, else stdout.
void emit(const ExperimentSpec& spec, const SpecFlags& flags, const CsvTable& t) {
  if (flags.out) {
    write_csv_file(spec.out, t);
  } else {
    write_csv(std::cout, t);
  }
}

std::string trace_vector(const CodedVector& v) {
  std::string s;
  for (PacketIndex i = v.lowest(); i != 0 && i <= v.highest(); ++i) {
    if (v.at(i).is_zero()) continue;
    if (!s.empty()) s += ';';
    s += std::to_string(i) + ":" + std::to_string(v.at(i).value);
  }
  return s;
}

void write_trace(const SimConfig& config, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << "slot,added,uncoded,coded,effective,vector,received,states,deliveries\n";
  run(config, [&](const SlotTrace& t) {
    out << t.slot << ',' << t.added << ',' << t.uncoded_directive << ',' << t.coded_packet_count
        << ',' << t.effective_list_size << ',' << trace_vector(t.vector) << ',';
    for (bool r : t.received) out << (r ? '1' : '0');
    out << ',';
    for (std::size_t r = 0; r < t.markov_states.size(); ++r) {
      out << (r ? ";" : "") << t.markov_states[r];
    }
    out << ',';
    for (std::size_t i = 0; i < t.deliveries.size(); ++i) {
      const auto& d = t.deliveries[i];
      out << (i ? ";" : "") << d.receiver << ':' << d.first << '-' << d.last << ':'
          << to_string(d.kind);
    }
    out << '\n';
  });
  if (!out) throw std::runtime_error("error writing '" + path + "'");
}

CsvTable summary(const SimConfig& c, const Metrics& m) {
  CsvTable t;
  t.header = {"metric", "value"};
  auto row = [&](std::string_view k, auto v) { t.rows.push_back((CsvRow() << k << v).take()); };
  row("receivers", c.receivers);
  row("mu", c.mu);
  row("coding", to_string(c.coding));
  row("rate", to_string(c.rate.scheme));
  row("field_exp", c.resolved_field_exponent());
  row("delivery_mode", to_string(c.delivery_mode));
  row("seed", c.seed);
  row("slots", m.slots);
  row("added", m.added);
  row("throughput", m.throughput());
  row("delay", m.mean_delay());
  row("uncoded_fraction", m.uncoded_fraction());
  row("zero_state_deliveries", m.delivery_events[0]);
  row("leader_state_deliveries", m.delivery_events[1]);
  row("coefficient_deliveries", m.delivery_events[2]);
  row("rlnc_draws", m.rlnc_draws);
  row("violations_innovation", m.violations.innovation);
  row("violations_lemma2", m.violations.lemma2);
  row("violations_markov", m.violations.markov_mismatch);
  row("violations_prefix", m.violations.prefix_regression);
  row("violations_zero_state", m.violations.zero_state);
  row("violations_leader_flush", m.violations.leader_flush);
  row("violations_dynamic_metric", m.violations.dynamic_metric);
  return t;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Network-coded broadcast simulator and analysis toolkit"};
  app.require_subcommand(1);

  SpecFlags sim_flags, analyze_flags, sweep_flags, repro_flags;
  std::string trace_path;

  auto* simulate = app.add_subcommand("simulate", "run one simulation and print a summary");
  sim_flags.attach(simulate, false);
  simulate->add_option("--trace", trace_path, "write the per-slot trace to this CSV file");

  auto* analyze = app.add_subcommand("analyze", "print closed-form quantities");
  analyze_flags.attach(analyze, false);

  auto* sweep = app.add_subcommand("sweep", "simulate every grid point");
  sweep_flags.attach(sweep, false);

  std::string sim_csv, analytic_csv, report_path;
  double tolerance = 0.05;
  auto* cmp = app.add_subcommand("compare", "compare simulated and analytic CSV files");
  cmp->add_option("simulated", sim_csv)->required()->check(CLI::ExistingFile);
  cmp->add_option("analytic", analytic_csv)->required()->check(CLI::ExistingFile);
  cmp->add_option("--tol", tolerance, "relative tolerance")->check(CLI::NonNegativeNumber);
  cmp->add_option("--out,-o", report_path, "write the per-point report here");

  std::string figure;
  auto* reproduce = app.add_subcommand("reproduce", "write the CSV data behind a figure");
  reproduce->add_option("figure", figure, "fig2 fig3 fig5 fig6 fig7 fig8 fig9 fig10 fig11 custom")
      ->required();
  repro_flags.attach(reproduce, true);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*simulate) {
      const ExperimentSpec spec = sim_flags.build(figure_spec("custom"));
      spec.validate();
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
      c.seed = spec.seed;
      c.record_lambda_series = false;
      if (!trace_path.empty()) write_trace(c, trace_path);
      emit(spec, sim_flags, summary(c, run(c)));
    } else if (*analyze) {
      const ExperimentSpec spec = analyze_flags.build(figure_spec("custom"));
      emit(spec, analyze_flags, analytic_table(spec));
    } else if (*sweep) {
      const ExperimentSpec spec = sweep_flags.build(figure_spec("custom"));
      emit(spec, sweep_flags, sweep_table(spec));
    } else if (*cmp) {
      const CompareReport report =
          compare(read_csv_file(sim_csv), read_csv_file(analytic_csv), tolerance);
      const CsvTable t = report.to_table();
      if (!report_path.empty()) write_csv_file(report_path, t);
      write_csv(std::cout, t);
      const auto failed = std::count_if(report.rows.begin(), report.rows.end(),
                                        [](const CompareRow& r) { return !r.pass; });
      std::cerr << (report.rows.size() - failed) << "/" << report.rows.size()
                << " points within tolerance " << tolerance << "\n";
      return report.all_pass() ? 0 : 1;
    } else if (*reproduce) {
      const ExperimentSpec spec = repro_flags.build(figure_spec(figure));
      for (const auto& path : run_experiment(spec)) std::cout << path << "\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
