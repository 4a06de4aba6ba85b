#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "ncbcast/coding.hpp"
#include "ncbcast/csv.hpp"
#include "ncbcast/ratectrl.hpp"
#include "ncbcast/sim.hpp"

namespace ncbcast {

/// Parameter grids for a named experiment. Every list is a grid axis.
struct ExperimentSpec {
  std::string name = "custom";
  std::vector<unsigned> receivers{4};
  std::vector<double> mu{0.8};
  std::vector<CodingScheme> coding{CodingScheme::scheme_b};
  std::vector<RateScheme> rate{RateScheme::baseline};
  std::vector<double> lambda{0.5};
  std::vector<std::uint64_t> threshold{10};
  std::vector<double> weight{10.0};
  std::vector<unsigned> field_exponent{0};
  std::vector<DeliveryMode> delivery{DeliveryMode::full};
  std::uint64_t horizon = 100'000;
  std::uint64_t seed = 1;
  std::uint64_t repetitions = 1;
  std::uint64_t t_max = 1000;  // analytic truncation
  std::string out = ".";

  /// Throws std::invalid_argument on an empty grid or bad value.
  void validate() const;
};

inline constexpr std::string_view kFigureNames[] = {"fig2", "fig3", "fig5", "fig6", "fig7",
                                                    "fig8", "fig9", "fig10", "fig11"};

/// Grids and settings that reproduce a figure; "custom" gives the defaults.
/// Throws std::invalid_argument for an unknown name.
ExperimentSpec figure_spec(std::string_view name);

/// Applies one `key=value` setting. The first assignment to a key replaces
/// its default grid, later ones extend it; values may also be comma
/// separated. Throws std::invalid_argument for unknown keys or bad values.
class SpecBuilder {
 public:
  explicit SpecBuilder(ExperimentSpec base) : spec_(std::move(base)) {}

  void set(std::string_view key, std::string_view value);
  /// Reads `key = value` lines; '#' starts a comment.
  void load_file(const std::string& path);
  void load_text(std::string_view text);
  /// Forgets which keys were assigned, so the next assignment replaces the
  /// grid again (used when command line flags override a file).
  void new_layer() { touched_.clear(); }

  const ExperimentSpec& spec() const { return spec_; }

 private:
  ExperimentSpec spec_;
  std::vector<std::string> touched_;
};

struct OutputTable {
  std::string file;  // name inside the output directory
  CsvTable table;
};

/// Number of sweep workers: NCBCAST_WORKERS if set, else the hardware count.
unsigned worker_count();

/// Runs every config on a worker pool; results come back in input order.
std::vector<Metrics> run_many(const std::vector<SimConfig>& configs, unsigned workers = 0);

/// Seed for repetition `run` of grid point `point`.
std::uint64_t point_seed(const ExperimentSpec& spec, std::uint64_t run, std::uint64_t point);

/// Computes the tables for `spec` without touching the filesystem.
std::vector<OutputTable> build_experiment(const ExperimentSpec& spec);

/// Writes build_experiment(spec) into spec.out and returns the paths.
std::vector<std::string> run_experiment(const ExperimentSpec& spec);

/// One simulation summary row per grid point and repetition.
CsvTable sweep_table(const ExperimentSpec& spec);

/// Long-form analytic table for the first (lambda, mu, R) of the spec.
CsvTable analytic_table(const ExperimentSpec& spec);

struct CompareRow {
  std::string key;
  double simulated = 0.0;
  double analytic = 0.0;
  double relative_error = 0.0;
  bool pass = false;
};

struct CompareReport {
  std::vector<CompareRow> rows;
  bool all_pass() const;
  CsvTable to_table() const;
};

/// Matches rows on every column except the last, which holds the value.
/// Throws std::runtime_error when headers or key sets differ.
CompareReport compare(const CsvTable& simulated, const CsvTable& analytic, double tolerance);

}  // namespace ncbcast
