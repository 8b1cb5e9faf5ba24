#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qdarwin/spinstar.hpp"

namespace qdarwin::sweep {

enum class Quantity {
  qfi_closed,
  qfi_thermo,
  qfi_oracle,
  precision_finite,
  precision_thermo,
  coherence,
};

std::string_view to_string(Quantity quantity);
std::optional<Quantity> parse_quantity(std::string_view name);

enum class OutputFormat { csv, json };

struct SweepConfig {
  std::string name;
  std::vector<double> times;
  std::vector<double> fractions;     // converted to |F| = round_half_up(f * N)
  std::vector<int> fragment_sizes;   // used instead of fractions when non-empty
  std::vector<double> thetas;
  std::vector<double> qs;
  int n_env = 0;
  GaussianCouplingSpec ensemble;
  int realizations = 1;
  std::uint64_t master_seed = 1;
  std::vector<Quantity> quantities;
  std::string output_path;  // empty: stdout
  OutputFormat format = OutputFormat::csv;

  /// Throws ConfigError describing the first violated constraint.
  void validate() const;
};

/// One output record. realization == -1 flags an aggregate over realizations,
/// in which case `values` holds means and `stds` the sample standard
/// deviations; per-realization rows carry stds of zero.
struct SweepRow {
  int n_env = 0;
  double t = 0.0;
  double f = 0.0;
  int frag = 0;
  double theta = 0.0;
  double q = 0.0;
  long realization = 0;
  std::uint64_t seed = 0;
  std::vector<double> values;
  std::vector<double> stds;
  double tau_f = 0.0;
  double tau_y = 0.0;
  double sqrt_n = 0.0;
};

inline constexpr long kAggregateRow = -1;

struct SweepTable {
  std::vector<std::string> columns;  // one name per entry of SweepRow::values
  std::vector<SweepRow> rows;

  void append(const SweepTable& other);
};

/// |F| = round(f N) with ties rounded up.
int fragment_from_fraction(double f, int n_env);

/// `count` uniformly spaced points from start to stop inclusive.
std::vector<double> linspace(double start, double stop, int count);

/// workers == 0 selects the hardware concurrency. Output is independent of it.
SweepTable run_sweep(const SweepConfig& config, int workers = 0);

/// Thermodynamic QFI and S_y precision 4 / (1 + (tau_Y / t)^2) for each
/// tau_Y / tau_F ratio; t is measured in units of tau_F on [0, 5].
SweepTable fig1b_curves(const std::vector<double>& tau_ratios, int points = 200);

inline constexpr std::string_view kPresetNames[] = {"fig1b", "fig2", "fig3-heatmap", "plateau"};

/// Configurations behind a named preset (fig2 spans two environment sizes).
std::vector<SweepConfig> preset_configs(std::string_view name, std::uint64_t seed);

SweepTable run_preset(std::string_view name, std::uint64_t seed, int workers = 0);

SweepConfig parse_config(std::string_view text);
SweepConfig load_config(const std::string& path);

void write_csv(const SweepTable& table, std::ostream& out);
void write_json(const SweepTable& table, std::ostream& out);
void write_table(const SweepTable& table, OutputFormat format, std::ostream& out);

}  // namespace qdarwin::sweep
