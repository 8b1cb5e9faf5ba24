#include "qdarwin/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <fstream>
#include <limits>
#include <mutex>
#include <numbers>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "qdarwin/errors.hpp"
#include "qdarwin/observables.hpp"
#include "qdarwin/oracle.hpp"
#include "qdarwin/qfi.hpp"

namespace qdarwin::sweep {

namespace {

using nlohmann::json;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct Cell {
  double t;
  double f;
  int frag;
  double theta;
  double q;
};

std::vector<Cell> enumerate_cells(const SweepConfig& config) {
  std::vector<std::pair<double, int>> fragments;
  if (!config.fragment_sizes.empty()) {
    for (int k : config.fragment_sizes) {
      fragments.emplace_back(static_cast<double>(k) / config.n_env, k);
    }
  } else {
    for (double f : config.fractions) {
      fragments.emplace_back(f, fragment_from_fraction(f, config.n_env));
    }
  }

  std::vector<Cell> cells;
  cells.reserve(config.times.size() * fragments.size() * config.thetas.size() * config.qs.size());
  for (double t : config.times) {
    for (const auto& [f, k] : fragments) {
      for (double theta : config.thetas) {
        for (double q : config.qs) cells.push_back({t, f, k, theta, q});
      }
    }
  }
  return cells;
}

double evaluate(Quantity quantity, const Cell& cell, const CouplingSet& couplings) {
  const double f_actual = static_cast<double>(cell.frag) / couplings.n_env();
  switch (quantity) {
    case Quantity::qfi_closed:
      return qfi_closed_form(ModelPoint::make(cell.theta, cell.t, couplings, cell.frag)).value;
    case Quantity::qfi_thermo:
      return qfi_thermodynamic(cell.t, f_actual, couplings.moments().second_moment).value;
    case Quantity::qfi_oracle:
      return oracle::oracle_qfi(reduce_theta(cell.theta), cell.t, couplings, cell.frag).value;
    case Quantity::precision_finite:
      return precision_finite(ModelPoint::make(cell.theta, cell.t, couplings, cell.frag),
                              ObservableSpec(cell.q))
          .precision;
    case Quantity::precision_thermo:
      return precision_thermodynamic(cell.theta, cell.t, f_actual, couplings.moments().mean,
                                     ObservableSpec(cell.q))
          .precision;
    case Quantity::coherence:
      return coherence_factor(cell.t, couplings);
  }
  return kNaN;
}

SweepRow make_row(const SweepConfig& config, const Cell& cell, long realization,
                  std::uint64_t seed) {
  SweepRow row;
  row.n_env = config.n_env;
  row.t = cell.t;
  row.f = cell.f;
  row.frag = cell.frag;
  row.theta = cell.theta;
  row.q = cell.q;
  row.realization = realization;
  row.seed = seed;
  const auto taus = timescales(cell.theta, static_cast<double>(cell.frag) / config.n_env,
                               config.ensemble.moments());
  row.tau_f = taus.tau_f;
  row.tau_y = taus.tau_y;
  row.sqrt_n = std::sqrt(static_cast<double>(config.n_env));
  return row;
}

void require(bool ok, const std::string& message) {
  if (!ok) throw ConfigError(message);
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

// ---- config parsing ----

void reject_unknown(const json& obj, std::initializer_list<std::string_view> allowed,
                    const std::string& where) {
  for (const auto& [key, _] : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw ConfigError("unknown key '" + key + "' in " + where);
    }
  }
}

std::vector<double> read_axis(const json& node, const std::string& name) {
  if (node.is_array()) {
    std::vector<double> out;
    for (const auto& v : node) {
      require(v.is_number(), "axis '" + name + "' must contain numbers");
      out.push_back(v.get<double>());
    }
    return out;
  }
  require(node.is_object(), "axis '" + name + "' must be a list or a {start, stop, points} range");
  reject_unknown(node, {"start", "stop", "points"}, "axis '" + name + "'");
  require(node.contains("start") && node.contains("stop") && node.contains("points"),
          "range axis '" + name + "' needs start, stop and points");
  require(node["points"].is_number_integer() && node["points"].get<int>() >= 1,
          "range axis '" + name + "': points must be a positive integer");
  return linspace(node["start"].get<double>(), node["stop"].get<double>(),
                  node["points"].get<int>());
}

}  // namespace

std::string_view to_string(Quantity quantity) {
  switch (quantity) {
    case Quantity::qfi_closed:
      return "qfi_closed";
    case Quantity::qfi_thermo:
      return "qfi_thermo";
    case Quantity::qfi_oracle:
      return "qfi_oracle";
    case Quantity::precision_finite:
      return "precision_finite";
    case Quantity::precision_thermo:
      return "precision_thermo";
    case Quantity::coherence:
      return "coherence";
  }
  return "unknown";
}

std::optional<Quantity> parse_quantity(std::string_view name) {
  for (Quantity q : {Quantity::qfi_closed, Quantity::qfi_thermo, Quantity::qfi_oracle,
                     Quantity::precision_finite, Quantity::precision_thermo,
                     Quantity::coherence}) {
    if (to_string(q) == name) return q;
  }
  return std::nullopt;
}

void SweepConfig::validate() const {
  require(n_env >= 1, "n_env must be >= 1");
  require(realizations >= 1, "realizations must be >= 1");
  require(std::isfinite(ensemble.mean) && ensemble.stddev >= 0.0 && std::isfinite(ensemble.stddev),
          "ensemble needs a finite mean and a finite stddev >= 0");
  require(!times.empty(), "time axis is empty");
  for (double t : times) require(std::isfinite(t) && t >= 0.0, "times must be finite and >= 0");
  require(!thetas.empty(), "theta axis is empty");
  for (double th : thetas) require(std::isfinite(th), "theta values must be finite");
  require(!qs.empty(), "q axis is empty");
  for (double q : qs) require(q >= 0.0 && q < 1.0, "q values must lie in [0, 1)");

  require(!fractions.empty() || !fragment_sizes.empty(), "fragment axis (f or frag) is empty");
  require(fractions.empty() || fragment_sizes.empty(), "give either f or frag, not both");
  for (int k : fragment_sizes) {
    require(k >= 1 && k <= n_env, "frag values must lie in [1, n_env]");
  }
  for (double f : fractions) {
    require(f > 0.0 && f <= 1.0, "f values must lie in (0, 1]");
    require(fragment_from_fraction(f, n_env) >= 1,
            "f = " + format_number(f) + " rounds to an empty fragment at n_env = " +
                std::to_string(n_env));
  }

  require(!quantities.empty(), "no quantities requested");
  std::set<Quantity> seen;
  for (Quantity q : quantities) {
    require(seen.insert(q).second, "duplicate quantity " + std::string(to_string(q)));
  }
  if (seen.count(Quantity::qfi_oracle)) {
    require(n_env + 1 <= oracle::kMaxQubits, "qfi_oracle requires n_env + 1 <= 13");
    for (double th : thetas) {
      const double r = reduce_theta(th);
      require(r > 0.0 && r < std::numbers::pi / 2, "qfi_oracle requires theta inside (0, pi/2)");
    }
  }
  const double j2 = ensemble.moments().second_moment;
  require(j2 > 0.0, "ensemble must have <J^2> > 0");
  if (seen.count(Quantity::precision_thermo)) {
    require(ensemble.mean != 0.0, "precision_thermo is not defined for zero-mean couplings");
  }
}

void SweepTable::append(const SweepTable& other) {
  if (rows.empty() && columns.empty()) columns = other.columns;
  if (columns != other.columns) throw Error("SweepTable::append: column mismatch");
  rows.insert(rows.end(), other.rows.begin(), other.rows.end());
}

int fragment_from_fraction(double f, int n_env) {
  return static_cast<int>(std::floor(f * n_env + 0.5));
}

std::vector<double> linspace(double start, double stop, int count) {
  std::vector<double> out;
  if (count <= 0) return out;
  if (count == 1) return {start};
  out.reserve(static_cast<std::size_t>(count));
  const double step = (stop - start) / (count - 1);
  for (int i = 0; i < count; ++i) out.push_back(i + 1 == count ? stop : start + i * step);
  return out;
}

SweepTable run_sweep(const SweepConfig& config, int workers) {
  config.validate();

  const std::vector<Cell> cells = enumerate_cells(config);
  const std::size_t n_cells = cells.size();
  const std::size_t n_q = config.quantities.size();
  const auto n_real = static_cast<std::size_t>(config.realizations);

  // results[r][cell * n_q + k]
  std::vector<std::vector<double>> results(n_real);
  std::vector<std::uint64_t> seeds(n_real);

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    for (std::size_t r = next++; r < n_real; r = next++) {
      try {
        const std::uint64_t seed = derive_seed(config.master_seed, r);
        const CouplingSet couplings = sample_couplings(config.ensemble, config.n_env, seed);
        std::vector<double> values(n_cells * n_q);
        for (std::size_t c = 0; c < n_cells; ++c) {
          for (std::size_t k = 0; k < n_q; ++k) {
            values[c * n_q + k] = evaluate(config.quantities[k], cells[c], couplings);
          }
        }
        seeds[r] = seed;
        results[r] = std::move(values);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = n_real;
      }
    }
  };

  std::size_t n_workers = workers > 0 ? static_cast<std::size_t>(workers)
                                      : std::max(1u, std::thread::hardware_concurrency());
  n_workers = std::min(n_workers, n_real);
  if (n_workers <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(n_workers);
    for (std::size_t w = 0; w < n_workers; ++w) pool.emplace_back(work);
  }
  if (failure) std::rethrow_exception(failure);

  SweepTable table;
  for (Quantity q : config.quantities) table.columns.emplace_back(to_string(q));
  table.rows.reserve(n_cells * (n_real + 1));
  for (std::size_t c = 0; c < n_cells; ++c) {
    for (std::size_t r = 0; r < n_real; ++r) {
      SweepRow row = make_row(config, cells[c], static_cast<long>(r), seeds[r]);
      row.values.assign(results[r].begin() + static_cast<std::ptrdiff_t>(c * n_q),
                        results[r].begin() + static_cast<std::ptrdiff_t>((c + 1) * n_q));
      row.stds.assign(n_q, 0.0);
      table.rows.push_back(std::move(row));
    }
  }
  for (std::size_t c = 0; c < n_cells; ++c) {
    SweepRow agg = make_row(config, cells[c], kAggregateRow, config.master_seed);
    agg.values.assign(n_q, 0.0);
    agg.stds.assign(n_q, 0.0);
    for (std::size_t k = 0; k < n_q; ++k) {
      double sum = 0.0;
      for (std::size_t r = 0; r < n_real; ++r) sum += results[r][c * n_q + k];
      const double mean = sum / static_cast<double>(n_real);
      double ss = 0.0;
      for (std::size_t r = 0; r < n_real; ++r) {
        const double d = results[r][c * n_q + k] - mean;
        ss += d * d;
      }
      agg.values[k] = mean;
      agg.stds[k] = n_real > 1 ? std::sqrt(ss / static_cast<double>(n_real - 1)) : 0.0;
    }
    table.rows.push_back(std::move(agg));
  }
  return table;
}

SweepTable fig1b_curves(const std::vector<double>& tau_ratios, int points) {
  for (double r : tau_ratios) {
    if (!(r > 0.0)) throw DomainError("fig1b_curves: ratios must be > 0");
  }
  SweepTable table;
  table.columns.emplace_back("qfi_thermo");
  for (double r : tau_ratios) table.columns.push_back("precision_ratio_" + format_number(r));

  for (double t : linspace(0.0, 5.0, points)) {
    SweepRow row;
    row.t = t;
    row.theta = std::numbers::pi / 4;
    row.realization = kAggregateRow;
    row.tau_f = 1.0;
    row.tau_y = kNaN;
    row.sqrt_n = kNaN;
    row.values.push_back(-kMaxQfi * std::expm1(-t * t));
    for (double r : tau_ratios) {
      // 4 / (1 + (tau_Y / t)^2) written to stay finite at t = 0
      row.values.push_back(kMaxQfi * t * t / (t * t + r * r));
    }
    row.stds.assign(row.values.size(), 0.0);
    table.rows.push_back(std::move(row));
  }
  return table;
}

std::vector<SweepConfig> preset_configs(std::string_view name, std::uint64_t seed) {
  SweepConfig base;
  base.name = std::string(name);
  base.master_seed = seed;
  base.ensemble = {0.5, 0.5};
  base.thetas = {std::numbers::pi / 4};
  base.qs = {0.0};

  if (name == "fig2") {
    base.times = linspace(0.0, 10.0, 200);
    base.fractions = {0.2};
    base.realizations = 10;
    base.quantities = {Quantity::qfi_closed, Quantity::qfi_thermo, Quantity::precision_finite,
                       Quantity::precision_thermo};
    SweepConfig small = base;
    small.n_env = 25;
    SweepConfig large = base;
    large.n_env = 50;
    return {small, large};
  }
  if (name == "fig3-heatmap") {
    base.n_env = 30;
    base.times = linspace(0.0, 10.0, 200);
    for (int k = 1; k <= base.n_env; ++k) base.fragment_sizes.push_back(k);
    base.realizations = 1;
    base.quantities = {Quantity::qfi_closed, Quantity::qfi_thermo};
    return {base};
  }
  if (name == "plateau") {
    base.n_env = 30;
    base.times = {3.0};
    for (int k = 1; k <= base.n_env; ++k) base.fragment_sizes.push_back(k);
    base.realizations = 2000;
    base.quantities = {Quantity::qfi_closed, Quantity::qfi_thermo, Quantity::precision_finite,
                       Quantity::precision_thermo};
    return {base};
  }
  throw ConfigError("unknown preset '" + std::string(name) + "'");
}

SweepTable run_preset(std::string_view name, std::uint64_t seed, int workers) {
  if (name == "fig1b") return fig1b_curves({1.0, 2.0, 5.0});
  SweepTable table;
  for (const SweepConfig& config : preset_configs(name, seed)) {
    table.append(run_sweep(config, workers));
  }
  return table;
}

SweepConfig parse_config(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  require(doc.is_object(), "config root must be an object");

  try {
    reject_unknown(doc, {"name", "n_env", "ensemble", "realizations", "master_seed", "grid",
                         "quantities", "output"},
                   "config");
    SweepConfig config;
    config.name = doc.value("name", std::string("sweep"));
    require(doc.contains("n_env") && doc["n_env"].is_number_integer(), "n_env (integer) is required");
    config.n_env = doc["n_env"].get<int>();

    require(doc.contains("ensemble") && doc["ensemble"].is_object(), "ensemble section is required");
    const json& ens = doc["ensemble"];
    reject_unknown(ens, {"mean", "stddev"}, "ensemble");
    config.ensemble = {ens.at("mean").get<double>(), ens.value("stddev", 0.0)};

    config.realizations = doc.value("realizations", 1);
    if (doc.contains("master_seed")) {
      require(doc["master_seed"].is_number_unsigned() || doc["master_seed"].is_number_integer(),
              "master_seed must be a non-negative integer");
      config.master_seed = doc["master_seed"].get<std::uint64_t>();
    }

    require(doc.contains("grid") && doc["grid"].is_object(), "grid section is required");
    const json& grid = doc["grid"];
    reject_unknown(grid, {"t", "f", "frag", "theta", "q"}, "grid");
    require(grid.contains("t"), "grid.t is required");
    config.times = read_axis(grid["t"], "t");
    if (grid.contains("f")) config.fractions = read_axis(grid["f"], "f");
    if (grid.contains("frag")) {
      for (double k : read_axis(grid["frag"], "frag")) {
        require(k == std::floor(k), "grid.frag must contain integers");
        config.fragment_sizes.push_back(static_cast<int>(k));
      }
    }
    config.thetas = grid.contains("theta") ? read_axis(grid["theta"], "theta")
                                           : std::vector<double>{std::numbers::pi / 4};
    config.qs = grid.contains("q") ? read_axis(grid["q"], "q") : std::vector<double>{0.0};

    require(doc.contains("quantities") && doc["quantities"].is_array(),
            "quantities (list) is required");
    for (const auto& q : doc["quantities"]) {
      require(q.is_string(), "quantities must be strings");
      const auto parsed = parse_quantity(q.get<std::string>());
      require(parsed.has_value(), "unknown quantity '" + q.get<std::string>() + "'");
      config.quantities.push_back(*parsed);
    }

    if (doc.contains("output")) {
      const json& out = doc["output"];
      require(out.is_object(), "output must be an object");
      reject_unknown(out, {"path", "format"}, "output");
      config.output_path = out.value("path", std::string());
      const std::string fmt = out.value("format", std::string("csv"));
      require(fmt == "csv" || fmt == "json", "output.format must be csv or json");
      config.format = fmt == "csv" ? OutputFormat::csv : OutputFormat::json;
    }

    config.validate();
    return config;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config type error: ") + e.what());
  }
}

SweepConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

void write_csv(const SweepTable& table, std::ostream& out) {
  out << "n_env,t,f,frag,theta,q,realization,seed";
  for (const auto& c : table.columns) out << ',' << c << ',' << c << "_std";
  out << ",tau_f,tau_y,sqrt_n\n";
  for (const auto& row : table.rows) {
    out << row.n_env << ',' << format_number(row.t) << ',' << format_number(row.f) << ','
        << row.frag << ',' << format_number(row.theta) << ',' << format_number(row.q) << ','
        << row.realization << ',' << row.seed;
    for (std::size_t k = 0; k < row.values.size(); ++k) {
      out << ',' << format_number(row.values[k]) << ',' << format_number(row.stds[k]);
    }
    out << ',' << format_number(row.tau_f) << ',' << format_number(row.tau_y) << ','
        << format_number(row.sqrt_n) << '\n';
  }
}

void write_json(const SweepTable& table, std::ostream& out) {
  out << "[";
  bool first = true;
  for (const auto& row : table.rows) {
    nlohmann::ordered_json obj;
    obj["n_env"] = row.n_env;
    obj["t"] = number_or_null(row.t);
    obj["f"] = number_or_null(row.f);
    obj["frag"] = row.frag;
    obj["theta"] = number_or_null(row.theta);
    obj["q"] = number_or_null(row.q);
    obj["realization"] = row.realization;
    obj["seed"] = row.seed;
    for (std::size_t k = 0; k < row.values.size(); ++k) {
      obj[table.columns[k]] = number_or_null(row.values[k]);
      obj[table.columns[k] + "_std"] = number_or_null(row.stds[k]);
    }
    obj["tau_f"] = number_or_null(row.tau_f);
    obj["tau_y"] = number_or_null(row.tau_y);
    obj["sqrt_n"] = number_or_null(row.sqrt_n);
    out << (first ? "\n" : ",\n") << obj.dump();
    first = false;
  }
  out << "\n]\n";
}

void write_table(const SweepTable& table, OutputFormat format, std::ostream& out) {
  if (format == OutputFormat::csv) {
    write_csv(table, out);
  } else {
    write_json(table, out);
  }
}

}  // namespace qdarwin::sweep
