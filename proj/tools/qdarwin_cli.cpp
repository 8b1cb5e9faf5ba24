// qdarwin: parameter sweeps, figure presets, verification and one-shot
// evaluators for the spin-star fragment QFI / precision model.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "qdarwin/errors.hpp"
#include "qdarwin/observables.hpp"
#include "qdarwin/qfi.hpp"
#include "qdarwin/spinstar.hpp"
#include "qdarwin/sweep.hpp"
#include "qdarwin/verify.hpp"

namespace {

using namespace qdarwin;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitVerify = 2;

struct OneShotArgs {
  double theta = 0.0;
  double time = 0.0;
  int n_env = 1;
  int frag = 1;
  double jmean = 0.5;
  double jstd = 0.5;
  std::uint64_t seed = 1;
  double q = 0.0;
  bool thermo = false;
};

void add_one_shot_options(CLI::App* cmd, OneShotArgs& args, bool with_q) {
  cmd->add_option("--theta", args.theta, "encoding angle (radians)")->required();
  cmd->add_option("--time", args.time, "interaction time")->required();
  cmd->add_option("--n-env", args.n_env, "environment size N")->required();
  cmd->add_option("--frag", args.frag, "fragment size |F|")->required();
  cmd->add_option("--jmean", args.jmean, "coupling mean");
  cmd->add_option("--jstd", args.jstd, "coupling standard deviation");
  cmd->add_option("--seed", args.seed, "master seed; couplings are realization 0 of this seed");
  if (with_q) cmd->add_option("--q", args.q, "A_q mixing weight in [0, 1)");
  cmd->add_flag("--thermo", args.thermo, "evaluate the thermodynamic-limit expression");
}

void emit(const sweep::SweepTable& table, sweep::OutputFormat format, const std::string& path) {
  if (path.empty() || path == "-") {
    sweep::write_table(table, format, std::cout);
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open output file '" + path + "'");
  sweep::write_table(table, format, out);
}

sweep::OutputFormat parse_format(const std::string& name) {
  if (name == "csv") return sweep::OutputFormat::csv;
  if (name == "json") return sweep::OutputFormat::json;
  throw ConfigError("unknown format '" + name + "'");
}

void log_fraction_conversions(const sweep::SweepConfig& config) {
  for (double f : config.fractions) {
    std::cerr << "f=" << f << " -> |F|=" << sweep::fragment_from_fraction(f, config.n_env)
              << " (n_env=" << config.n_env << ")\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fragment QFI and measurement precision in the spin-star model"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_path;
  std::string format_name;
  int workers = 0;
  auto* sweep_cmd = app.add_subcommand("sweep", "run a sweep described by a JSON config file");
  sweep_cmd->add_option("--config", config_path, "config file")->required();
  sweep_cmd->add_option("--out", out_path, "output path (overrides config)");
  sweep_cmd->add_option("--format", format_name, "csv or json (overrides config)");
  sweep_cmd->add_option("--workers", workers, "worker threads, 0 = all cores");

  std::string preset_name;
  std::uint64_t preset_seed = 1;
  std::string preset_format = "csv";
  auto* preset_cmd = app.add_subcommand("preset", "regenerate figure data");
  preset_cmd->add_option("name", preset_name, "fig1b | fig2 | fig3-heatmap | plateau")
      ->required()
      ->check(CLI::IsMember({"fig1b", "fig2", "fig3-heatmap", "plateau"}));
  preset_cmd->add_option("--seed", preset_seed, "master seed");
  preset_cmd->add_option("--out", out_path, "output path, default stdout");
  preset_cmd->add_option("--format", preset_format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}));
  preset_cmd->add_option("--workers", workers, "worker threads, 0 = all cores");

  std::string scope = "fast";
  std::uint64_t verify_seed = 1;
  auto* verify_cmd = app.add_subcommand("verify", "run the oracle-equivalence and invariant checks");
  verify_cmd->add_option("--scope", scope, "fast or full")->check(CLI::IsMember({"fast", "full"}));
  verify_cmd->add_option("--seed", verify_seed, "seed of the test matrix");

  OneShotArgs qfi_args;
  auto* qfi_cmd = app.add_subcommand("qfi", "fragment QFI at one point");
  add_one_shot_options(qfi_cmd, qfi_args, false);

  OneShotArgs prec_args;
  auto* prec_cmd = app.add_subcommand("precision", "A_q error-propagation precision at one point");
  add_one_shot_options(prec_cmd, prec_args, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (sweep_cmd->parsed()) {
      sweep::SweepConfig config = sweep::load_config(config_path);
      if (!out_path.empty()) config.output_path = out_path;
      if (!format_name.empty()) config.format = parse_format(format_name);
      log_fraction_conversions(config);
      emit(sweep::run_sweep(config, workers), config.format, config.output_path);
      return kExitOk;
    }
    if (preset_cmd->parsed()) {
      if (preset_name != "fig1b") {
        for (const auto& config : sweep::preset_configs(preset_name, preset_seed)) {
          log_fraction_conversions(config);
        }
      }
      emit(sweep::run_preset(preset_name, preset_seed, workers), parse_format(preset_format),
           out_path);
      return kExitOk;
    }
    if (verify_cmd->parsed()) {
      sweep::VerifyOptions options;
      options.scope = scope == "full" ? sweep::VerifyScope::full : sweep::VerifyScope::fast;
      options.seed = verify_seed;
      const sweep::VerifyReport report = sweep::verify(options);
      std::cout << report.to_json() << '\n';
      return report.passed() ? kExitOk : kExitVerify;
    }

    const bool is_qfi = qfi_cmd->parsed();
    const OneShotArgs& a = is_qfi ? qfi_args : prec_args;
    const GaussianCouplingSpec ensemble{a.jmean, a.jstd};
    const CouplingSet couplings =
        sample_couplings(ensemble, a.n_env, derive_seed(a.seed, 0));
    const ModelPoint point = ModelPoint::make(a.theta, a.time, couplings, a.frag);
    const double f = point.fraction();

    nlohmann::ordered_json result;
    if (is_qfi) {
      const QfiResult r = a.thermo
                              ? qfi_thermodynamic(a.time, f, ensemble.moments().second_moment)
                              : qfi_closed_form(point);
      result["value"] = r.value;
      result["method"] = std::string(to_string(r.method));
    } else {
      const ObservableSpec spec(a.q);
      const PrecisionResult r = a.thermo ? precision_thermodynamic(a.theta, a.time, f, a.jmean, spec)
                                         : precision_finite(point, spec);
      result["variance_theta"] =
          std::isfinite(r.variance_theta) ? nlohmann::ordered_json(r.variance_theta) : nullptr;
      result["precision"] = r.precision;
      result["mean_a"] = r.mean_a;
      result["var_a"] = r.var_a;
      result["method"] = a.thermo ? "thermodynamic" : "finite";
    }
    std::cout << result.dump() << '\n';
    return kExitOk;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  }
}
