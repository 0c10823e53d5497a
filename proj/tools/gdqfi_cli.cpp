// gdqfi: purity / QFI sweeps for Gaussian probes under diffusive decoherence.
//
//   gdqfi purity-sweep  [--config FILE] [--out FILE] [overrides...]
//   gdqfi qfi-sweep     [--config FILE] [--out FILE] [overrides...]
//   gdqfi qfi-contour   [--config FILE] [--out FILE] [overrides...]
//   gdqfi steady-state  [--config FILE] [overrides...]
//   gdqfi validate      [--seed N]
//
// Exit codes: 0 success, 1 validation failure, 2 configuration error.

#include <CLI11.hpp>

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "gdqfi/experiments.hpp"
#include "gdqfi/validation.hpp"

namespace {

constexpr int kExitValidation = 1;
constexpr int kExitConfig = 2;

struct Options {
  std::string config_path;
  std::string out_path;
  std::optional<double> lambda_g;
  std::optional<double> gamma;
  std::optional<double> omega_m;
  std::optional<double> n_th;
  std::string probe;
  std::uint64_t seed = 1;
};

std::string real_text(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

gdqfi::SweepConfig resolve_config(const Options& opt) {
  gdqfi::ConfigOverrides overrides;
  if (opt.lambda_g) overrides.emplace_back("params.lambda_g", real_text(*opt.lambda_g));
  if (opt.gamma) overrides.emplace_back("params.gamma", real_text(*opt.gamma));
  if (opt.omega_m) overrides.emplace_back("params.omega_m", real_text(*opt.omega_m));
  if (opt.n_th) overrides.emplace_back("params.n_th", real_text(*opt.n_th));

  gdqfi::SweepConfig cfg;
  if (opt.config_path.empty()) {
    std::istringstream empty;
    cfg = gdqfi::parse_config(empty, overrides);
  } else {
    cfg = gdqfi::load_config(opt.config_path, overrides);
  }
  if (!opt.out_path.empty()) cfg.output_path = opt.out_path;

  if (!opt.probe.empty()) {
    const auto all = cfg.expanded_probes();
    const auto it = std::find_if(all.begin(), all.end(),
                                 [&](const gdqfi::NamedProbe& p) { return p.name == opt.probe; });
    if (it == all.end()) throw gdqfi::ConfigError("--probe: unknown probe '" + opt.probe + "'");
    cfg.probes = {*it};
    cfg.r_grid.clear();
    cfg.contour_probe = opt.probe;
  }
  cfg.validate();
  return cfg;
}

void emit(const gdqfi::SweepConfig& cfg, const std::vector<gdqfi::SweepRow>& rows) {
  if (cfg.output_path.empty()) {
    gdqfi::write_csv(std::cout, rows);
    return;
  }
  std::ofstream out(cfg.output_path);
  if (!out) throw gdqfi::ConfigError("cannot write output file '" + cfg.output_path + "'");
  gdqfi::write_csv(out, rows);
}

void add_sweep_flags(CLI::App* cmd, Options& opt) {
  cmd->add_option("--config", opt.config_path, "key = value configuration file");
  cmd->add_option("--out", opt.out_path, "CSV output path (default: stdout)");
  cmd->add_option("--lambda-g", opt.lambda_g, "gravitational diffusion rate [1/s]");
  cmd->add_option("--gamma", opt.gamma, "damping rate [1/s]");
  cmd->add_option("--omega-m", opt.omega_m, "mechanical frequency [1/s]");
  cmd->add_option("--n-th", opt.n_th, "bath occupation");
  cmd->add_option("--probe", opt.probe, "restrict to one named probe");
  cmd->add_option("--seed", opt.seed, "seed for randomized validation draws");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fisher information of Gaussian probes for a diffusive decoherence rate"};
  app.require_subcommand(1);
  Options opt;

  auto* purity_cmd = app.add_subcommand("purity-sweep", "purity vs time for each probe");
  auto* qfi_cmd = app.add_subcommand("qfi-sweep", "QFI, homodyne CFI and CRB vs time for each probe");
  auto* contour_cmd = app.add_subcommand("qfi-contour", "QFI over (t, lambda_g) for one probe");
  auto* steady_cmd = app.add_subcommand("steady-state", "stationary-state summary");
  auto* validate_cmd = app.add_subcommand("validate", "run the oracle suites");
  for (auto* cmd : {purity_cmd, qfi_cmd, contour_cmd, steady_cmd, validate_cmd}) {
    add_sweep_flags(cmd, opt);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (validate_cmd->parsed()) {
      const gdqfi::ValidationReport report = gdqfi::run_validation(opt.seed);
      std::cout << report.summary();
      std::cout << "seed " << opt.seed << ", " << report.seconds << " s\n";
      if (!report.all_passed()) {
        for (const auto& s : report.suites) {
          if (!s.passed) std::cerr << "validation failed: " << s.name << '\n';
        }
        return kExitValidation;
      }
      return 0;
    }

    const gdqfi::SweepConfig cfg = resolve_config(opt);
    if (steady_cmd->parsed()) {
      std::cout << gdqfi::report_steady_state(cfg.params);
    } else if (purity_cmd->parsed()) {
      emit(cfg, gdqfi::run_purity_sweep(cfg));
    } else if (qfi_cmd->parsed()) {
      emit(cfg, gdqfi::run_qfi_sweep(cfg));
    } else if (contour_cmd->parsed()) {
      emit(cfg, gdqfi::run_qfi_contour(cfg));
    }
  } catch (const gdqfi::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  }
  return 0;
}
