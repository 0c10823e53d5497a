#pragma once

// Sweep configuration, sweep drivers and tabular output.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "gdqfi/dynamics.hpp"
#include "gdqfi/gaussian.hpp"
#include "gdqfi/metrology.hpp"

namespace gdqfi {

/// Bad configuration file, field or command-line override.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Spacing { kLinear, kLog };

struct Grid {
  double min = 0.0;
  double max = 1.0;
  int n_points = 2;
  Spacing spacing = Spacing::kLinear;

  /// Grid points from min to max inclusive. A single-point grid yields {min}.
  std::vector<double> points() const;
};

struct NamedProbe {
  std::string name;
  ProbeSpec spec;
};

/// The four fixed-energy (n0 = 4) probes: coherent |alpha| = 2, thermal
/// n = 4, squeezed vacuum r = 1.4436, squeezed thermal n = 1, r = 0.8814.
std::vector<NamedProbe> fixed_energy_probes();

struct SweepConfig {
  PhysicalParams params;
  std::vector<NamedProbe> probes = fixed_energy_probes();
  Grid time_grid{0.0, 200.0, 201, Spacing::kLinear};
  std::optional<Grid> lambda_g_grid;
  std::vector<double> r_grid;
  std::string contour_probe = "squeezed_vacuum";
  std::string output_path;
  std::int64_t n_repetitions = 1;

  /// Throws ConfigError naming the offending field.
  void validate() const;

  /// The configured probes followed by one squeezed vacuum per r_grid entry.
  std::vector<NamedProbe> expanded_probes() const;
};

/// Parses flat `key = value` text. Unset keys keep their defaults; the time
/// grid defaults to [0, 20/gamma]. Throws ConfigError with a line number on
/// syntax errors and with the field name on invalid values.
/// `overrides` are applied as extra keys that replace any value in the file.
using ConfigOverrides = std::vector<std::pair<std::string, std::string>>;
SweepConfig parse_config(std::istream& in, const ConfigOverrides& overrides = {});
SweepConfig load_config(const std::filesystem::path& path, const ConfigOverrides& overrides = {});

/// Name used for the squeezed vacuum probe generated from an r_grid entry.
std::string r_grid_probe_name(double r);

struct SweepRow {
  std::string probe_name;
  double t = 0.0;
  double lambda_g = 0.0;
  double purity = 0.0;
  double qfi_total = 0.0;
  double qfi_term_cov = 0.0;
  double qfi_term_purity = 0.0;
  double cfi_best_theta = 0.0;
  double crb = 0.0;  // +inf where the QFI vanishes
};

/// Evaluates every column for one (probe, t, params) point.
SweepRow evaluate_point(const NamedProbe& probe, double t, const PhysicalParams& p,
                        std::int64_t n_repetitions);

/// One row per (probe, t); probes in expanded order, t ascending.
std::vector<SweepRow> run_purity_sweep(const SweepConfig& cfg);
std::vector<SweepRow> run_qfi_sweep(const SweepConfig& cfg);

/// Rows over (t, lambda_g) for cfg.contour_probe, t-major. Throws ConfigError
/// when cfg has no lambda_g grid.
std::vector<SweepRow> run_qfi_contour(const SweepConfig& cfg);

inline constexpr const char* kCsvHeader =
    "probe_name,t,lambda_g,purity,qfi_total,qfi_term_cov,qfi_term_purity,cfi_best_theta,crb";

/// %.11e: 12 significant digits.
std::string format_real(double v);
void write_csv(std::ostream& out, const std::vector<SweepRow>& rows);

/// Row with the largest qfi_total for a probe; the grid argmax stands in for
/// the optimal measurement time. Returns nullopt if the probe has no rows.
std::optional<SweepRow> argmax_qfi(const std::vector<SweepRow>& rows, const std::string& probe);

/// Short-time sample point used for probe rankings: min(0.1/omega_m, 0.01/gamma).
double short_time_sample(const PhysicalParams& p);

/// Human-readable stationary-state summary.
std::string report_steady_state(const PhysicalParams& p);

}  // namespace gdqfi
