#include "gdqfi/experiments.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>

namespace gdqfi {

std::vector<double> Grid::points() const {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(std::max(n_points, 0)));
  if (n_points == 1) {
    out.push_back(min);
    return out;
  }
  for (int i = 0; i < n_points; ++i) {
    const double frac = static_cast<double>(i) / (n_points - 1);
    if (i == n_points - 1) {
      out.push_back(max);
    } else if (spacing == Spacing::kLog) {
      out.push_back(min * std::pow(max / min, frac));
    } else {
      out.push_back(min + (max - min) * frac);
    }
  }
  return out;
}

std::vector<NamedProbe> fixed_energy_probes() {
  return {
      {"coherent", Coherent{2.0, 0.0}},
      {"thermal", Thermal{4.0}},
      {"squeezed_vacuum", SqueezedVacuum{1.4436, 0.0}},
      {"squeezed_thermal", SqueezedThermal{1.0, 0.8814, 0.0}},
  };
}

std::string r_grid_probe_name(double r) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "squeezed_vacuum_r%g", r);
  return buf;
}

std::vector<NamedProbe> SweepConfig::expanded_probes() const {
  std::vector<NamedProbe> out = probes;
  for (double r : r_grid) out.push_back({r_grid_probe_name(r), SqueezedVacuum{r, 0.0}});
  return out;
}

namespace {

void validate_grid(const Grid& g, const std::string& prefix, const char* min_key,
                   const char* max_key) {
  const std::string lo = prefix + "." + min_key;
  const std::string hi = prefix + "." + max_key;
  if (g.n_points < 1) throw ConfigError(prefix + ".n_points must be >= 1");
  if (!std::isfinite(g.min) || !std::isfinite(g.max)) {
    throw ConfigError(lo + " and " + hi + " must be finite");
  }
  if (g.min > g.max) throw ConfigError(lo + " must be <= " + hi);
  if (g.min < 0.0) throw ConfigError(lo + " must be >= 0");
  if (g.spacing == Spacing::kLog && g.min <= 0.0) {
    throw ConfigError(lo + " must be > 0 for log spacing");
  }
}

}  // namespace

void SweepConfig::validate() const {
  try {
    params.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  validate_grid(time_grid, "time", "t_min", "t_max");
  if (lambda_g_grid) validate_grid(*lambda_g_grid, "lambda_g_grid", "min", "max");
  if (probes.empty() && r_grid.empty()) throw ConfigError("probes: at least one probe is required");
  for (const auto& probe : expanded_probes()) {
    try {
      (void)make_probe(probe.spec);
    } catch (const std::invalid_argument& e) {
      throw ConfigError("probe." + probe.name + ": " + e.what());
    }
  }
  for (std::size_t i = 0; i < probes.size(); ++i) {
    for (std::size_t j = i + 1; j < probes.size(); ++j) {
      if (probes[i].name == probes[j].name) throw ConfigError("probe." + probes[i].name + " is duplicated");
    }
  }
  for (double r : r_grid) {
    if (!std::isfinite(r)) throw ConfigError("r_grid entries must be finite");
  }
  if (n_repetitions < 1) throw ConfigError("n_repetitions must be >= 1");
}

// ---------------------------------------------------------------------------
// Config parsing

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

struct Entry {
  std::string value;
  int line = 0;  // 0 for command-line overrides
};

std::string where(const std::string& key, const Entry& e) {
  if (e.line > 0) return "line " + std::to_string(e.line) + ": " + key;
  return "override " + key;
}

double to_real(const std::string& key, const Entry& e) {
  double v = 0.0;
  const char* begin = e.value.data();
  const char* end = begin + e.value.size();
  const auto [ptr, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc() || ptr != end || e.value.empty()) {
    throw ConfigError(where(key, e) + ": expected a real number, got '" + e.value + "'");
  }
  return v;
}

std::int64_t to_integer(const std::string& key, const Entry& e) {
  std::int64_t v = 0;
  const char* begin = e.value.data();
  const char* end = begin + e.value.size();
  const auto [ptr, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc() || ptr != end || e.value.empty()) {
    throw ConfigError(where(key, e) + ": expected an integer, got '" + e.value + "'");
  }
  return v;
}

int to_count(const std::string& key, const Entry& e) {
  const std::int64_t v = to_integer(key, e);
  if (v > std::numeric_limits<int>::max() || v < std::numeric_limits<int>::min()) {
    throw ConfigError(where(key, e) + ": out of range");
  }
  return static_cast<int>(v);
}

Spacing to_spacing(const std::string& key, const Entry& e) {
  if (e.value == "linear") return Spacing::kLinear;
  if (e.value == "log") return Spacing::kLog;
  throw ConfigError(where(key, e) + ": expected 'linear' or 'log', got '" + e.value + "'");
}

std::vector<double> to_real_list(const std::string& key, const Entry& e) {
  std::vector<double> out;
  std::stringstream ss(e.value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    out.push_back(to_real(key, {trim(item), e.line}));
  }
  return out;
}

class EntryTable {
 public:
  void add(const std::string& key, Entry e) {
    if (e.line > 0 && entries_.count(key) != 0) {
      throw ConfigError(where(key, e) + ": duplicate key (first set on line " +
                        std::to_string(entries_.at(key).line) + ")");
    }
    if (entries_.count(key) == 0) order_.push_back(key);
    entries_[key] = std::move(e);
  }

  /// Marks the key consumed and returns its entry, if present.
  const Entry* take(const std::string& key) {
    const auto it = entries_.find(key);
    if (it == entries_.end()) return nullptr;
    consumed_.insert(key);
    return &it->second;
  }

  bool has(const std::string& key) const { return entries_.count(key) != 0; }
  const std::vector<std::string>& keys_in_order() const { return order_; }

  void reject_unconsumed() const {
    for (const auto& key : order_) {
      if (consumed_.count(key) == 0) {
        throw ConfigError(where(key, entries_.at(key)) + ": unknown key");
      }
    }
  }

 private:
  std::map<std::string, Entry> entries_;
  std::vector<std::string> order_;
  std::set<std::string> consumed_;
};

void read_real(EntryTable& t, const std::string& key, double& target) {
  if (const Entry* e = t.take(key)) target = to_real(key, *e);
}

void read_grid(EntryTable& t, const std::string& prefix, Grid& grid) {
  read_real(t, prefix + ".min", grid.min);
  read_real(t, prefix + ".max", grid.max);
  if (const Entry* e = t.take(prefix + ".n_points")) grid.n_points = to_count(prefix + ".n_points", *e);
  if (const Entry* e = t.take(prefix + ".spacing")) grid.spacing = to_spacing(prefix + ".spacing", *e);
}

ProbeSpec read_probe(EntryTable& t, const std::string& name) {
  const std::string prefix = "probe." + name;
  const Entry* kind_entry = t.take(prefix + ".kind");
  if (kind_entry == nullptr) throw ConfigError(prefix + ".kind is required");
  const std::string& kind = kind_entry->value;

  auto real = [&](const char* field, double fallback) {
    double v = fallback;
    read_real(t, prefix + "." + field, v);
    return v;
  };

  if (kind == "coherent") return Coherent{real("alpha_re", 0.0), real("alpha_im", 0.0)};
  if (kind == "thermal") return Thermal{real("n_th0", 0.0)};
  if (kind == "squeezed_vacuum") return SqueezedVacuum{real("r", 0.0), real("phi", 0.0)};
  if (kind == "squeezed_thermal") {
    return SqueezedThermal{real("n_th0", 0.0), real("r", 0.0), real("phi", 0.0)};
  }
  throw ConfigError(where(prefix + ".kind", *kind_entry) + ": unknown probe kind '" + kind + "'");
}

}  // namespace

SweepConfig parse_config(std::istream& in,
                         const ConfigOverrides& overrides) {
  EntryTable table;
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    const std::string line = trim(std::string_view(raw).substr(0, hash));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    const std::string key = trim(std::string_view(line).substr(0, eq));
    if (key.empty()) throw ConfigError("line " + std::to_string(line_no) + ": empty key");
    table.add(key, {trim(std::string_view(line).substr(eq + 1)), line_no});
  }
  for (const auto& [key, value] : overrides) table.add(key, {value, 0});

  SweepConfig cfg;
  read_real(table, "params.omega_m", cfg.params.omega_m);
  read_real(table, "params.gamma", cfg.params.gamma);
  read_real(table, "params.n_th", cfg.params.n_th);

  if (table.has("params.lambda_g") && table.has("mirror.density")) {
    throw ConfigError("params.lambda_g and mirror.density are mutually exclusive");
  }
  read_real(table, "params.lambda_g", cfg.params.lambda_g);
  if (const Entry* e = table.take("mirror.density")) {
    cfg.params.lambda_g = lambda_g_from({to_real("mirror.density", *e), cfg.params.omega_m});
  }

  if (table.has("params.lambda_T") && table.has("bath.temperature")) {
    throw ConfigError("params.lambda_T and bath.temperature are mutually exclusive");
  }
  read_real(table, "params.lambda_T", cfg.params.lambda_T);
  if (const Entry* e = table.take("bath.temperature")) {
    const double temperature = to_real("bath.temperature", *e);
    if (!(temperature >= 0.0)) throw ConfigError("bath.temperature must be >= 0");
    cfg.params.lambda_T = lambda_T_from({temperature, cfg.params.gamma, cfg.params.omega_m});
  }

  // 20 damping times unless given explicitly
  if (cfg.params.gamma > 0.0) cfg.time_grid.max = 20.0 / cfg.params.gamma;
  read_real(table, "time.t_min", cfg.time_grid.min);
  read_real(table, "time.t_max", cfg.time_grid.max);
  if (const Entry* e = table.take("time.n_points")) cfg.time_grid.n_points = to_count("time.n_points", *e);
  if (const Entry* e = table.take("time.spacing")) cfg.time_grid.spacing = to_spacing("time.spacing", *e);

  const bool any_lambda_grid =
      std::any_of(table.keys_in_order().begin(), table.keys_in_order().end(),
                  [](const std::string& k) { return k.rfind("lambda_g_grid.", 0) == 0; });
  if (any_lambda_grid) {
    if (!table.has("lambda_g_grid.min") || !table.has("lambda_g_grid.max")) {
      throw ConfigError("lambda_g_grid.min and lambda_g_grid.max are both required");
    }
    Grid grid{0.0, 0.0, 21, Spacing::kLinear};
    read_grid(table, "lambda_g_grid", grid);
    cfg.lambda_g_grid = grid;
  }

  if (const Entry* e = table.take("r_grid")) cfg.r_grid = to_real_list("r_grid", *e);
  if (const Entry* e = table.take("contour.probe")) cfg.contour_probe = e->value;
  if (const Entry* e = table.take("output_path")) cfg.output_path = e->value;
  if (const Entry* e = table.take("n_repetitions")) cfg.n_repetitions = to_integer("n_repetitions", *e);

  // probe.<name>.<field>; names in order of first appearance
  std::vector<std::string> probe_names;
  for (const auto& key : table.keys_in_order()) {
    if (key.rfind("probe.", 0) != 0) continue;
    const auto dot = key.find('.', 6);
    if (dot == std::string::npos || dot == 6) {
      throw ConfigError(where(key, *table.take(key)) + ": expected probe.<name>.<field>");
    }
    const std::string name = key.substr(6, dot - 6);
    if (std::find(probe_names.begin(), probe_names.end(), name) == probe_names.end()) {
      probe_names.push_back(name);
    }
  }
  if (!probe_names.empty()) {
    cfg.probes.clear();
    for (const auto& name : probe_names) cfg.probes.push_back({name, read_probe(table, name)});
  }

  table.reject_unconsumed();
  cfg.validate();
  return cfg;
}

SweepConfig load_config(const std::filesystem::path& path,
                        const ConfigOverrides& overrides) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
  return parse_config(in, overrides);
}

// ---------------------------------------------------------------------------
// Sweeps

SweepRow evaluate_point(const NamedProbe& probe, double t, const PhysicalParams& p,
                        std::int64_t n_repetitions) {
  const GaussianState s0 = make_probe(probe.spec);
  const GaussianState st = evolve(s0, t, p);
  const QfiBreakdown q = qfi(s0, t, p);

  SweepRow row;
  row.probe_name = probe.name;
  row.t = t;
  row.lambda_g = p.lambda_g;
  row.purity = purity(st.cov);
  row.qfi_total = q.total;
  row.qfi_term_cov = q.term_cov;
  row.qfi_term_purity = q.term_purity;
  row.cfi_best_theta = best_homodyne_cfi(s0, t, p).cfi;
  row.crb = q.total > 0.0 ? cramer_rao(q.total, n_repetitions).variance_bound
                          : std::numeric_limits<double>::infinity();
  return row;
}

namespace {

std::vector<SweepRow> probe_time_sweep(const SweepConfig& cfg) {
  cfg.validate();
  const std::vector<double> times = cfg.time_grid.points();
  std::vector<SweepRow> rows;
  for (const auto& probe : cfg.expanded_probes()) {
    for (double t : times) rows.push_back(evaluate_point(probe, t, cfg.params, cfg.n_repetitions));
  }
  return rows;
}

}  // namespace

std::vector<SweepRow> run_purity_sweep(const SweepConfig& cfg) { return probe_time_sweep(cfg); }

std::vector<SweepRow> run_qfi_sweep(const SweepConfig& cfg) { return probe_time_sweep(cfg); }

std::vector<SweepRow> run_qfi_contour(const SweepConfig& cfg) {
  cfg.validate();
  if (!cfg.lambda_g_grid) throw ConfigError("qfi-contour requires lambda_g_grid.min/max");
  const auto probes = cfg.expanded_probes();
  const auto it = std::find_if(probes.begin(), probes.end(),
                               [&](const NamedProbe& p) { return p.name == cfg.contour_probe; });
  if (it == probes.end()) {
    throw ConfigError("contour.probe '" + cfg.contour_probe + "' is not a configured probe");
  }

  const std::vector<double> times = cfg.time_grid.points();
  const std::vector<double> rates = cfg.lambda_g_grid->points();
  std::vector<SweepRow> rows;
  rows.reserve(times.size() * rates.size());
  PhysicalParams p = cfg.params;
  for (double t : times) {
    for (double rate : rates) {
      p.lambda_g = rate;
      rows.push_back(evaluate_point(*it, t, p, cfg.n_repetitions));
    }
  }
  return rows;
}

std::string format_real(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.11e", v);
  return buf;
}

void write_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << kCsvHeader << '\n';
  for (const auto& r : rows) {
    out << r.probe_name << ',' << format_real(r.t) << ',' << format_real(r.lambda_g) << ','
        << format_real(r.purity) << ',' << format_real(r.qfi_total) << ','
        << format_real(r.qfi_term_cov) << ',' << format_real(r.qfi_term_purity) << ','
        << format_real(r.cfi_best_theta) << ',' << format_real(r.crb) << '\n';
  }
}

std::optional<SweepRow> argmax_qfi(const std::vector<SweepRow>& rows, const std::string& probe) {
  std::optional<SweepRow> best;
  for (const auto& r : rows) {
    if (r.probe_name != probe) continue;
    if (!best || r.qfi_total > best->qfi_total) best = r;
  }
  return best;
}

double short_time_sample(const PhysicalParams& p) {
  return std::min(0.1 / p.omega_m, 0.01 / p.gamma);
}

std::string report_steady_state(const PhysicalParams& p) {
  p.validate();
  const NoiseKernel k = steady_noise_kernel(p);
  const double lambda = p.lambda_total();
  const double a_inf = lambda * k.a_per_lambda;
  const double b_inf = lambda * k.b_per_lambda;
  const GaussianState ss = steady_state(p);
  const QfiBreakdown q = steady_qfi(p);

  std::string out;
  char buf[160];
  auto line = [&](const char* key, double v) {
    std::snprintf(buf, sizeof buf, "%-16s = %.17g\n", key, v);
    out += buf;
  };
  line("omega_m", p.omega_m);
  line("gamma", p.gamma);
  line("n_th", p.n_th);
  line("lambda_g", p.lambda_g);
  line("lambda_T", p.lambda_T);
  line("lambda_total", lambda);
  line("n_eff", p.n_eff());
  line("A_inf", a_inf);
  line("B_inf", b_inf);
  line("B_inf/A_inf", lambda > 0.0 ? b_inf / a_inf : std::numeric_limits<double>::quiet_NaN());
  line("Q", p.quality_factor());
  line("-2Q", -2.0 * p.quality_factor());
  line("sigma_xx", ss.cov.xx);
  line("sigma_xp", ss.cov.xp);
  line("sigma_pp", ss.cov.pp);
  line("purity", purity(ss.cov));
  line("qfi_term_cov", q.term_cov);
  line("qfi_term_purity", q.term_purity);
  line("qfi_total", q.total);
  return out;
}

}  // namespace gdqfi
