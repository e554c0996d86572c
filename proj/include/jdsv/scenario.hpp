#pragma once

// Experiment descriptions, the bundled scenario catalogue and the CSV writer
// used by the command-line driver.
//
// A scenario is plain text, one `key = value` per line, `#` starts a comment.
// A repeated key overrides the earlier value, which lets bundled scenarios
// share a common block.

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "jdsv/asymptotics.hpp"
#include "jdsv/engine.hpp"
#include "jdsv/errors.hpp"
#include "jdsv/levy.hpp"
#include "jdsv/vol_models.hpp"

namespace jdsv {

struct ExperimentConfig {
  std::string name;
  std::string anchor;       // figure or table this scenario reproduces
  std::string description;
  ModelConfig model;
  SweepAxis axis = SweepAxis::sigma0;
  std::vector<double> values;
  std::size_t repetitions = 1;

  void validate() const {
    if (name.empty()) throw ConfigError("name", "scenario needs a name");
    if (values.empty()) throw ConfigError("sweep.values", "sweep needs at least one value");
    if (repetitions == 0) throw ConfigError("repetitions", "must be >= 1");
    for (double v : values) with_axis_value(model, axis, v).validate();
    if (axis == SweepAxis::strike)
      for (double v : values)
        if (!std::isfinite(v)) throw ConfigError("sweep.values", "strikes must be finite");
  }
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

inline double parse_double(std::string_view key, std::string_view text) {
  text = trim(text);
  double v = 0.0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end || text.empty())
    throw ConfigError(std::string(key), "expected a number, got '" + std::string(text) + "'");
  return v;
}

inline std::uint64_t parse_unsigned(std::string_view key, std::string_view text) {
  text = trim(text);
  // Accept scientific notation for path counts such as 2e6.
  const double v = parse_double(key, text);
  if (!(v >= 0.0) || v != std::floor(v) || v > 1.8e19)
    throw ConfigError(std::string(key), "expected a non-negative integer, got '" + std::string(text) + "'");
  return static_cast<std::uint64_t>(v);
}

inline bool parse_bool(std::string_view key, std::string_view text) {
  text = trim(text);
  if (text == "true" || text == "1" || text == "yes" || text == "on") return true;
  if (text == "false" || text == "0" || text == "no" || text == "off") return false;
  throw ConfigError(std::string(key), "expected true or false, got '" + std::string(text) + "'");
}

inline std::vector<double> parse_list(std::string_view key, std::string_view text) {
  std::vector<double> out;
  while (!text.empty()) {
    const auto comma = text.find(',');
    out.push_back(parse_double(key, text.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  return out;
}

}  // namespace detail

/// Parses scenario text. Every parameter is validated before returning.
inline ExperimentConfig parse_experiment(std::string_view text) {
  std::map<std::string, std::string, std::less<>> kv;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError("line " + std::to_string(line_no), "expected 'key = value'");
    kv[std::string(detail::trim(line.substr(0, eq)))] = std::string(detail::trim(line.substr(eq + 1)));
  }

  static const char* const known[] = {
      "name", "anchor", "description", "s0", "rho", "t_end", "n_steps", "n_paths", "seed", "antithetic",
      "jump_coupling", "repetitions", "vol.kind", "vol.sigma0", "vol.alpha", "vol.hurst", "levy.kind",
      "levy.intensity", "levy.jump_law", "levy.jump_mean", "levy.jump_scale", "levy.C", "levy.G", "levy.M",
      "levy.Y", "levy.truncation_eps", "levy.small_jump_gaussian", "levy.alpha", "levy.beta", "levy.delta",
      "sweep.axis", "sweep.values"};
  for (const auto& [key, value] : kv) {
    bool ok = false;
    for (const char* k : known) ok = ok || key == k;
    if (!ok) throw ConfigError(key, "unknown key");
  }

  auto get = [&](const char* key) -> std::optional<std::string_view> {
    const auto it = kv.find(key);
    if (it == kv.end()) return std::nullopt;
    return std::string_view(it->second);
  };
  auto require = [&](const char* key) -> std::string_view {
    if (auto v = get(key)) return *v;
    throw ConfigError(key, "missing required key");
  };
  auto number = [&](const char* key) { return detail::parse_double(key, require(key)); };

  ExperimentConfig cfg;
  cfg.name = std::string(require("name"));
  cfg.anchor = std::string(get("anchor").value_or(""));
  cfg.description = std::string(get("description").value_or(""));

  ModelConfig& m = cfg.model;
  if (auto v = get("s0")) m.s0 = detail::parse_double("s0", *v);
  if (auto v = get("rho")) m.rho = detail::parse_double("rho", *v);
  m.t_end = number("t_end");
  if (auto v = get("n_steps"); v && *v != "auto") m.n_steps = detail::parse_unsigned("n_steps", *v);
  if (auto v = get("n_paths")) m.n_paths = detail::parse_unsigned("n_paths", *v);
  if (auto v = get("seed")) m.seed = detail::parse_unsigned("seed", *v);
  if (auto v = get("antithetic")) m.antithetic = detail::parse_bool("antithetic", *v);
  if (auto v = get("jump_coupling")) {
    if (*v == "shared") m.jump_coupling = JumpCoupling::shared;
    else if (*v == "independent") m.jump_coupling = JumpCoupling::independent;
    else throw ConfigError("jump_coupling", "expected shared or independent");
  }
  if (auto v = get("repetitions")) cfg.repetitions = detail::parse_unsigned("repetitions", *v);

  const std::string_view vol_kind = require("vol.kind");
  const double sigma0 = number("vol.sigma0");
  if (vol_kind == "fractional_bergomi") {
    m.vol = VolModelSpec::fractional_bergomi(sigma0, number("vol.alpha"), number("vol.hurst"));
  } else if (vol_kind == "sabr_exp") {
    m.vol = VolModelSpec::sabr_exp(sigma0, number("vol.alpha"));
  } else if (vol_kind == "constant") {
    m.vol = VolModelSpec::constant(sigma0);
  } else {
    throw ConfigError("vol.kind", "expected fractional_bergomi, sabr_exp or constant");
  }

  const std::string_view levy_kind = get("levy.kind").value_or("none");
  if (levy_kind == "none") {
    m.levy = NoJumps{};
  } else if (levy_kind == "compound_poisson") {
    const std::string_view law = require("levy.jump_law");
    const double mean = number("levy.jump_mean");
    const double scale = number("levy.jump_scale");
    JumpLaw jl;
    if (law == "gaussian") jl = GaussianJumps{mean, scale};
    else if (law == "laplace") jl = LaplaceJumps{mean, scale};
    else throw ConfigError("levy.jump_law", "expected gaussian or laplace");
    m.levy = CompoundPoisson{number("levy.intensity"), jl};
  } else if (levy_kind == "cgmy") {
    Cgmy c{number("levy.C"), number("levy.G"), number("levy.M"), number("levy.Y"), kDefaultCgmyTruncation, false};
    if (auto v = get("levy.truncation_eps")) c.truncation_eps = detail::parse_double("levy.truncation_eps", *v);
    if (auto v = get("levy.small_jump_gaussian"))
      c.small_jump_gaussian = detail::parse_bool("levy.small_jump_gaussian", *v);
    m.levy = c;
  } else if (levy_kind == "nig") {
    m.levy = Nig{number("levy.alpha"), number("levy.beta"), number("levy.delta")};
  } else {
    throw ConfigError("levy.kind", "expected none, compound_poisson, cgmy or nig");
  }

  const std::string_view axis = require("sweep.axis");
  if (axis == "sigma0") cfg.axis = SweepAxis::sigma0;
  else if (axis == "maturity") cfg.axis = SweepAxis::maturity;
  else if (axis == "strike") cfg.axis = SweepAxis::strike;
  else throw ConfigError("sweep.axis", "expected sigma0, maturity or strike");
  cfg.values = detail::parse_list("sweep.values", require("sweep.values"));

  cfg.validate();
  return cfg;
}

inline ExperimentConfig load_experiment_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot read '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_experiment(text.str());
}

// ---------------------------------------------------------------------------
// Bundled scenarios

struct BundledScenario {
  std::string name;
  std::string anchor;
  std::string text;
};

namespace detail {

inline const char* const kSigmaGrid = "0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9,1.0,1.1,1.2,1.3,1.4";
inline const char* const kMaturityGrid = "0.0001,0.0002,0.0005,0.001,0.002,0.005,0.01";

inline std::string header(const std::string& name, const std::string& anchor, const std::string& description) {
  return "name = " + name + "\nanchor = " + anchor + "\ndescription = " + description + "\n";
}

inline std::string bergomi(double hurst, double s0, double t_end, double sigma0 = 0.3) {
  std::ostringstream o;
  o << "s0 = " << s0 << "\nrho = -0.3\nt_end = " << t_end << "\nn_paths = 2000000\nseed = 1\nantithetic = true\n"
    << "vol.kind = fractional_bergomi\nvol.sigma0 = " << sigma0 << "\nvol.alpha = 0.5\nvol.hurst = " << hurst << "\n";
  return o.str();
}

inline std::string compound_poisson(const char* law, double mean, double scale) {
  std::ostringstream o;
  o << "levy.kind = compound_poisson\nlevy.intensity = 5\nlevy.jump_law = " << law << "\nlevy.jump_mean = " << mean
    << "\nlevy.jump_scale = " << scale << "\n";
  return o.str();
}

inline std::string cgmy(double C, double G, double M, double Y) {
  std::ostringstream o;
  o << "levy.kind = cgmy\nlevy.C = " << C << "\nlevy.G = " << G << "\nlevy.M = " << M << "\nlevy.Y = " << Y
    << "\nlevy.truncation_eps = 0.0001\n";
  return o.str();
}

inline std::string sweep_sigma0() { return std::string("sweep.axis = sigma0\nsweep.values = ") + kSigmaGrid + "\n"; }
inline std::string sweep_maturity() {
  return std::string("sweep.axis = maturity\nsweep.values = ") + kMaturityGrid + "\n";
}

inline std::vector<BundledScenario> make_bundled() {
  std::vector<BundledScenario> out;
  auto add = [&](std::string name, std::string anchor, const std::string& description, const std::string& body) {
    out.push_back({name, anchor, header(name, anchor, description) + body});
  };
  const std::string nig_base =
      "s0 = 100\nrho = -0.3\nt_end = 0.00001\nn_paths = 2000000\nseed = 1\nantithetic = true\n"
      "vol.kind = sabr_exp\nvol.sigma0 = 0.2\nvol.alpha = 0.5\n"
      "levy.kind = nig\nlevy.alpha = 1.5\nlevy.beta = 0.5\nlevy.delta = 1.0\nsweep.axis = strike\n";

  // Compound Poisson, H > 1/2.
  add("fig1_level_H07", "Figure 1", "ATM level vs sigma0, H=0.7, Gaussian jumps N(0.01, 0.2)",
      bergomi(0.7, 10, 1e-5) + compound_poisson("gaussian", 0.01, 0.2) + sweep_sigma0());
  add("fig2_skew_H07_gauss_m001", "Figure 2", "ATM skew vs sigma0, H=0.7, Gaussian jumps N(-0.01, 0.2)",
      bergomi(0.7, 10, 1e-5) + compound_poisson("gaussian", -0.01, 0.2) + sweep_sigma0());
  add("fig2_skew_H07_gauss_0", "Figure 2", "ATM skew vs sigma0, H=0.7, Gaussian jumps N(0, 0.2)",
      bergomi(0.7, 10, 1e-5) + compound_poisson("gaussian", 0.0, 0.2) + sweep_sigma0());
  add("fig2_skew_H07_laplace_p001", "Figure 2", "ATM skew vs sigma0, H=0.7, Laplace jumps L(0.01, 1)",
      bergomi(0.7, 10, 1e-5) + compound_poisson("laplace", 0.01, 1.0) + sweep_sigma0());

  // Compound Poisson, H < 1/2.
  add("fig3a_level_H04_laplace", "Figure 3(a)", "ATM level vs sigma0, H=0.4, Laplace jumps L(0.1, 0.1)",
      bergomi(0.4, 100, 1e-3) + compound_poisson("laplace", 0.1, 0.1) + sweep_sigma0());
  for (const auto& [tag, mean] : {std::pair{"m01", -0.1}, std::pair{"0", 0.0}, std::pair{"p01", 0.1}})
    add(std::string("fig3b_skew_T_H04_gauss_") + tag, "Figure 3(b)",
        "ATM skew vs maturity, H=0.4, sigma0=0.3, Gaussian jumps N(" + std::to_string(mean) + ", 0.2)",
        bergomi(0.4, 100, 1e-3) + compound_poisson("gaussian", mean, 0.2) + sweep_maturity());
  for (const auto& [tag, mean] : {std::pair{"m0001", -0.001}, std::pair{"0", 0.0}, std::pair{"p0001", 0.001}})
    add(std::string("fig4_skew_T_H04_gauss_") + tag, "Figure 4",
        "ATM skew vs maturity, H=0.4, sigma0=0.3, Gaussian jumps N(" + std::to_string(mean) + ", 0.2)",
        bergomi(0.4, 100, 1e-3) + compound_poisson("gaussian", mean, 0.2) + sweep_maturity());
  add("fig4_skew_T_H04_nojump", "Figure 4", "ATM skew vs maturity, H=0.4, sigma0=0.3, no jumps",
      bergomi(0.4, 100, 1e-3) + sweep_maturity());

  // CGMY.
  add("fig5_cgmy_level_sym_H04", "Figure 5", "ATM level vs sigma0, H=0.4, symmetric CGMY(1, 5, 5, 1)",
      bergomi(0.4, 100, 1e-3) + cgmy(1, 5, 5, 1) + sweep_sigma0());
  add("fig6_cgmy_skew_sym_H07", "Figure 6", "ATM skew vs sigma0, H=0.7, symmetric CGMY(0.005, 5, 5, 1)",
      bergomi(0.7, 100, 1e-3) + cgmy(0.005, 5, 5, 1) + sweep_sigma0());
  add("fig7_cgmy_skew_sym_H05", "Figure 7", "ATM skew vs sigma0, H=0.5, symmetric CGMY(0.005, 5, 5, 1)",
      bergomi(0.5, 100, 1e-3) + cgmy(0.005, 5, 5, 1) + sweep_sigma0());
  add("fig8_cgmy_skew_sym_H04", "Figure 8", "Scaled ATM skew vs sigma0, H=0.4, symmetric CGMY(0.005, 5, 5, 1)",
      bergomi(0.4, 100, 1e-3) + cgmy(0.005, 5, 5, 1) + sweep_sigma0());
  add("fig9_cgmy_level_asym_H04", "Figure 9", "ATM level vs sigma0, H=0.4, CGMY(0.05, 2, 4, 1.5)",
      bergomi(0.4, 100, 1e-3) + cgmy(0.05, 2, 4, 1.5) + sweep_sigma0());
  add("fig10_cgmy_skew_asym_H07", "Figure 10", "ATM skew vs sigma0, H=0.7, CGMY(0.05, 2, 4, 1.5)",
      bergomi(0.7, 100, 1e-3) + cgmy(0.05, 2, 4, 1.5) + sweep_sigma0());

  // NIG.
  add("fig11_nig_iv_curve", "Figure 11", "Implied volatility vs strike near the money, NIG(1.5, 0.5, 1.0)",
      nig_base +
          "sweep.values = 95,95.5,96,96.5,97,97.5,98,98.5,99,99.5,99.9,99.99,100,100.001,100.002,100.003,"
          "100.004,100.01,100.1,101\n");
  add("tab1_nig_strike", "Table 1", "Implied volatility at the tabulated strikes, NIG(1.5, 0.5, 1.0)",
      nig_base + "sweep.values = 95,96,97,98,99,100,100.001,100.002,100.003,100.004\n");

  // Comparisons.
  add("fig12_skew_T_H04_compare_gauss", "Figure 12", "ATM skew vs maturity, H=0.4, Gaussian jumps N(0.01, 0.2)",
      bergomi(0.4, 100, 1e-3) + compound_poisson("gaussian", 0.01, 0.2) + sweep_maturity());
  add("fig12_skew_T_H04_compare_cgmy", "Figure 12", "ATM skew vs maturity, H=0.4, CGMY(0.05, 2, 4, 1.5)",
      bergomi(0.4, 100, 1e-3) + cgmy(0.05, 2, 4, 1.5) + sweep_maturity());
  add("fig12_skew_T_H04_compare_nojump", "Figure 12", "ATM skew vs maturity, H=0.4, no jumps",
      bergomi(0.4, 100, 1e-3) + sweep_maturity());
  add("fig13_skew_H07_compare_laplace", "Figure 13", "ATM skew vs sigma0, H=0.7, Laplace jumps L(0.01, 1)",
      bergomi(0.7, 100, 1e-3) + compound_poisson("laplace", 0.01, 1.0) + sweep_sigma0());
  add("fig13_skew_H07_compare_cgmy", "Figure 13", "ATM skew vs sigma0, H=0.7, CGMY(0.05, 2, 4, 1.5)",
      bergomi(0.7, 100, 1e-3) + cgmy(0.05, 2, 4, 1.5) + sweep_sigma0());
  add("fig13_skew_H07_compare_nojump", "Figure 13", "ATM skew vs sigma0, H=0.7, no jumps",
      bergomi(0.7, 100, 1e-3) + sweep_sigma0());
  return out;
}

}  // namespace detail

inline const std::vector<BundledScenario>& bundled_scenarios() {
  static const std::vector<BundledScenario> all = detail::make_bundled();
  return all;
}

/// Bundled scenarios whose name contains `filter` (all when empty).
inline std::vector<BundledScenario> list_scenarios(std::string_view filter = {}) {
  std::vector<BundledScenario> out;
  for (const auto& s : bundled_scenarios())
    if (filter.empty() || s.name.find(filter) != std::string::npos) out.push_back(s);
  return out;
}

inline std::optional<BundledScenario> find_bundled(std::string_view name) {
  for (const auto& s : bundled_scenarios())
    if (s.name == name) return s;
  return std::nullopt;
}

/// Resolves a bundled scenario name or a path to a scenario file.
inline ExperimentConfig resolve_experiment(const std::string& name_or_path) {
  if (auto s = find_bundled(name_or_path)) return parse_experiment(s->text);
  if (std::ifstream(name_or_path).good()) return load_experiment_file(name_or_path);
  throw ConfigError("scenario", "'" + name_or_path + "' is neither a bundled scenario nor a readable file");
}

// ---------------------------------------------------------------------------
// Running and reporting

struct ResultRow {
  double sweep_value = 0.0;
  IvPoint mc;
  double theory_level = 0.0;
  AsymptoteReport theory;
  std::string error;
  std::string error_module;  // non-empty for numerical failures
};

struct ExperimentResult {
  std::vector<ResultRow> rows;
};

inline AsymptoteReport theory_for(const ModelConfig& model) {
  return theoretical_skew(model.vol, model.levy, model.rho);
}

namespace detail {

// Pools independent repetitions of equal size.
inline McEstimate pool(const std::vector<McEstimate>& parts) {
  McEstimate out;
  double var = 0.0;
  for (const auto& p : parts) {
    out.mean += p.mean;
    var += p.std_error * p.std_error;
    out.n_samples += p.n_samples;
  }
  const double r = static_cast<double>(parts.size());
  out.mean /= r;
  out.std_error = std::sqrt(var) / r;
  return out;
}

}  // namespace detail

inline ExperimentResult run_experiment(const ExperimentConfig& config) {
  config.validate();
  std::vector<std::vector<SweepRow>> reps;
  for (std::size_t r = 0; r < config.repetitions; ++r) {
    ModelConfig model = config.model;
    model.seed = config.model.seed + r;
    reps.push_back(sweep(model, config.axis, config.values));
  }
  ExperimentResult result;
  for (std::size_t i = 0; i < config.values.size(); ++i) {
    ResultRow row;
    row.sweep_value = config.values[i];
    std::vector<McEstimate> level, skew, scaled;
    for (const auto& rep : reps) {
      level.push_back(rep[i].point.level);
      skew.push_back(rep[i].point.skew);
      scaled.push_back(rep[i].point.scaled_skew);
      if (row.error.empty()) {
        row.error = rep[i].error;
        row.error_module = rep[i].error_module;
      }
    }
    row.mc.level = detail::pool(level);
    row.mc.skew = detail::pool(skew);
    row.mc.scaled_skew = detail::pool(scaled);
    row.mc.skew_hypothesis_violated = reps.front()[i].point.skew_hypothesis_violated;
    const ModelConfig model = with_axis_value(config.model, config.axis, config.values[i]);
    row.theory_level = theoretical_level(model.vol);
    row.theory = theory_for(model);
    result.rows.push_back(std::move(row));
  }
  return result;
}

/// Fixed-precision, locale-independent number formatting for CSV output.
inline std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0.0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

inline constexpr const char* kCsvHeader =
    "sweep_value,mc_level,mc_level_se,mc_skew,mc_skew_se,mc_scaled_skew,mc_scaled_skew_se,theory_level,"
    "theory_skew_or_scaled,regime,c1";

inline void write_csv(std::ostream& out, const ExperimentResult& result) {
  out << kCsvHeader << '\n';
  for (const auto& r : result.rows) {
    out << format_number(r.sweep_value) << ',' << format_number(r.mc.level.mean) << ','
        << format_number(r.mc.level.std_error) << ',' << format_number(r.mc.skew.mean) << ','
        << format_number(r.mc.skew.std_error) << ',' << format_number(r.mc.scaled_skew.mean) << ','
        << format_number(r.mc.scaled_skew.std_error) << ',' << format_number(r.theory_level) << ','
        << format_number(r.theory.skew_or_scaled_skew) << ',' << to_string(r.theory.regime) << ','
        << format_number(r.theory.c1.value) << '\n';
  }
}

inline constexpr const char* kTheoryHeader =
    "scenario,level,regime,kind,skew_or_scaled_skew,raw_skew_divergence,c1,c1_provenance";

inline void write_theory_row(std::ostream& out, const std::string& scenario, const AsymptoteReport& r) {
  out << scenario << ',' << format_number(r.level) << ',' << to_string(r.regime) << ',' << to_string(r.kind) << ','
      << format_number(r.skew_or_scaled_skew) << ',' << r.raw_skew_divergence << ',' << format_number(r.c1.value)
      << ',' << to_string(r.c1.provenance) << '\n';
}

}  // namespace jdsv
