#pragma once

// Command-line front end: argument parsing, scenario dispatch and CSV output.

#include <CLI11.hpp>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "hfarray/error.hpp"
#include "hfarray/experiments.hpp"
#include "hfarray/validation.hpp"
#include "hfarray/version.hpp"

namespace hfarray::cli {

enum class Scenario { single_real, scan_n, scan_width, scan_sep, scan_vc, random, emissive, validate };

inline const std::map<std::string, Scenario>& scenario_names() {
  static const std::map<std::string, Scenario> names{
      {"single-real", Scenario::single_real}, {"scan-n", Scenario::scan_n},   {"scan-width", Scenario::scan_width},
      {"scan-sep", Scenario::scan_sep},       {"scan-vc", Scenario::scan_vc}, {"random", Scenario::random},
      {"emissive", Scenario::emissive},       {"validate", Scenario::validate}};
  return names;
}

inline std::string to_string(Scenario s) {
  for (const auto& [name, value] : scenario_names()) {
    if (value == s) return name;
  }
  return "unknown";
}

struct RunConfig {
  Scenario scenario = Scenario::validate;

  std::optional<double> v_r, v_i, v_c, delta, e, b, l_gap;
  std::optional<std::size_t> n, n_max;
  // Scan grid over the scenario's independent variable; e_start/e_stop for
  // the emissive energy grid.
  std::optional<double> start, stop, e_start, e_stop;
  std::optional<std::size_t> points;

  std::uint64_t seed = 1;
  std::optional<double> low, high;
  RandomField random_field = RandomField::v_c;
  DeltaConvention delta_convention = DeltaConvention::signed_value;

  double threshold = default_saturation_threshold;
  std::size_t window = default_saturation_window;
  std::size_t n_ref = 100;
  double peak_factor = 5.0;

  std::string out;  // empty or "-" writes to stdout
};

/// --help output; not an error.
struct HelpRequested {
  std::string text;
};

namespace detail {

struct Flag {
  const char* name;
  bool present;
};

inline void require(std::vector<std::string>& missing, const std::string& scenario, std::initializer_list<Flag> flags) {
  for (const auto& f : flags) {
    if (!f.present) missing.push_back("missing required flag --" + std::string(f.name) + " for " + scenario);
  }
}

}  // namespace detail

/// Long flags mirror the physics symbols; `--config FILE` loads the same keys
/// from `key = value` lines and flags on the command line take precedence.
/// Throws error(config_error) with one line per problem.
inline RunConfig parse_args(int argc, const char* const* argv) {
  RunConfig cfg;
  CLI::App app{"Tunneling times through arrays of complex barriers", "hfarray"};
  app.set_version_flag("--version", std::string(version));

  std::string scenario;
  std::vector<std::string> names;
  for (const auto& [name, value] : scenario_names()) names.push_back(name);
  app.add_option("scenario", scenario, "Scenario to run")->required()->check(CLI::IsMember(names));

  app.add_option("--vr", cfg.v_r, "Real barrier height");
  app.add_option("--vi", cfg.v_i, "Inelastic channel potential");
  app.add_option("--vc", cfg.v_c, "Elastic/inelastic coupling (>= 0)");
  app.add_option("--delta", cfg.delta, "Inelastic energy shift (signed)");
  app.add_option("--e", cfg.e, "Incident energy");
  app.add_option("--b", cfg.b, "Barrier width");
  app.add_option("--l", cfg.l_gap, "Gap between consecutive barriers");
  app.add_option("--n", cfg.n, "Barrier count (scan-sep)");
  app.add_option("--n-max", cfg.n_max, "Largest barrier count");
  app.add_option("--start", cfg.start, "Scan grid start");
  app.add_option("--stop", cfg.stop, "Scan grid stop");
  app.add_option("--e-start", cfg.e_start, "Energy grid start (emissive)");
  app.add_option("--e-stop", cfg.e_stop, "Energy grid stop (emissive)");
  app.add_option("--points", cfg.points, "Grid points");
  app.add_option("--seed", cfg.seed, "Random array seed");
  app.add_option("--low", cfg.low, "Random range low");
  app.add_option("--high", cfg.high, "Random range high");
  app.add_option("--random-field", cfg.random_field, "Randomized field: vc or delta")
      ->transform(CLI::CheckedTransformer(std::map<std::string, RandomField>{{"vc", RandomField::v_c},
                                                                             {"delta", RandomField::delta}}));
  app.add_option("--delta-convention", cfg.delta_convention, "signed or negated")
      ->transform(CLI::CheckedTransformer(std::map<std::string, DeltaConvention>{
          {"signed", DeltaConvention::signed_value}, {"negated", DeltaConvention::negated}}));
  app.add_option("--threshold", cfg.threshold, "Saturation threshold for the HF verdict");
  app.add_option("--window", cfg.window, "Saturation window");
  app.add_option("--n-ref", cfg.n_ref, "Reference barrier count for relative times (emissive)");
  app.add_option("--peak-factor", cfg.peak_factor, "Peak level as a multiple of |median tau| (scan-sep)");
  app.add_option("--out", cfg.out, "Output CSV path ('-' for stdout)");
  app.set_config("--config", "", "Read flags from a key = value file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    throw HelpRequested{app.help()};
  } catch (const CLI::CallForVersion&) {
    throw HelpRequested{std::string(version) + "\n"};
  } catch (const CLI::ParseError& err) {
    throw error(errc::config_error, err.what());
  }
  cfg.scenario = scenario_names().at(scenario);

  std::vector<std::string> missing;
  const bool vr = cfg.v_r.has_value(), vi = cfg.v_i.has_value(), vc = cfg.v_c.has_value(),
             delta = cfg.delta.has_value(), e = cfg.e.has_value(), b = cfg.b.has_value(),
             l = cfg.l_gap.has_value(), n_max = cfg.n_max.has_value();
  switch (cfg.scenario) {
    case Scenario::single_real:
      detail::require(missing, scenario, {{"vr", vr}, {"e", e}});
      break;
    case Scenario::scan_n:
      detail::require(missing, scenario,
                      {{"vr", vr}, {"vi", vi}, {"vc", vc}, {"delta", delta}, {"e", e}, {"b", b}, {"l", l}, {"n-max", n_max}});
      break;
    case Scenario::scan_width:
      detail::require(missing, scenario, {{"vr", vr}, {"vi", vi}, {"vc", vc}, {"delta", delta}, {"e", e}, {"l", l}});
      break;
    case Scenario::scan_sep:
      detail::require(missing, scenario, {{"vr", vr}, {"vi", vi}, {"vc", vc}, {"delta", delta}, {"e", e}, {"b", b}});
      break;
    case Scenario::scan_vc:
      detail::require(missing, scenario,
                      {{"vr", vr}, {"vi", vi}, {"delta", delta}, {"e", e}, {"b", b}, {"l", l}, {"n-max", n_max}});
      break;
    case Scenario::random:
      detail::require(missing, scenario,
                      {{"vr", vr}, {"vi", vi}, {"e", e}, {"b", b}, {"l", l}, {"n-max", n_max},
                       {"low", cfg.low.has_value()}, {"high", cfg.high.has_value()}});
      if (cfg.random_field == RandomField::v_c) detail::require(missing, scenario, {{"delta", delta}});
      if (cfg.random_field == RandomField::delta) detail::require(missing, scenario, {{"vc", vc}});
      break;
    case Scenario::emissive:
      detail::require(missing, scenario,
                      {{"vr", vr}, {"vi", vi}, {"vc", vc}, {"delta", delta}, {"b", b}, {"l", l}, {"n-max", n_max}});
      break;
    case Scenario::validate:
      break;
  }
  if (!missing.empty()) {
    std::string msg;
    for (const auto& line : missing) msg += (msg.empty() ? "" : "\n") + line;
    throw error(errc::config_error, msg);
  }
  return cfg;
}

inline RunConfig parse_args(const std::vector<std::string>& args) {
  std::vector<const char*> argv{"hfarray"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return parse_args(static_cast<int>(argv.size()), argv.data());
}

namespace detail {

inline std::string opt_text(const std::optional<double>& v) { return v ? format_double(*v) : "unset"; }
inline std::string opt_text(const std::optional<std::size_t>& v) { return v ? std::to_string(*v) : "unset"; }

inline Grid grid_or(const RunConfig& cfg, double start, double stop, std::size_t points) {
  return {cfg.start.value_or(start), cfg.stop.value_or(stop), cfg.points.value_or(points)};
}

inline Grid energy_grid(const RunConfig& cfg) {
  return {cfg.e_start.value_or(1e-5), cfg.e_stop.value_or(8e-4), cfg.points.value_or(10)};
}

inline ArrayParams array_params(const RunConfig& cfg) {
  ArrayParams p;
  p.v_r = cfg.v_r.value_or(0.0);
  p.v_i = cfg.v_i.value_or(0.0);
  p.delta = cfg.delta.value_or(0.0);
  p.e = cfg.e.value_or(0.0);
  p.b = cfg.b.value_or(0.0);
  p.l_gap = cfg.l_gap.value_or(0.0);
  return p;
}

}  // namespace detail

/// Comment block recording every parameter, then the fixed header row, then
/// one row per record with 17 significant digits.
inline void write_csv(std::ostream& os, const RunConfig& cfg, const std::vector<ScanRecord>& records) {
  os << "# hfarray " << version << "\n"
     << "# scenario = " << to_string(cfg.scenario) << "\n"
     << "# units = hbar=1, 2m=1\n"
     << "# vr = " << detail::opt_text(cfg.v_r) << "\n"
     << "# vi = " << detail::opt_text(cfg.v_i) << "\n"
     << "# vc = " << detail::opt_text(cfg.v_c) << "\n"
     << "# delta = " << detail::opt_text(cfg.delta) << "\n"
     << "# delta-convention = " << (cfg.delta_convention == DeltaConvention::signed_value ? "signed" : "negated") << "\n"
     << "# e = " << detail::opt_text(cfg.e) << "\n"
     << "# b = " << detail::opt_text(cfg.b) << "\n"
     << "# l = " << detail::opt_text(cfg.l_gap) << "\n"
     << "# n = " << detail::opt_text(cfg.n) << "\n"
     << "# n-max = " << detail::opt_text(cfg.n_max) << "\n"
     << "# start = " << detail::opt_text(cfg.start) << "\n"
     << "# stop = " << detail::opt_text(cfg.stop) << "\n"
     << "# e-start = " << detail::opt_text(cfg.e_start) << "\n"
     << "# e-stop = " << detail::opt_text(cfg.e_stop) << "\n"
     << "# points = " << detail::opt_text(cfg.points) << "\n"
     << "# seed = " << cfg.seed << "\n"
     << "# random-field = " << (cfg.random_field == RandomField::v_c ? "vc" : "delta") << "\n"
     << "# low = " << detail::opt_text(cfg.low) << "\n"
     << "# high = " << detail::opt_text(cfg.high) << "\n"
     << "# threshold = " << format_double(cfg.threshold) << "\n"
     << "# window = " << cfg.window << "\n"
     << "# n-ref = " << cfg.n_ref << "\n"
     << "# peak-factor = " << format_double(cfg.peak_factor) << "\n";
  os << "scenario,x,tau,T,R,absorptivity,flags\n";
  for (const auto& r : records) {
    std::string flags;
    for (const auto& f : r.flags) flags += (flags.empty() ? "" : ";") + f;
    os << r.scenario << ',' << format_double(r.x) << ',' << format_double(r.tau) << ','
       << format_double(r.t_coeff) << ',' << format_double(r.r_coeff) << ',' << format_double(r.absorptivity)
       << ',' << flags << '\n';
  }
}

inline constexpr int exit_ok = 0;
inline constexpr int exit_config = 1;
inline constexpr int exit_numerical = 2;

struct Outcome {
  std::vector<ScanRecord> records;
  std::string summary;
};

namespace detail {

inline std::string join_hf(const HfSweep& sweep, const char* label) {
  std::string yes;
  for (const auto& p : sweep.points) {
    if (p.verdict.hf) yes += (yes.empty() ? "" : ",") + format_double(p.x);
  }
  return std::string("HF at ") + label + "=" + (yes.empty() ? "none" : yes);
}

inline std::string verdict_text(const HfVerdict& v) {
  return std::string("HF: ") + (v.hf ? "yes" : "no") + " (metric=" + format_double(v.metric) + ")";
}

inline Outcome execute(const RunConfig& cfg) {
  Outcome out;
  const HfCriterion crit{cfg.window, cfg.threshold};
  const ArrayParams base = array_params(cfg);
  switch (cfg.scenario) {
    case Scenario::single_real: {
      out.records = scan_single_real_width(*cfg.v_r, *cfg.e, grid_or(cfg, 0.1, 10.0, 100));
      out.summary = verdict_text(classify_hf(out.records, crit));
      break;
    }
    case Scenario::scan_n: {
      out.records = scan_barrier_count(base, *cfg.v_c, *cfg.n_max);
      out.summary = verdict_text(classify_hf(out.records, crit));
      break;
    }
    case Scenario::scan_width: {
      const HfSweep sweep = scan_width_hf(base, *cfg.v_c, grid_or(cfg, 0.1, 2.0, 20), cfg.n_max.value_or(20), crit);
      out.records = sweep.records;
      out.summary = join_hf(sweep, "b");
      break;
    }
    case Scenario::scan_vc: {
      const HfSweep sweep = scan_coupling_hf(base, grid_or(cfg, 0.0, 2.0, 21), *cfg.n_max, crit);
      out.records = sweep.records;
      out.summary = join_hf(sweep, "vc");
      break;
    }
    case Scenario::scan_sep: {
      const SeparationScan scan =
          scan_separation(base, *cfg.v_c, grid_or(cfg, 0.01, 4.0, 400), cfg.n.value_or(20), cfg.peak_factor);
      out.records = scan.records;
      out.summary = "peaks: " + std::to_string(scan.peaks.size());
      if (!scan.peaks.empty()) {
        out.summary += " (first L=" + format_double(scan.peaks.front().x) +
                       " tau=" + format_double(scan.peaks.front().tau) + ")";
      }
      break;
    }
    case Scenario::random: {
      RandomArrayConfig rc;
      rc.seed = cfg.seed;
      rc.low = *cfg.low;
      rc.high = *cfg.high;
      rc.field = cfg.random_field;
      rc.v_r = *cfg.v_r;
      rc.v_i = *cfg.v_i;
      rc.v_c = cfg.v_c.value_or(0.0);
      rc.delta = cfg.delta.value_or(0.0);
      out.records = scan_random(rc, *cfg.n_max, *cfg.b, *cfg.l_gap, *cfg.e);
      out.summary = verdict_text(classify_hf(out.records, crit));
      break;
    }
    case Scenario::emissive: {
      const auto scans = scan_emissive(base, *cfg.v_c, energy_grid(cfg), *cfg.n_max, cfg.n_ref,
                                       cfg.delta_convention, crit);
      std::string yes;
      for (const auto& s : scans) {
        out.records.insert(out.records.end(), s.records.begin(), s.records.end());
        if (s.verdict.hf) yes += (yes.empty() ? "" : ",") + format_double(s.e);
      }
      out.summary = "HF at E=" + (yes.empty() ? std::string("none") : yes);
      break;
    }
    case Scenario::validate:
      break;
  }
  return out;
}

inline int run_validate(std::ostream& console) {
  const auto results = validation::run_all();
  std::size_t passed = 0;
  for (const auto& r : results) {
    console << (r.passed ? "PASS " : "FAIL ") << r.name << ": " << r.detail << "\n";
    passed += r.passed ? 1 : 0;
  }
  console << "validate: " << passed << "/" << results.size() << " checks passed\n";
  return passed == results.size() ? exit_ok : exit_numerical;
}

}  // namespace detail

/// Runs the scenario, writes the CSV and prints a one-line summary.
/// Returns 0 on success, 1 on configuration errors and 2 when a numerical
/// failure aborted the run (or left no usable record).
inline int run(const RunConfig& cfg, std::ostream& console, std::ostream& diagnostics) {
  if (cfg.scenario == Scenario::validate) return detail::run_validate(console);

  Outcome outcome;
  try {
    outcome = detail::execute(cfg);
  } catch (const error& err) {
    diagnostics << "hfarray: " << err.what() << "\n";
    return is_numerical(err.code()) ? exit_numerical : exit_config;
  }

  std::size_t failed = 0;
  for (const auto& r : outcome.records) failed += r.ok() ? 0 : 1;

  const bool to_stdout = cfg.out.empty() || cfg.out == "-";
  if (to_stdout) {
    write_csv(console, cfg, outcome.records);
  } else {
    std::ofstream file(cfg.out, std::ios::binary);
    if (!file) {
      diagnostics << "hfarray: cannot open " << cfg.out << " for writing\n";
      return exit_config;
    }
    write_csv(file, cfg, outcome.records);
  }

  std::ostream& summary_stream = to_stdout ? diagnostics : console;
  summary_stream << to_string(cfg.scenario) << ": " << outcome.records.size() << " rows"
                 << (to_stdout ? "" : " written to " + cfg.out) << "; " << outcome.summary;
  if (failed > 0) summary_stream << "; " << failed << " rows flagged with numerical errors";
  summary_stream << "\n";
  return failed > 0 && failed == outcome.records.size() ? exit_numerical : exit_ok;
}

inline int main(int argc, const char* const* argv, std::ostream& console, std::ostream& diagnostics) {
  RunConfig cfg;
  try {
    cfg = parse_args(argc, argv);
  } catch (const HelpRequested& help) {
    console << help.text;
    return exit_ok;
  } catch (const error& err) {
    std::istringstream lines(err.what());
    std::string line;
    bool first = true;
    while (std::getline(lines, line)) {
      // Drop the error-code prefix from the first line.
      if (first && line.rfind("ConfigError: ", 0) == 0) line = line.substr(13);
      diagnostics << "hfarray: " << line << "\n";
      first = false;
    }
    return exit_config;
  }
  return run(cfg, console, diagnostics);
}

}  // namespace hfarray::cli
