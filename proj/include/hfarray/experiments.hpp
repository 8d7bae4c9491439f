#pragma once

// Deterministic parameter sweeps over barrier arrays. Every runner is a pure
// function of its arguments; grid points are evaluated in order.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "hfarray/array.hpp"
#include "hfarray/error.hpp"
#include "hfarray/time.hpp"
#include "hfarray/twochannel.hpp"

namespace hfarray {

struct ScanRecord {
  std::string scenario;
  double x = 0.0;
  double tau = std::numeric_limits<double>::quiet_NaN();
  double t_coeff = std::numeric_limits<double>::quiet_NaN();
  double r_coeff = std::numeric_limits<double>::quiet_NaN();
  double absorptivity = std::numeric_limits<double>::quiet_NaN();
  std::vector<std::string> flags;

  /// False when a numerical error replaced the values by NaN.
  bool ok() const noexcept { return std::isfinite(tau); }
};

/// Linearly spaced, strictly increasing grid.
struct Grid {
  double start = 0.0;
  double stop = 0.0;
  std::size_t points = 0;

  std::vector<double> values() const {
    if (points == 0 || !std::isfinite(start) || !std::isfinite(stop) || (points == 1 && start != stop) ||
        (points > 1 && !(stop > start))) {
      std::ostringstream os;
      os << "grid needs points >= 1 and start < stop (got " << start << ".." << stop << ", " << points << ")";
      throw error(errc::invalid_grid, os.str());
    }
    std::vector<double> out(points);
    for (std::size_t j = 0; j < points; ++j) {
      out[j] = points == 1 ? start
                           : start + (stop - start) * static_cast<double>(j) / static_cast<double>(points - 1);
    }
    return out;
  }
};

/// Parameters shared by every barrier of a uniform array, except v_c which
/// the runners take separately.
struct ArrayParams {
  double v_r = 0.0;
  double v_i = 0.0;
  double delta = 0.0;
  double e = 0.0;
  double b = 0.0;
  double l_gap = 0.0;
};

struct HfVerdict {
  double metric = std::numeric_limits<double>::quiet_NaN();
  bool hf = false;
};

struct HfCriterion {
  std::size_t window = default_saturation_window;
  double threshold = default_saturation_threshold;
};

inline std::string format_double(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

/// tau, T, R and absorptivity of `arr` at energy e. Numerical failures are
/// recorded as an `error=<name>` flag with NaN values instead of thrown.
inline ScanRecord evaluate_record(std::string scenario, double x, const ArraySpec& arr, double e,
                                  const TimeOptions& opts = {}) {
  ScanRecord rec;
  rec.scenario = std::move(scenario);
  rec.x = x;
  try {
    bool degenerate = false;
    for (const auto& barrier : arr.barriers) degenerate = degenerate || channel_kinematics(barrier, e).degenerate_d;
    const TunnelingTimeResult t = tunneling_time(arr, e, opts);
    const ScatteringCoefficients c = scattering_coefficients(scattering_amplitudes(total_transfer_matrix(arr, e)));
    rec.tau = t.tau;
    rec.t_coeff = c.t_coeff;
    rec.r_coeff = c.r_l_coeff;
    rec.absorptivity = c.absorptivity;
    if (degenerate) rec.flags.emplace_back("degenerate-d");
    if (t.halvings > 0) rec.flags.push_back("retries=" + std::to_string(t.halvings));
  } catch (const error& err) {
    if (!is_numerical(err.code())) throw;
    rec.flags.push_back("error=" + std::string(to_string(err.code())));
  }
  return rec;
}

inline std::vector<double> taus_of(const std::vector<ScanRecord>& records) {
  std::vector<double> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back(r.tau);
  return out;
}

/// Saturation of tau over the records' order. Any failed record makes the
/// metric NaN and the verdict negative.
inline HfVerdict classify_hf(const std::vector<ScanRecord>& records, const HfCriterion& crit = {}) {
  HfVerdict v;
  const auto taus = taus_of(records);
  v.metric = saturation_metric(taus, crit.window);
  v.hf = v.metric < crit.threshold;
  return v;
}

/// tau(b) of a single real barrier (v_c = 0) over a width grid.
inline std::vector<ScanRecord> scan_single_real_width(double v_r, double e, const Grid& b_grid) {
  if (!(e > 0.0)) throw error(errc::non_positive_energy, "energy must be positive");
  if (!(e < v_r)) throw error(errc::above_barrier, "single-real scan needs 0 < E < v_r");
  std::vector<ScanRecord> out;
  for (double b : b_grid.values()) {
    out.push_back(evaluate_record("single-real", b, build_uniform_array(1, b, 0.0, v_r, 0.0, 0.0, 0.0), e));
  }
  return out;
}

/// Records for n = 1 .. count() of the leftmost barriers of `full`.
inline std::vector<ScanRecord> scan_prefixes(const std::string& scenario, const ArraySpec& full, double e) {
  std::vector<ScanRecord> out;
  out.reserve(full.count());
  for (std::size_t n = 1; n <= full.count(); ++n) {
    out.push_back(evaluate_record(scenario, static_cast<double>(n), prefix(full, n), e));
  }
  return out;
}

/// tau(n), T, R, absorptivity for n = 1 .. n_max identical barriers.
inline std::vector<ScanRecord> scan_barrier_count(const ArrayParams& base, double v_c, std::size_t n_max) {
  if (n_max < 2) throw error(errc::invalid_range, "n_max must be at least 2");
  const ArraySpec full = build_uniform_array(n_max, base.b, base.l_gap, base.v_r, base.v_i, v_c, base.delta);
  return scan_prefixes("scan-n", full, base.e);
}

/// One swept parameter value with its full tau(n) series.
struct HfSweepPoint {
  double x = 0.0;
  std::vector<ScanRecord> series;   // n = 1 .. n_probe
  HfVerdict verdict;
};

struct HfSweep {
  std::vector<ScanRecord> records;  // one per x: values at n = n_probe, hf flag
  std::vector<HfSweepPoint> points;
};

namespace detail {

template <class MakeParams>
HfSweep hf_sweep(const std::string& scenario, const std::vector<double>& xs, std::size_t n_probe,
                 const HfCriterion& crit, MakeParams make) {
  if (n_probe <= crit.window) throw error(errc::window_too_large, "n_probe must exceed the saturation window");
  HfSweep out;
  for (double x : xs) {
    const auto [params, v_c] = make(x);
    HfSweepPoint pt;
    pt.x = x;
    pt.series = scan_barrier_count(params, v_c, n_probe);
    for (auto& r : pt.series) r.scenario = scenario;
    pt.verdict = classify_hf(pt.series, crit);

    ScanRecord rec = pt.series.back();
    rec.x = x;
    rec.flags.push_back(pt.verdict.hf ? "hf" : "no-hf");
    rec.flags.push_back("metric=" + format_double(pt.verdict.metric));
    out.records.push_back(std::move(rec));
    out.points.push_back(std::move(pt));
  }
  return out;
}

}  // namespace detail

/// HF classification of tau(n), n <= n_probe, for each barrier width; the
/// records double as the tau(b) curve at n = n_probe.
inline HfSweep scan_width_hf(const ArrayParams& base, double v_c, const Grid& b_grid, std::size_t n_probe,
                             const HfCriterion& crit = {}) {
  return detail::hf_sweep("scan-width", b_grid.values(), n_probe, crit, [&](double b) {
    ArrayParams p = base;
    p.b = b;
    return std::pair{p, v_c};
  });
}

/// HF classification for each coupling strength at fixed geometry.
inline HfSweep scan_coupling_hf(const ArrayParams& base, const Grid& vc_grid, std::size_t n_max,
                                const HfCriterion& crit = {}) {
  return detail::hf_sweep("scan-vc", vc_grid.values(), n_max, crit,
                          [&](double v_c) { return std::pair{base, v_c}; });
}

struct Peak {
  double x = 0.0;
  double tau = 0.0;
};

inline double median_of(std::vector<double> values) {
  std::erase_if(values, [](double v) { return !std::isfinite(v); });
  if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(values.begin(), values.end());
  const std::size_t mid = values.size() / 2;
  return values.size() % 2 ? values[mid] : 0.5 * (values[mid - 1] + values[mid]);
}

/// Interior local maxima of tau exceeding factor * |median tau|.
inline std::vector<Peak> detect_peaks(const std::vector<double>& xs, const std::vector<double>& taus,
                                      double factor = 5.0) {
  std::vector<Peak> peaks;
  if (xs.size() != taus.size() || taus.size() < 3) return peaks;
  const double level = factor * std::abs(median_of(taus));
  for (std::size_t j = 1; j + 1 < taus.size(); ++j) {
    if (taus[j] > taus[j - 1] && taus[j] >= taus[j + 1] && taus[j] > level) peaks.push_back({xs[j], taus[j]});
  }
  return peaks;
}

struct SeparationScan {
  std::vector<ScanRecord> records;  // x = L
  std::vector<Peak> peaks;
  double median_tau = 0.0;
};

/// tau(L) for a fixed count of barriers, with resonance peaks.
inline SeparationScan scan_separation(const ArrayParams& base, double v_c, const Grid& l_grid,
                                      std::size_t n = 20, double peak_factor = 5.0) {
  SeparationScan out;
  std::vector<double> xs;
  for (double l : l_grid.values()) {
    const ArraySpec arr = build_uniform_array(n, base.b, l, base.v_r, base.v_i, v_c, base.delta);
    out.records.push_back(evaluate_record("scan-sep", l, arr, base.e));
    xs.push_back(l);
  }
  const auto taus = taus_of(out.records);
  out.median_tau = median_of(taus);
  out.peaks = detect_peaks(xs, taus, peak_factor);
  for (const auto& p : out.peaks) {
    for (auto& r : out.records) {
      if (r.x == p.x) r.flags.emplace_back("peak");
    }
  }
  return out;
}

/// Largest tau of the scan within [center - half_width, center + half_width].
inline double max_tau_near(const SeparationScan& scan, double center, double half_width) {
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& r : scan.records) {
    if (r.ok() && std::abs(r.x - center) <= half_width) best = std::max(best, r.tau);
  }
  return best;
}

/// SplitMix64 evaluated at counter index: sample j of a seed is
/// mix(seed + (j + 1) * 0x9E3779B97F4A7C15), independent of platform and of
/// how many samples were drawn before it.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) noexcept : seed_(seed) {}

  std::uint64_t at(std::uint64_t index) const noexcept {
    std::uint64_t z = seed_ + (index + 1) * 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform(std::uint64_t index) const noexcept {
    return static_cast<double>(at(index) >> 11) * 0x1.0p-53;
  }

 private:
  std::uint64_t seed_;
};

enum class RandomField { v_c, delta };

struct RandomArrayConfig {
  std::uint64_t seed = 1;
  double low = 0.0;
  double high = 0.0;
  RandomField field = RandomField::v_c;
  double v_r = 0.0;
  double v_i = 0.0;
  double v_c = 0.0;    // used when delta is the randomized field
  double delta = 0.0;  // used when v_c is the randomized field
};

inline ArraySpec build_random_array(const RandomArrayConfig& cfg, std::size_t n, double b, double l_gap) {
  if (!std::isfinite(cfg.low) || !std::isfinite(cfg.high) || cfg.low > cfg.high) {
    std::ostringstream os;
    os << "random range [" << cfg.low << ", " << cfg.high << "] is empty";
    throw error(errc::invalid_range, os.str());
  }
  if (cfg.field == RandomField::v_c && cfg.low < 0.0) {
    throw error(errc::invalid_range, "random coupling range must be non-negative");
  }
  ArraySpec arr = build_uniform_array(n, b, l_gap, cfg.v_r, cfg.v_i, cfg.v_c, cfg.delta);
  const SplitMix64 rng(cfg.seed);
  for (std::size_t j = 0; j < n; ++j) {
    const double u = rng.uniform(j);
    const double sample = cfg.low == cfg.high ? cfg.low : cfg.low + (cfg.high - cfg.low) * u;
    (cfg.field == RandomField::v_c ? arr.barriers[j].v_c : arr.barriers[j].delta) = sample;
  }
  validate(arr);
  return arr;
}

inline std::vector<ScanRecord> scan_random(const RandomArrayConfig& cfg, std::size_t n_max, double b,
                                           double l_gap, double e) {
  if (n_max < 2) throw error(errc::invalid_range, "n_max must be at least 2");
  return scan_prefixes("random", build_random_array(cfg, n_max, b, l_gap), e);
}

/// How a negative (emissive) delta enters the barrier formulas: as given, or
/// negated once more.
enum class DeltaConvention { signed_value, negated };

inline double effective_delta(double delta, DeltaConvention conv) {
  return conv == DeltaConvention::signed_value ? delta : -delta;
}

struct EmissiveEnergyScan {
  double e = 0.0;
  std::vector<ScanRecord> records;  // x = n
  std::vector<double> relative;     // (tau_ref - tau_n) / tau_n
  double tau_ref = 0.0;             // tau at n = n_ref
  HfVerdict verdict;
};

/// tau(n) up to n_max for each incident energy, with the relative time
/// against an n_ref-barrier array. base.delta must be negative; base.e is
/// ignored in favour of the grid.
inline std::vector<EmissiveEnergyScan> scan_emissive(const ArrayParams& base, double v_c, const Grid& e_grid,
                                                     std::size_t n_max, std::size_t n_ref = 100,
                                                     DeltaConvention conv = DeltaConvention::signed_value,
                                                     const HfCriterion& crit = {}) {
  if (!(base.delta < 0.0)) throw error(errc::invalid_range, "emissive scan needs delta < 0");
  if (n_max < 2) throw error(errc::invalid_range, "n_max must be at least 2");
  const double delta = effective_delta(base.delta, conv);
  const std::size_t n_full = std::max(n_max, n_ref);
  const ArraySpec full = build_uniform_array(n_full, base.b, base.l_gap, base.v_r, base.v_i, v_c, delta);

  std::vector<EmissiveEnergyScan> out;
  for (double e : e_grid.values()) {
    if (!(e > 0.0)) throw error(errc::non_positive_energy, "emissive energy grid must be positive");
    EmissiveEnergyScan s;
    s.e = e;
    const std::string name = "emissive:E=" + format_double(e);
    for (std::size_t n = 1; n <= n_max; ++n) {
      s.records.push_back(evaluate_record(name, static_cast<double>(n), prefix(full, n), e));
    }
    const ScanRecord ref = n_ref <= n_max ? s.records[n_ref - 1] : evaluate_record(name, 0.0, prefix(full, n_ref), e);
    s.tau_ref = ref.tau;
    for (auto& r : s.records) {
      const double rel = (s.tau_ref - r.tau) / r.tau;
      s.relative.push_back(rel);
      r.flags.push_back("rel" + std::to_string(n_ref) + "=" + format_double(rel));
    }
    s.verdict = classify_hf(s.records, crit);
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace hfarray
