#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace hfarray {

enum class errc {
  non_positive_energy,
  invalid_spec,
  numerical_overflow,
  coupling_not_zero,
  invalid_geometry,
  singular_m22,
  step_too_coarse,
  non_positive_stencil,
  above_barrier,
  window_too_large,
  singular_system,
  invalid_range,
  invalid_grid,
  config_error,
};

constexpr std::string_view to_string(errc code) noexcept {
  switch (code) {
    case errc::non_positive_energy: return "NonPositiveEnergy";
    case errc::invalid_spec: return "InvalidSpec";
    case errc::numerical_overflow: return "NumericalOverflow";
    case errc::coupling_not_zero: return "CouplingNotZero";
    case errc::invalid_geometry: return "InvalidGeometry";
    case errc::singular_m22: return "SingularM22";
    case errc::step_too_coarse: return "StepTooCoarse";
    case errc::non_positive_stencil: return "NonPositiveStencil";
    case errc::above_barrier: return "AboveBarrier";
    case errc::window_too_large: return "WindowTooLarge";
    case errc::singular_system: return "SingularSystem";
    case errc::invalid_range: return "InvalidRange";
    case errc::invalid_grid: return "InvalidGrid";
    case errc::config_error: return "ConfigError";
  }
  return "Unknown";
}

/// Numerical failures abort a computation; everything else is a usage error.
constexpr bool is_numerical(errc code) noexcept {
  return code == errc::numerical_overflow || code == errc::singular_m22 ||
         code == errc::step_too_coarse || code == errc::singular_system;
}

class error : public std::runtime_error {
 public:
  error(errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  errc code() const noexcept { return code_; }

 private:
  errc code_;
};

}  // namespace hfarray
