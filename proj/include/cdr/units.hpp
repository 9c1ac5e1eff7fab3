#pragma once

// Internal convention: angular frequencies in rad/ns, times in ns.
// Configuration files quote ordinary frequencies as f/2pi in MHz or GHz;
// the conversion happens once at parse time.

namespace cdr::units {

inline constexpr double two_pi = 6.283185307179586476925286766559;

inline constexpr double ghz_to_rad_ns(double f_over_2pi_ghz) {
  return two_pi * f_over_2pi_ghz;
}

inline constexpr double mhz_to_rad_ns(double f_over_2pi_mhz) {
  return two_pi * f_over_2pi_mhz * 1e-3;
}

inline constexpr double rad_ns_to_ghz(double omega) { return omega / two_pi; }

inline constexpr double rad_ns_to_mhz(double omega) {
  return 1e3 * omega / two_pi;
}

inline constexpr double ps_to_ns(double t_ps) { return 1e-3 * t_ps; }

}  // namespace cdr::units
