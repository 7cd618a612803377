#ifndef IONSPEC_UNITS_HPP
#define IONSPEC_UNITS_HPP

#include <numbers>

namespace ionspec {

inline constexpr double two_pi = 2.0 * std::numbers::pi;
inline constexpr double pi = std::numbers::pi;

// All frequencies inside the library are angular (rad/s). Configs, datasets
// and figure axes speak Hz; conversion happens at the io boundary only.
inline constexpr double hz(double f) { return two_pi * f; }
inline constexpr double khz(double f) { return two_pi * 1e3 * f; }
inline constexpr double mhz(double f) { return two_pi * 1e6 * f; }
inline constexpr double to_hz(double w) { return w / two_pi; }

inline constexpr double us(double t) { return 1e-6 * t; }
inline constexpr double ms(double t) { return 1e-3 * t; }

}  // namespace ionspec

#endif
