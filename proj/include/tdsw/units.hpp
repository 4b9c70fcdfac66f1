#pragma once

#include <numbers>

// Internal convention: hbar = 1, time in ns, frequencies in rad/ns.
// User-facing values are GHz / MHz of ordinary frequency.
namespace tdsw::units {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

constexpr double ghz(double f) { return kTwoPi * f; }
constexpr double mhz(double f) { return kTwoPi * f * 1e-3; }
constexpr double to_ghz(double w) { return w / kTwoPi; }
constexpr double to_mhz(double w) { return w / kTwoPi * 1e3; }

}  // namespace tdsw::units
