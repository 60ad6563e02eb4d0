#pragma once

// Shared basic types for the friction-estimation workbench: wheel ids,
// per-wheel storage, unit helpers and the error categories thrown by the
// library.

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>

namespace trfc {

inline constexpr double kGravity = 9.80665;   // m/s^2
inline constexpr double kSampleDt = 0.01;     // s, 100 Hz fixed step

enum class WheelId : std::uint8_t { FL = 0, FR = 1, RL = 2, RR = 3 };

inline constexpr std::size_t kWheelCount = 4;

inline constexpr std::array<WheelId, kWheelCount> kAllWheels = {
    WheelId::FL, WheelId::FR, WheelId::RL, WheelId::RR};

inline const char* wheel_name(WheelId w) {
  switch (w) {
    case WheelId::FL: return "FL";
    case WheelId::FR: return "FR";
    case WheelId::RL: return "RL";
    case WheelId::RR: return "RR";
  }
  return "??";
}

/// Parses "FL"/"FR"/"RL"/"RR" (throws std::invalid_argument otherwise).
inline WheelId wheel_from_name(const std::string& name) {
  for (WheelId w : kAllWheels)
    if (name == wheel_name(w)) return w;
  throw std::invalid_argument("unknown wheel id: " + name);
}

inline constexpr bool is_front(WheelId w) {
  return w == WheelId::FL || w == WheelId::FR;
}
inline constexpr bool is_left(WheelId w) {
  return w == WheelId::FL || w == WheelId::RL;
}

/// Fixed-size per-wheel storage addressable by WheelId or raw index.
template <typename T>
struct PerWheel {
  std::array<T, kWheelCount> values{};

  T& operator[](WheelId w) { return values[static_cast<std::size_t>(w)]; }
  const T& operator[](WheelId w) const {
    return values[static_cast<std::size_t>(w)];
  }
  T& operator[](std::size_t i) { return values[i]; }
  const T& operator[](std::size_t i) const { return values[i]; }

  auto begin() { return values.begin(); }
  auto end() { return values.end(); }
  auto begin() const { return values.begin(); }
  auto end() const { return values.end(); }
};

inline constexpr double deg2rad(double deg) {
  return deg * std::numbers::pi / 180.0;
}
inline constexpr double rad2deg(double rad) {
  return rad * 180.0 / std::numbers::pi;
}

/// Rejected input to a model/solver (non-finite or out of domain).
struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

/// Malformed configuration file / CLI arguments.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Simulation produced a non-physical state (NaN state, wheel lift, ...).
struct SimFault : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline void require_finite(double v, const char* what) {
  if (!std::isfinite(v)) throw DomainError(std::string(what) + " is not finite");
}

}  // namespace trfc
