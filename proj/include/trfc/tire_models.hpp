#pragma once

// Lateral tire force models (Pacejka magic formula, Dugoff, brush).
//
// All three models use the same sign convention: a positive slip angle
// produces a negative (restoring) lateral force, so the small-angle slope
// of every model equals -c_alpha.  Peak force magnitude is bounded by
// mu * fz (scaled by peak_scale for the magic formula).

#include <algorithm>
#include <cmath>
#include <string>

#include "trfc/common.hpp"

namespace trfc {

enum class TireModelKind : std::uint8_t { Pacejka = 0, Dugoff = 1, Brush = 2 };

inline const char* tire_model_name(TireModelKind k) {
  switch (k) {
    case TireModelKind::Pacejka: return "pacejka";
    case TireModelKind::Dugoff: return "dugoff";
    case TireModelKind::Brush: return "brush";
  }
  return "?";
}

inline TireModelKind tire_model_from_name(const std::string& name) {
  if (name == "pacejka") return TireModelKind::Pacejka;
  if (name == "dugoff") return TireModelKind::Dugoff;
  if (name == "brush") return TireModelKind::Brush;
  throw ConfigError("unknown tire model: " + name);
}

/// Magic-formula shape constants (everything except the stiffness factor,
/// which is tied to the operating point, see matched_slope_pacejka).
struct PacejkaShape {
  double shape_c = 1.3;               // C
  double curvature_e = -1.0;          // E, must be <= 1
  double vertical_offset_svy_n = 0.0; // Svy [N]
  double peak_scale = 1.0;            // D = peak_scale * mu * fz
};

struct PacejkaParams {
  double shape_c = 1.3;
  double stiffness_factor_b = 8.0;    // B [1/rad], > 0
  double curvature_e = -1.0;
  double vertical_offset_svy_n = 0.0;
  double peak_scale = 1.0;
};

namespace detail {

inline void check_tire_inputs(double alpha, double mu, double fz) {
  require_finite(alpha, "slip angle");
  require_finite(mu, "friction coefficient");
  require_finite(fz, "vertical load");
  if (mu <= 0.0) throw DomainError("friction coefficient must be positive");
  if (fz <= 0.0) throw DomainError("vertical load must be positive");
}

inline void check_alpha_range(double alpha) {
  constexpr double limit = std::numbers::pi / 2.0 - 1e-3;
  if (std::abs(alpha) >= limit)
    throw DomainError("slip angle magnitude too close to pi/2");
}

}  // namespace detail

/// Builds magic-formula parameters whose small-angle slope matches the
/// cornering stiffness c_alpha at the given operating point:
/// B = c_alpha / (C * D) with D = peak_scale * mu * fz.
inline PacejkaParams matched_slope_pacejka(double c_alpha_n_per_rad, double mu,
                                           double fz,
                                           const PacejkaShape& shape = {}) {
  detail::check_tire_inputs(0.0, mu, fz);
  require_finite(c_alpha_n_per_rad, "cornering stiffness");
  if (c_alpha_n_per_rad <= 0.0)
    throw DomainError("cornering stiffness must be positive");
  const double peak = shape.peak_scale * mu * fz;
  PacejkaParams p;
  p.shape_c = shape.shape_c;
  p.curvature_e = shape.curvature_e;
  p.vertical_offset_svy_n = shape.vertical_offset_svy_n;
  p.peak_scale = shape.peak_scale;
  p.stiffness_factor_b = c_alpha_n_per_rad / (shape.shape_c * peak);
  return p;
}

/// Magic-formula lateral force.  The restoring orientation is obtained by
/// evaluating the curve at the negated slip angle, so that like the other
/// two models a positive slip angle yields a negative force.
inline double pacejka_lateral(double alpha, double mu, double fz,
                              const PacejkaParams& p) {
  detail::check_tire_inputs(alpha, mu, fz);
  if (p.shape_c <= 0.0 || p.stiffness_factor_b <= 0.0 || p.curvature_e > 1.0 ||
      p.peak_scale <= 0.0)
    throw DomainError("invalid magic-formula parameters");
  const double d = p.peak_scale * mu * fz;
  const double ba = p.stiffness_factor_b * (-alpha);
  const double x = ba - p.curvature_e * (ba - std::atan(ba));
  return d * std::sin(p.shape_c * std::atan(x)) + p.vertical_offset_svy_n;
}

/// Dugoff lateral force: Fy = -c_alpha * tan(a) * f(lambda) with
/// lambda = mu*fz / (2*c_alpha*|tan a|), f = (2-lambda)*lambda below 1.
inline double dugoff_lateral(double alpha, double mu, double fz,
                             double c_alpha_n_per_rad) {
  detail::check_tire_inputs(alpha, mu, fz);
  detail::check_alpha_range(alpha);
  require_finite(c_alpha_n_per_rad, "cornering stiffness");
  if (c_alpha_n_per_rad <= 0.0)
    throw DomainError("cornering stiffness must be positive");
  const double t = std::tan(alpha);
  const double denom = 2.0 * c_alpha_n_per_rad * std::abs(t);
  // At vanishing slip the operating point sits in the linear branch.
  if (denom <= mu * fz) return -c_alpha_n_per_rad * t;
  const double lambda = mu * fz / denom;
  return -c_alpha_n_per_rad * t * (2.0 - lambda) * lambda;
}

/// Slip angle beyond which the brush model is fully sliding.
inline double brush_saturation_alpha(double mu, double fz,
                                     double c_alpha_n_per_rad) {
  detail::check_tire_inputs(0.0, mu, fz);
  if (c_alpha_n_per_rad <= 0.0)
    throw DomainError("cornering stiffness must be positive");
  return std::atan(3.0 * mu * fz / c_alpha_n_per_rad);
}

/// Brush-model lateral force (cubic adhesion region, full sliding beyond).
inline double brush_lateral(double alpha, double mu, double fz,
                            double c_alpha_n_per_rad) {
  detail::check_tire_inputs(alpha, mu, fz);
  detail::check_alpha_range(alpha);
  require_finite(c_alpha_n_per_rad, "cornering stiffness");
  if (c_alpha_n_per_rad <= 0.0)
    throw DomainError("cornering stiffness must be positive");
  const double theta = c_alpha_n_per_rad / (3.0 * mu * fz);
  const double sigma = std::tan(alpha);
  const double ts = theta * sigma;
  if (std::abs(ts) >= 1.0)
    return -mu * fz * (alpha > 0.0 ? 1.0 : (alpha < 0.0 ? -1.0 : 0.0));
  return -3.0 * mu * fz * ts * (1.0 - std::abs(ts) + ts * ts / 3.0);
}

/// Per-axle tire configuration used by the simulator and the estimators.
struct TireConfig {
  TireModelKind kind = TireModelKind::Pacejka;
  double c_alpha_n_per_rad = 30000.0;
  PacejkaShape pacejka{};
};

/// Dispatch over the configured model.  For the magic formula the stiffness
/// factor is derived per call so the small-angle slope equals c_alpha at
/// every load.
inline double lateral_force(const TireConfig& cfg, double alpha, double mu,
                            double fz) {
  switch (cfg.kind) {
    case TireModelKind::Pacejka:
      return pacejka_lateral(
          alpha, mu, fz,
          matched_slope_pacejka(cfg.c_alpha_n_per_rad, mu, fz, cfg.pacejka));
    case TireModelKind::Dugoff:
      return dugoff_lateral(alpha, mu, fz, cfg.c_alpha_n_per_rad);
    case TireModelKind::Brush:
      return brush_lateral(alpha, mu, fz, cfg.c_alpha_n_per_rad);
  }
  throw DomainError("unknown tire model kind");
}

}  // namespace trfc
