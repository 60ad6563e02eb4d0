#pragma once

// Planar double-track vehicle simulator.
//
// States are lateral velocity v and yaw rate r; longitudinal speed u is held
// exactly constant.  Sign convention: steering angle is negative for a left
// turn, and with zero steer a positive lateral velocity produces positive
// slip angles (restoring forces are negative).  Vertical loads are
// quasi-static: axle split from the static weight distribution plus a lateral
// transfer proportional to the measured lateral acceleration; the loads used
// over one integration step are computed from the acceleration recorded at
// the previous sample and held frozen across the RK4 stages.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "trfc/common.hpp"
#include "trfc/tire_models.hpp"

namespace trfc {

struct BodyState {
  double u_mps = 0.0;   // longitudinal speed (constant)
  double v_mps = 0.0;   // lateral speed
  double r_radps = 0.0; // yaw rate
  double ay_mps2 = 0.0; // lateral acceleration at the last evaluated sample
};

struct VehicleParams {
  double mass_kg = 1100.0;
  double yaw_inertia_kgm2 = 1350.0;
  double a_m = 1.5;           // CG to front axle
  double b_m = 1.9;           // CG to rear axle
  double half_track_m = 0.9;  // c
  double cg_height_m = 0.5;   // h
  double wheel_radius_m = 0.25;
  TireConfig tire{};

  double wheelbase() const { return a_m + b_m; }
};

struct SteerAngles {
  double fl_rad = 0.0;
  double fr_rad = 0.0;
};

// ---------------------------------------------------------------------------
// Friction schedule

struct FrictionBreakpoint {
  double t_s = 0.0;
  double mu = 1.0;
};

/// Per-wheel piecewise-constant friction profile.
struct FrictionSchedule {
  PerWheel<std::vector<FrictionBreakpoint>> wheels;

  static FrictionSchedule uniform(double mu) {
    FrictionSchedule s;
    for (WheelId w : kAllWheels) s.wheels[w] = {{0.0, mu}};
    return s;
  }
  static FrictionSchedule uniform(std::vector<FrictionBreakpoint> bps) {
    FrictionSchedule s;
    for (WheelId w : kAllWheels) s.wheels[w] = bps;
    return s;
  }

  void validate() const {
    for (WheelId w : kAllWheels) {
      const auto& bps = wheels[w];
      if (bps.empty())
        throw ConfigError("friction schedule has no breakpoints");
      double prev = -1e300;
      for (const auto& bp : bps) {
        require_finite(bp.t_s, "breakpoint time");
        require_finite(bp.mu, "breakpoint friction");
        if (bp.mu <= 0.0)
          throw ConfigError("friction breakpoint must be positive");
        if (bp.t_s <= prev)
          throw ConfigError("friction breakpoints must be strictly increasing");
        prev = bp.t_s;
      }
    }
  }
};

/// Piecewise-constant lookup: the value of the last breakpoint whose start
/// time is <= t; queries before the first breakpoint return the first value.
inline double friction_at(const FrictionSchedule& s, WheelId w, double t) {
  const auto& bps = s.wheels[w];
  if (bps.empty()) throw ConfigError("friction schedule has no breakpoints");
  double mu = bps.front().mu;
  for (const auto& bp : bps) {
    if (bp.t_s <= t) mu = bp.mu;
    else break;
  }
  return mu;
}

// ---------------------------------------------------------------------------
// Maneuvers

enum class ManeuverKind : std::uint8_t { RampSteer = 0, ConstantSteer = 1 };

struct Maneuver {
  ManeuverKind kind = ManeuverKind::ConstantSteer;
  double duration_s = 30.0;
  double u_mps = 10.0;
  double steer_fl_rad = 0.0;  // ramp endpoint / constant value
  // NaN = derive the right-front angle from Ackermann geometry.
  double steer_fr_rad = std::numeric_limits<double>::quiet_NaN();
};

/// Right-front steer angle consistent with Ackermann geometry for a given
/// left-front angle (negative = left turn, where the left wheel is inner).
inline double ackermann_partner(double delta_fl_rad, double wheelbase_m,
                                double half_track_m) {
  require_finite(delta_fl_rad, "steer angle");
  if (delta_fl_rad == 0.0) return 0.0;
  const double mag = std::abs(delta_fl_rad);
  if (mag >= deg2rad(60.0)) throw DomainError("steer angle out of range");
  const double t = std::tan(mag);
  // Distance between the two kingpins projected through the turn center.
  const double denom = delta_fl_rad < 0.0 ? wheelbase_m / t + 2.0 * half_track_m
                                          : wheelbase_m / t - 2.0 * half_track_m;
  if (denom <= half_track_m)
    throw DomainError("steer angle too large for Ackermann geometry");
  const double partner = std::atan(wheelbase_m / denom);
  return delta_fl_rad < 0.0 ? -partner : partner;
}

inline SteerAngles steer_at(const Maneuver& m, double t,
                            const VehicleParams& p) {
  double fl = m.steer_fl_rad;
  double fr = m.steer_fr_rad;
  if (m.kind == ManeuverKind::RampSteer) {
    const double frac =
        m.duration_s > 0.0 ? std::clamp(t / m.duration_s, 0.0, 1.0) : 1.0;
    fl *= frac;
    if (std::isfinite(fr)) fr *= frac;
  }
  if (!std::isfinite(fr))
    fr = ackermann_partner(fl, p.wheelbase(), p.half_track_m);
  return {fl, fr};
}

// ---------------------------------------------------------------------------
// Kinematics and loads

/// Per-wheel slip angles.  The left-side wheels see longitudinal speed
/// u + c*r and the right-side wheels u - c*r (the outer wheel in a turn is
/// the faster one).
inline PerWheel<double> slip_angles(const BodyState& s, const SteerAngles& d,
                                    const VehicleParams& p) {
  const double lon_left = s.u_mps + p.half_track_m * s.r_radps;
  const double lon_right = s.u_mps - p.half_track_m * s.r_radps;
  if (std::abs(lon_left) <= 0.1 || std::abs(lon_right) <= 0.1)
    throw SimFault("wheel longitudinal speed too small for slip angles");
  const double lat_front = s.v_mps + p.a_m * s.r_radps;
  const double lat_rear = s.v_mps - p.b_m * s.r_radps;
  PerWheel<double> alpha;
  alpha[WheelId::FL] = std::atan(lat_front / lon_left) - d.fl_rad;
  alpha[WheelId::FR] = std::atan(lat_front / lon_right) - d.fr_rad;
  alpha[WheelId::RL] = std::atan(lat_rear / lon_left);
  alpha[WheelId::RR] = std::atan(lat_rear / lon_right);
  return alpha;
}

/// Quasi-static vertical loads for a given lateral acceleration.  The total
/// lateral transfer m*ay*h/(2c) is distributed over the axles in proportion
/// to their static share; positive ay (rightward) loads the left side.
inline PerWheel<double> vertical_loads(const VehicleParams& p, double ay) {
  require_finite(ay, "lateral acceleration");
  const double weight = p.mass_kg * kGravity;
  const double front_axle = weight * p.b_m / p.wheelbase();
  const double rear_axle = weight * p.a_m / p.wheelbase();
  const double transfer =
      p.mass_kg * ay * p.cg_height_m / (2.0 * p.half_track_m);
  const double front_shift = transfer * (p.b_m / p.wheelbase());
  const double rear_shift = transfer * (p.a_m / p.wheelbase());
  PerWheel<double> fz;
  fz[WheelId::FL] = 0.5 * front_axle + front_shift;
  fz[WheelId::FR] = 0.5 * front_axle - front_shift;
  fz[WheelId::RL] = 0.5 * rear_axle + rear_shift;
  fz[WheelId::RR] = 0.5 * rear_axle - rear_shift;
  for (WheelId w : kAllWheels)
    if (!(fz[w] > 0.0))
      throw SimFault(std::string("wheel lift: non-positive load at ") +
                     wheel_name(w));
  return fz;
}

// ---------------------------------------------------------------------------
// Integration

namespace detail {

struct WheelEval {
  PerWheel<double> alpha, fy, fz, mu;
  double ay = 0.0;
};

/// Evaluates slip angles, friction, loads (from the lagged acceleration in
/// the state) and tire forces at one instant.
inline WheelEval evaluate_wheels(const BodyState& s, const SteerAngles& d,
                                 const FrictionSchedule& sched, double t,
                                 const VehicleParams& p) {
  WheelEval e;
  e.fz = vertical_loads(p, s.ay_mps2);
  e.alpha = slip_angles(s, d, p);
  double sum_fy = 0.0;
  for (WheelId w : kAllWheels) {
    e.mu[w] = friction_at(sched, w, t);
    e.fy[w] = lateral_force(p.tire, e.alpha[w], e.mu[w], e.fz[w]);
    sum_fy += e.fy[w];
  }
  e.ay = sum_fy / p.mass_kg;
  return e;
}

struct Derivs {
  double vdot, rdot;
};

inline Derivs body_derivs(const BodyState& s, const SteerAngles& d,
                          const FrictionSchedule& sched, double t,
                          const PerWheel<double>& fz_frozen,
                          const VehicleParams& p) {
  const auto alpha = slip_angles(s, d, p);
  PerWheel<double> fy;
  double sum = 0.0;
  for (WheelId w : kAllWheels) {
    fy[w] = lateral_force(p.tire, alpha[w], friction_at(sched, w, t),
                          fz_frozen[w]);
    sum += fy[w];
  }
  Derivs dd;
  dd.vdot = sum / p.mass_kg - s.u_mps * s.r_radps;
  dd.rdot = (p.a_m * (fy[WheelId::FL] + fy[WheelId::FR]) -
             p.b_m * (fy[WheelId::RL] + fy[WheelId::RR])) /
            p.yaw_inertia_kgm2;
  return dd;
}

}  // namespace detail

/// One fixed-step RK4 update of (v, r) over [t, t+dt].  Steering is held
/// constant over the step; friction is looked up at the stage times; the
/// vertical loads are frozen from the acceleration stored in the incoming
/// state.  The returned state carries the lateral acceleration evaluated at
/// the beginning of the step (used to freeze the loads of the next step).
inline BodyState step(const BodyState& s, const SteerAngles& d,
                      const FrictionSchedule& sched, double t, double dt,
                      const VehicleParams& p) {
  const auto e0 = detail::evaluate_wheels(s, d, sched, t, p);
  const auto f = [&](double ts, double v, double r) {
    BodyState x = s;
    x.v_mps = v;
    x.r_radps = r;
    return detail::body_derivs(x, d, sched, ts, e0.fz, p);
  };
  const double v0 = s.v_mps, r0 = s.r_radps;
  const auto k1 = f(t, v0, r0);
  const auto k2 = f(t + dt / 2, v0 + dt / 2 * k1.vdot, r0 + dt / 2 * k1.rdot);
  const auto k3 = f(t + dt / 2, v0 + dt / 2 * k2.vdot, r0 + dt / 2 * k2.rdot);
  const auto k4 = f(t + dt, v0 + dt * k3.vdot, r0 + dt * k3.rdot);

  BodyState out = s;
  out.v_mps = v0 + dt / 6 * (k1.vdot + 2 * k2.vdot + 2 * k3.vdot + k4.vdot);
  out.r_radps = r0 + dt / 6 * (k1.rdot + 2 * k2.rdot + 2 * k3.rdot + k4.rdot);
  out.ay_mps2 = e0.ay;
  if (!std::isfinite(out.v_mps) || !std::isfinite(out.r_radps))
    throw SimFault("non-finite body state after integration step");
  return out;
}

// ---------------------------------------------------------------------------
// Trace

struct SimRecord {
  double t = 0.0;
  double u = 0.0, v = 0.0, r = 0.0, ay = 0.0;
  PerWheel<double> alpha, fy, fz, mu, delta;
};

struct SimTrace {
  double dt = kSampleDt;
  std::uint64_t seed = 0;
  std::vector<SimRecord> records;

  std::size_t size() const { return records.size(); }
};

/// Runs a maneuver at 100 Hz and records every sample.  The recorded tire
/// quantities are self-consistent: fy == lateral_force(alpha, mu, fz) holds
/// exactly for every wheel at every sample.
inline SimTrace run_maneuver(const Maneuver& m, const FrictionSchedule& sched,
                             const VehicleParams& p, std::uint64_t seed = 0) {
  sched.validate();
  if (!(m.duration_s > 0.0)) throw ConfigError("maneuver duration must be > 0");
  if (!(m.u_mps > 0.5)) throw ConfigError("longitudinal speed too small");

  SimTrace trace;
  trace.dt = kSampleDt;
  trace.seed = seed;
  const auto n_steps = static_cast<std::size_t>(
      std::llround(m.duration_s / kSampleDt));
  trace.records.reserve(n_steps + 1);

  BodyState state;
  state.u_mps = m.u_mps;
  for (std::size_t k = 0; k <= n_steps; ++k) {
    const double t = static_cast<double>(k) * kSampleDt;
    const SteerAngles d = steer_at(m, t, p);
    detail::WheelEval e;
    try {
      e = detail::evaluate_wheels(state, d, sched, t, p);
    } catch (const SimFault& f) {
      throw SimFault(std::string(f.what()) + " at step " + std::to_string(k));
    }
    SimRecord rec;
    rec.t = t;
    rec.u = state.u_mps;
    rec.v = state.v_mps;
    rec.r = state.r_radps;
    rec.ay = e.ay;
    rec.alpha = e.alpha;
    rec.fy = e.fy;
    rec.fz = e.fz;
    rec.mu = e.mu;
    rec.delta[WheelId::FL] = d.fl_rad;
    rec.delta[WheelId::FR] = d.fr_rad;
    rec.delta[WheelId::RL] = 0.0;
    rec.delta[WheelId::RR] = 0.0;
    trace.records.push_back(rec);

    if (k == n_steps) break;
    try {
      state = step(state, d, sched, t, kSampleDt, p);
    } catch (const SimFault& f) {
      throw SimFault(std::string(f.what()) + " at step " + std::to_string(k));
    }
  }
  return trace;
}

}  // namespace trfc
