#pragma once

// Measurement conditioning between the simulator and the estimators:
// additive Gaussian channel noise, a unit-gain first-order 5 Hz low-pass
// (bilinear discretization), per-wheel feature assembly (slip angle and
// normalized lateral force) and the sliding observation window shared by
// both estimators.

#include <cstdint>
#include <cstring>
#include <random>
#include <vector>

#include "trfc/common.hpp"
#include "trfc/vehicle_sim.hpp"

namespace trfc {

struct NoiseSpec {
  double alpha_sd_rad = 0.002;
  double fy_sd_n = 40.0;
  double fz_sd_n = 40.0;
  std::uint64_t seed = 0;
};

/// Adds independent zero-mean Gaussian noise to every alpha/fy/fz channel of
/// the trace (12 channels, one substream each); body states and the true
/// friction values are left untouched.  Deterministic for a given seed.
inline SimTrace add_noise(const SimTrace& clean, const NoiseSpec& spec) {
  require_finite(spec.alpha_sd_rad, "alpha noise sd");
  require_finite(spec.fy_sd_n, "fy noise sd");
  require_finite(spec.fz_sd_n, "fz noise sd");
  if (spec.alpha_sd_rad < 0 || spec.fy_sd_n < 0 || spec.fz_sd_n < 0)
    throw DomainError("noise standard deviations must be non-negative");

  SimTrace out = clean;
  const auto perturb = [&](int channel_kind, WheelId w, double sd,
                           auto&& get) {
    if (sd == 0.0) return;
    std::seed_seq seq{static_cast<std::uint32_t>(spec.seed & 0xffffffffu),
                      static_cast<std::uint32_t>(spec.seed >> 32),
                      static_cast<std::uint32_t>(channel_kind),
                      static_cast<std::uint32_t>(w)};
    std::mt19937_64 rng(seq);
    std::normal_distribution<double> dist(0.0, sd);
    for (auto& rec : out.records) get(rec)[w] += dist(rng);
  };
  for (WheelId w : kAllWheels) {
    perturb(0, w, spec.alpha_sd_rad,
            [](SimRecord& r) -> PerWheel<double>& { return r.alpha; });
    perturb(1, w, spec.fy_sd_n,
            [](SimRecord& r) -> PerWheel<double>& { return r.fy; });
    perturb(2, w, spec.fz_sd_n,
            [](SimRecord& r) -> PerWheel<double>& { return r.fz; });
  }
  return out;
}

/// Unit-DC-gain first-order low-pass, bilinear discretization of
/// H(s) = wc/(s+wc).  The state is initialized to the first sample, so a
/// constant input passes through unchanged from the very first output.
class LowPassFilter {
 public:
  LowPassFilter(double cutoff_hz, double sample_hz)
      : k_(std::numbers::pi * cutoff_hz / sample_hz) {
    if (!(cutoff_hz > 0) || !(sample_hz > 0) || cutoff_hz * 2 >= sample_hz)
      throw DomainError("low-pass cutoff must be in (0, fs/2)");
  }

  double step(double x) {
    require_finite(x, "filter input");
    if (!primed_) {
      y_prev_ = x;
      x_prev_ = x;
      primed_ = true;
      return x;
    }
    const double y = (k_ * (x + x_prev_) + (1.0 - k_) * y_prev_) / (1.0 + k_);
    x_prev_ = x;
    y_prev_ = y;
    return y;
  }

  void reset() { primed_ = false; }

 private:
  double k_;
  double x_prev_ = 0.0, y_prev_ = 0.0;
  bool primed_ = false;
};

/// Applies a fresh 5 Hz low-pass to a whole series sampled at 100 Hz.
inline std::vector<double> lowpass_5hz(const std::vector<double>& xs) {
  if (xs.empty()) throw DomainError("cannot filter an empty series");
  LowPassFilter f(5.0, 1.0 / kSampleDt);
  std::vector<double> ys;
  ys.reserve(xs.size());
  for (double x : xs) ys.push_back(f.step(x));
  return ys;
}

/// One conditioned per-wheel feature sample: filtered slip angle, filtered
/// normalized lateral force, plus the filtered vertical load (needed by the
/// model-based estimator to evaluate candidate forces).
struct FeatureSample {
  double t_s = 0.0;
  double alpha_rad = 0.0;
  double fy_over_fz = 0.0;
  double fz_n = 0.0;
};

struct FeatureSeries {
  std::vector<FeatureSample> samples;
  std::size_t dropped = 0;  // samples rejected by the load guard
};

inline constexpr double kFzGuardN = 100.0;

/// Builds the conditioned feature stream for one wheel from a (typically
/// noisy) trace.  Samples whose raw vertical load is at or below the guard
/// are dropped, which later shows up as a time gap to the window.
inline FeatureSeries build_features(const SimTrace& trace, WheelId w) {
  FeatureSeries out;
  out.samples.reserve(trace.size());
  LowPassFilter f_alpha(5.0, 1.0 / trace.dt);
  LowPassFilter f_ratio(5.0, 1.0 / trace.dt);
  LowPassFilter f_fz(5.0, 1.0 / trace.dt);
  for (const auto& rec : trace.records) {
    const double fz = rec.fz[w];
    if (!(fz > kFzGuardN)) {
      ++out.dropped;
      continue;
    }
    FeatureSample s;
    s.t_s = rec.t;
    s.alpha_rad = f_alpha.step(rec.alpha[w]);
    s.fy_over_fz = f_ratio.step(rec.fy[w] / fz);
    s.fz_n = f_fz.step(fz);
    out.samples.push_back(s);
  }
  return out;
}

/// Sliding window of the most recent feature samples (defaults to 50 at
/// 100 Hz, i.e. half a second).  A gap in the sample timestamps resets the
/// window so the estimators never fit across discontinuities.
class ObservationWindow {
 public:
  explicit ObservationWindow(std::size_t capacity = 50,
                             double period_s = kSampleDt)
      : capacity_(capacity), period_(period_s) {
    if (capacity_ == 0) throw DomainError("window capacity must be positive");
    buf_.reserve(capacity_);
  }

  void push(const FeatureSample& s) {
    if (!buf_.empty()) {
      const double gap = s.t_s - latest().t_s;
      if (std::abs(gap - period_) > period_ / 2.0) clear();
    }
    if (buf_.size() < capacity_) {
      buf_.push_back(s);
    } else {
      buf_[head_] = s;
      head_ = (head_ + 1) % capacity_;
    }
  }

  std::size_t size() const { return buf_.size(); }
  std::size_t capacity() const { return capacity_; }
  bool full() const { return buf_.size() == capacity_; }

  /// i = 0 is the oldest retained sample.
  const FeatureSample& operator[](std::size_t i) const {
    return buf_[(head_ + i) % buf_.size()];
  }
  const FeatureSample& latest() const {
    return buf_[(head_ + buf_.size() - 1) % buf_.size()];
  }

  double max_abs_alpha() const {
    double m = 0.0;
    for (std::size_t i = 0; i < buf_.size(); ++i)
      m = std::max(m, std::abs((*this)[i].alpha_rad));
    return m;
  }

  void clear() {
    buf_.clear();
    head_ = 0;
  }

 private:
  std::size_t capacity_;
  double period_;
  std::vector<FeatureSample> buf_;
  std::size_t head_ = 0;
};

/// FNV-1a checksum over the raw bytes of a feature stream; used to assert
/// that both estimators consumed the identical conditioned input.
inline std::uint64_t feature_checksum(const std::vector<FeatureSample>& xs) {
  std::uint64_t h = 1469598103934665603ull;
  const auto mix = [&](double v) {
    unsigned char bytes[sizeof(double)];
    std::memcpy(bytes, &v, sizeof(double));
    for (unsigned char b : bytes) {
      h ^= b;
      h *= 1099511628211ull;
    }
  };
  for (const auto& s : xs) {
    mix(s.t_s);
    mix(s.alpha_rad);
    mix(s.fy_over_fz);
    mix(s.fz_n);
  }
  return h;
}

}  // namespace trfc
