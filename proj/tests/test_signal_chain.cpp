#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstring>
#include <numeric>

#include "trfc/signal_chain.hpp"

using namespace trfc;

namespace {

SimTrace constant_trace(std::size_t n, double fz = 3000.0) {
  SimTrace t;
  t.dt = kSampleDt;
  t.records.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    auto& r = t.records[k];
    r.t = static_cast<double>(k) * kSampleDt;
    r.u = 10.0;
    for (WheelId w : kAllWheels) {
      r.alpha[w] = 0.05;
      r.fy[w] = -1200.0;
      r.fz[w] = fz;
      r.mu[w] = 0.8;
    }
  }
  return t;
}

double mean(const std::vector<double>& xs) {
  return std::accumulate(xs.begin(), xs.end(), 0.0) /
         static_cast<double>(xs.size());
}

double correlation(const std::vector<double>& a, const std::vector<double>& b) {
  const double ma = mean(a), mb = mean(b);
  double sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  return sab / std::sqrt(saa * sbb);
}

}  // namespace

TEST_CASE("zero noise is the identity", "[noise]") {
  const auto clean = constant_trace(100);
  NoiseSpec spec;
  spec.alpha_sd_rad = spec.fy_sd_n = spec.fz_sd_n = 0.0;
  const auto noisy = add_noise(clean, spec);
  REQUIRE(noisy.size() == clean.size());
  CHECK(std::memcmp(noisy.records.data(), clean.records.data(),
                    clean.size() * sizeof(SimRecord)) == 0);
}

TEST_CASE("noise is seed-deterministic and seed-sensitive", "[noise]") {
  const auto clean = constant_trace(500);
  NoiseSpec spec;
  spec.seed = 1234;
  const auto n1 = add_noise(clean, spec);
  const auto n2 = add_noise(clean, spec);
  CHECK(std::memcmp(n1.records.data(), n2.records.data(),
                    clean.size() * sizeof(SimRecord)) == 0);
  spec.seed = 1235;
  const auto n3 = add_noise(clean, spec);
  CHECK(std::memcmp(n1.records.data(), n3.records.data(),
                    clean.size() * sizeof(SimRecord)) != 0);
}

TEST_CASE("noise statistics per channel", "[noise]") {
  const std::size_t n = 20000;
  const auto clean = constant_trace(n);
  NoiseSpec spec;
  spec.seed = 7;
  const auto noisy = add_noise(clean, spec);

  const auto channel = [&](int kind, WheelId w) {
    std::vector<double> d(n);
    for (std::size_t k = 0; k < n; ++k) {
      const auto& cr = clean.records[k];
      const auto& nr = noisy.records[k];
      d[k] = kind == 0 ? nr.alpha[w] - cr.alpha[w]
                       : (kind == 1 ? nr.fy[w] - cr.fy[w]
                                    : nr.fz[w] - cr.fz[w]);
    }
    return d;
  };

  const double root_n = std::sqrt(static_cast<double>(n));
  for (WheelId w : kAllWheels) {
    const auto da = channel(0, w);
    const auto dy = channel(1, w);
    const auto dz = channel(2, w);
    CAPTURE(wheel_name(w));
    CHECK(std::abs(mean(da)) <= 3.0 * spec.alpha_sd_rad / root_n);
    CHECK(std::abs(mean(dy)) <= 3.0 * spec.fy_sd_n / root_n);
    CHECK(std::abs(mean(dz)) <= 3.0 * spec.fz_sd_n / root_n);
    // Distinct channels are uncorrelated.
    CHECK(std::abs(correlation(da, dy)) < 0.05);
    CHECK(std::abs(correlation(da, dz)) < 0.05);
    CHECK(std::abs(correlation(dy, dz)) < 0.05);
  }
  // Same channel kind on different wheels uses a different substream.
  CHECK(std::abs(correlation(channel(0, WheelId::FL),
                             channel(0, WheelId::FR))) < 0.05);

  // Truth channels are untouched.
  for (std::size_t k = 0; k < n; k += 997) {
    CHECK(noisy.records[k].mu[WheelId::FL] == clean.records[k].mu[WheelId::FL]);
    CHECK(noisy.records[k].v == clean.records[k].v);
    CHECK(noisy.records[k].r == clean.records[k].r);
  }

  NoiseSpec bad;
  bad.fy_sd_n = -1.0;
  CHECK_THROWS_AS(add_noise(clean, bad), DomainError);
}

TEST_CASE("low-pass passes constants from the first sample", "[filter]") {
  LowPassFilter f(5.0, 100.0);
  for (int i = 0; i < 50; ++i) CHECK(f.step(2.5) == Approx(2.5).margin(1e-12));
}

TEST_CASE("low-pass step response has the first-order time constant",
          "[filter]") {
  LowPassFilter f(5.0, 100.0);
  // Prime with zeros, then apply a unit step.
  for (int i = 0; i < 20; ++i) f.step(0.0);
  const double tau = 1.0 / (2.0 * std::numbers::pi * 5.0);  // 31.8 ms
  double t_cross = -1.0;
  for (int k = 0; k < 100; ++k) {
    const double y = f.step(1.0);
    if (y >= 1.0 - std::exp(-1.0)) {
      t_cross = static_cast<double>(k) * kSampleDt;
      break;
    }
  }
  REQUIRE(t_cross >= 0.0);
  CHECK(t_cross >= tau - kSampleDt);
  CHECK(t_cross <= tau + kSampleDt);
}

TEST_CASE("low-pass strongly attenuates a 50 Hz tone", "[filter]") {
  // At 100 Hz sampling a 50 Hz cosine alternates +1/-1.
  LowPassFilter f(5.0, 100.0);
  double peak = 0.0;
  for (int k = 0; k < 400; ++k) {
    const double y = f.step(k % 2 == 0 ? 1.0 : -1.0);
    if (k > 100) peak = std::max(peak, std::abs(y));
  }
  CHECK(peak < 0.15);
}

TEST_CASE("low-pass is linear", "[filter]") {
  std::mt19937_64 rng(99);
  std::normal_distribution<double> d(0.0, 1.0);
  std::vector<double> x(300), y(300), z(300);
  for (std::size_t i = 0; i < x.size(); ++i) {
    x[i] = d(rng);
    y[i] = d(rng);
    z[i] = 2.5 * x[i] + 0.5 * y[i];
  }
  const auto fx = lowpass_5hz(x);
  const auto fy = lowpass_5hz(y);
  const auto fz = lowpass_5hz(z);
  for (std::size_t i = 0; i < x.size(); ++i) {
    CHECK(fz[i] == Approx(2.5 * fx[i] + 0.5 * fy[i]).margin(1e-12));
  }
  CHECK_THROWS_AS(lowpass_5hz({}), DomainError);
  CHECK_THROWS_AS(LowPassFilter(60.0, 100.0), DomainError);
}

TEST_CASE("observation window keeps the last N samples in order",
          "[window]") {
  ObservationWindow w(5);
  CHECK(w.capacity() == 5);
  for (int k = 0; k < 8; ++k) {
    FeatureSample s;
    s.t_s = k * kSampleDt;
    s.alpha_rad = static_cast<double>(k);
    w.push(s);
  }
  REQUIRE(w.full());
  REQUIRE(w.size() == 5);
  for (std::size_t i = 0; i < 5; ++i)
    CHECK(w[i].alpha_rad == Approx(3.0 + static_cast<double>(i)));
  CHECK(w.latest().alpha_rad == 7.0);
  CHECK(w.max_abs_alpha() == 7.0);
}

TEST_CASE("observation window resets on time gaps", "[window]") {
  ObservationWindow w(5);
  FeatureSample s;
  for (int k = 0; k < 5; ++k) {
    s.t_s = k * kSampleDt;
    w.push(s);
  }
  REQUIRE(w.full());
  // Small jitter (< half a period) does not reset.
  s.t_s += kSampleDt + 0.004;
  w.push(s);
  CHECK(w.full());
  // A dropped sample does.
  s.t_s += 2 * kSampleDt;
  w.push(s);
  CHECK(w.size() == 1);
  CHECK_THROWS_AS(ObservationWindow(0), DomainError);
}

TEST_CASE("straight driving yields null features", "[features]") {
  Maneuver m;
  m.duration_s = 3.0;
  m.u_mps = 10.0;
  m.steer_fl_rad = 0.0;
  m.steer_fr_rad = 0.0;
  const auto trace = run_maneuver(m, FrictionSchedule::uniform(1.0),
                                  VehicleParams{});
  const auto fs = build_features(trace, WheelId::FL);
  REQUIRE(fs.samples.size() == trace.size());
  CHECK(fs.dropped == 0);
  for (const auto& s : fs.samples) {
    CHECK(s.alpha_rad == 0.0);
    CHECK(s.fy_over_fz == 0.0);
    CHECK(s.fz_n > 2900.0);
  }
}

TEST_CASE("load guard drops samples and creates a window gap", "[features]") {
  auto trace = constant_trace(20);
  trace.records[10].fz[WheelId::FL] = 50.0;  // below the guard
  const auto fs = build_features(trace, WheelId::FL);
  CHECK(fs.dropped == 1);
  REQUIRE(fs.samples.size() == 19);

  ObservationWindow w(15);
  for (const auto& s : fs.samples) w.push(s);
  // The gap at sample 10 reset the window; only the post-gap run remains.
  CHECK(w.size() == 9);
}

TEST_CASE("feature checksum distinguishes streams", "[features]") {
  const auto t1 = constant_trace(50);
  auto t2 = t1;
  t2.records[17].alpha[WheelId::FL] += 1e-12;
  const auto f1 = build_features(t1, WheelId::FL);
  const auto f2 = build_features(t2, WheelId::FL);
  CHECK(feature_checksum(f1.samples) == feature_checksum(f1.samples));
  CHECK(feature_checksum(f1.samples) != feature_checksum(f2.samples));
}
