#include <cmath>

#include "doctest.h"
#include "pacer/error.hpp"
#include "pacer/haptic_sim.hpp"
#include "support/generators.hpp"

using namespace pacer;

namespace {

AlertPlan single(int duration, int offset, HapticIntensity intensity) {
  return {duration, {{offset, ModalitySettings::all(), intensity}}};
}

// Brute force: count pairs delivered out of scheduled order.
std::int64_t inversions_oracle(const std::vector<double>& v) {
  std::int64_t n = 0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    for (std::size_t j = i + 1; j < v.size(); ++j) n += v[j] < v[i];
  }
  return n;
}

}  // namespace

TEST_CASE("prominent pulses become three notifications 300 ms apart") {
  // pulse period = 200 ms pulse + 100 ms gap
  const auto schedule = compile_schedule(single(180, 10, HapticIntensity::Prominent), 0.1);
  REQUIRE(schedule.entries.size() == 3);
  CHECK(schedule.entries[0].fire_at_s == 170.0);
  CHECK(schedule.entries[1].fire_at_s == doctest::Approx(170.3).epsilon(1e-12));
  CHECK(schedule.entries[2].fire_at_s == doctest::Approx(170.6).epsilon(1e-12));
  CHECK(schedule.entries[2].pattern_slot == 2);
  CHECK(schedule.coalesced_count == 0);
}

TEST_CASE("a normal alert is one notification") {
  const auto schedule = compile_schedule(single(180, 90, HapticIntensity::Normal));
  REQUIRE(schedule.entries.size() == 1);
  CHECK(schedule.entries[0].fire_at_s == 90.0);
}

TEST_CASE("pulses closer than the spacing are coalesced at compile time") {
  // gaps of 0.3 s < 0.5 s: pulses 2 and 3 fold into pulse 1
  const auto schedule = compile_schedule(single(180, 10, HapticIntensity::Prominent), 0.5);
  REQUIRE(schedule.entries.size() == 1);
  CHECK(schedule.entries[0].fire_at_s == 170.0);
  CHECK(schedule.entries[0].merged_pulses == 2);
  CHECK(schedule.coalesced_count == 2);
  const auto result = simulate(schedule, JitterModel::none());
  CHECK(result.report.coalesced_count == 2);
}

TEST_CASE("compile rejects bad spacing and bad plans") {
  try {
    compile_schedule(single(180, 10, HapticIntensity::Normal), 0.0);
    FAIL("expected InvalidSpacing");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InvalidSpacing);
  }
  CHECK_THROWS_AS(compile_schedule(single(180, 33, HapticIntensity::Normal), 0.5), Error);
}

TEST_CASE("alerts without haptics are not scheduled") {
  AlertPlan plan = default_plan(180, 3);
  plan.alerts[1].modalities.haptic = false;
  const auto schedule = compile_schedule(plan, 0.1);
  // alert 1: 1 pulse at 90, alert 3: 3 pulses from 170
  CHECK(schedule.times().size() == 4);
  CHECK(schedule.entries[0].alert_index == 0u);
  CHECK(schedule.entries[1].alert_index == 2u);
}

TEST_CASE("zero jitter reproduces the schedule") {
  const auto schedule = compile_schedule(default_plan(180, 3), 0.1);
  const auto result = simulate(schedule, JitterModel::none());
  CHECK(result.delivered == schedule.times());
  CHECK(result.report.max_abs_deviation_s == 0.0);
  CHECK(result.report.mean_abs_deviation_s == 0.0);
  CHECK(result.report.order_violations == 0);
}

TEST_CASE("uniform jitter stays within its bound and is reproducible") {
  const auto schedule = compile_schedule(single(180, 10, HapticIntensity::Prominent), 0.1);
  const auto a = simulate(schedule, JitterModel::uniform(1.0, 42));
  const auto b = simulate(schedule, JitterModel::uniform(1.0, 42));
  CHECK(a.delivered == b.delivered);
  for (std::size_t i = 0; i < a.delivered.size(); ++i) {
    const double d = a.delivered[i] - a.intended[i];
    CHECK(d >= 0.0);
    CHECK(d <= 1.0 + 1e-12);
  }
  CHECK(a.report.max_abs_deviation_s <= 1.0);
  const auto c = simulate(schedule, JitterModel::uniform(1.0, 43));
  CHECK(c.delivered != a.delivered);
}

TEST_CASE("order violations are counted when deliveries invert") {
  const auto schedule = compile_schedule(single(180, 10, HapticIntensity::Prominent), 0.3);
  REQUIRE(schedule.entries.size() == 3);
  bool saw_inversion = false;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const auto r = simulate(schedule, JitterModel::uniform(5.0, seed));
    CHECK(r.report.order_violations == inversions_oracle(r.delivered));
    saw_inversion = saw_inversion || r.report.order_violations > 0;
  }
  CHECK(saw_inversion);
}

TEST_CASE("count_inversions matches brute force") {
  testing::Rng rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> v(static_cast<std::size_t>(testing::uniform_int(rng, 0, 40)));
    for (auto& x : v) x = testing::uniform_int(rng, 0, 10);  // many ties
    CHECK(count_inversions(v) == inversions_oracle(v));
  }
}

TEST_CASE("gaussian jitter never delivers early") {
  const auto schedule = compile_schedule(default_plan(600, 3), 0.1);
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto r = simulate(schedule, JitterModel::gaussian(0.0, 0.5, seed));
    for (std::size_t i = 0; i < r.delivered.size(); ++i) CHECK(r.delivered[i] >= r.intended[i]);
  }
}

TEST_CASE("property: compiled schedules satisfy their invariants") {
  testing::Rng rng(17);
  for (int trial = 0; trial < 500; ++trial) {
    const AlertPlan plan = testing::random_plan(rng, 600);
    const double spacing = testing::uniform_real(rng, 0.01, 1.5);
    const auto schedule = compile_schedule(plan, spacing);
    CHECK(schedule.entries == compile_schedule(plan, spacing).entries);
    int pulses = 0;
    for (const auto& a : plan.alerts) {
      if (a.modalities.haptic) pulses += a.haptic_intensity == HapticIntensity::Prominent ? 3 : 1;
    }
    int merged = 0;
    for (std::size_t i = 0; i < schedule.entries.size(); ++i) {
      merged += schedule.entries[i].merged_pulses;
      if (i > 0) CHECK(schedule.entries[i].fire_at_s - schedule.entries[i - 1].fire_at_s >= spacing - 1e-9);
    }
    CHECK(merged == schedule.coalesced_count);
    CHECK(static_cast<int>(schedule.entries.size()) + merged == pulses);
  }
}

TEST_CASE("mean deviation grows with the jitter bound") {
  const auto schedule = compile_schedule(default_plan(3600, 3), 0.1);
  auto batch_mean = [&](double d) {
    double sum = 0.0;
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
      sum += simulate(schedule, JitterModel::uniform(d, seed)).report.mean_abs_deviation_s;
    }
    return sum / 200;
  };
  const double small = batch_mean(0.5), large = batch_mean(2.0);
  CHECK(small < large);
  CHECK(small == doctest::Approx(0.25).epsilon(0.1));
  CHECK(large == doctest::Approx(1.0).epsilon(0.1));
}
