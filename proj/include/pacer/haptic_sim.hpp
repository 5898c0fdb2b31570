#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "pacer/plan.hpp"

namespace pacer {

/// Models OS throttling of back-to-back local notifications.
inline constexpr double kDefaultMinSpacingS = 0.5;
/// Delivered pulses closer than this are felt as one.
inline constexpr double kPerceptualMergeS = 0.08;

struct ScheduledNotification {
  double fire_at_s = 0.0;
  int pattern_slot = 0;          // pulse position within its alert's pattern
  std::size_t alert_index = 0;
  int merged_pulses = 0;         // later pulses folded into this entry

  friend bool operator==(const ScheduledNotification&, const ScheduledNotification&) = default;
};

/// Timed local notifications standing in for haptic pulses. Entries are
/// strictly increasing and at least `min_spacing_s` apart.
struct NotificationSchedule {
  std::vector<ScheduledNotification> entries;
  double min_spacing_s = kDefaultMinSpacingS;
  int coalesced_count = 0;  // pulses merged away at compile time

  std::vector<double> times() const;
};

/// One notification per haptic pulse of every alert with haptics enabled,
/// at session time (duration - offset) + pulse start. A pulse closer than
/// `min_spacing_s` to the pulse before it is merged into the entry that
/// precedes it, which keeps its own onset time.
/// Throws Error(InvalidSpacing) for min_spacing_s <= 0 and
/// Error(InvalidConfig) for plans that do not validate.
NotificationSchedule compile_schedule(const AlertPlan& plan, double min_spacing_s = kDefaultMinSpacingS);

enum class JitterKind { None, UniformDelay, GaussianDelay };

struct JitterModel {
  JitterKind kind = JitterKind::None;
  double max_s = 0.0;   // UniformDelay: delay ~ U[0, max_s]
  double mean_s = 0.0;  // GaussianDelay: delay ~ N(mean_s, std_s), clamped at 0
  double std_s = 0.0;
  std::uint64_t seed = 0;

  static JitterModel none() { return {}; }
  static JitterModel uniform(double max_s, std::uint64_t seed) {
    return {JitterKind::UniformDelay, max_s, 0.0, 0.0, seed};
  }
  static JitterModel gaussian(double mean_s, double std_s, std::uint64_t seed) {
    return {JitterKind::GaussianDelay, 0.0, mean_s, std_s, seed};
  }

  std::string describe() const;
};

struct FidelityReport {
  double max_abs_deviation_s = 0.0;
  double mean_abs_deviation_s = 0.0;
  /// Pairs of notifications delivered in the opposite order to the schedule.
  std::int64_t order_violations = 0;
  /// Compile-time merges plus delivered neighbours closer than kPerceptualMergeS.
  int coalesced_count = 0;
};

struct SimulationResult {
  std::vector<double> intended;
  std::vector<double> delivered;
  FidelityReport report;
};

/// Delays every entry by a sample from `jitter`. Notifications never arrive
/// early. Deterministic for a fixed seed.
SimulationResult simulate(const NotificationSchedule& schedule, const JitterModel& jitter);

/// Number of index pairs i < j with values[j] < values[i].
std::int64_t count_inversions(const std::vector<double>& values);

}  // namespace pacer
