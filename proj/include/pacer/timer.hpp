#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pacer/plan.hpp"

namespace pacer {

/// A timer is fully described by its duration and alert plan.
using TimerConfig = AlertPlan;

enum class TimerPhase { Idle, Running, Paused, Finished };
enum class DisplayMode { Countdown, Countup };

std::string_view to_string(TimerPhase phase);
std::string_view to_string(DisplayMode mode);
std::optional<TimerPhase> timer_phase_from_string(std::string_view text);
std::optional<DisplayMode> display_mode_from_string(std::string_view text);

/// Timestamps closer than this are treated as equal.
inline constexpr double kTimeEpsilon = 1e-9;

/// An alert that became due during a tick. The terminal (time-up) alert has
/// no plan index and offset 0.
struct DueAlert {
  std::optional<std::size_t> index;
  int offset_before_end_s = 0;

  bool terminal() const noexcept { return !index.has_value(); }
  friend bool operator==(const DueAlert&, const DueAlert&) = default;
};

struct TimerSnapshot {
  TimerPhase phase = TimerPhase::Idle;
  double elapsed_s = 0.0;
  double remaining_s = 0.0;
  DisplayMode display_mode = DisplayMode::Countdown;
  /// Plan indices of reminders that have fired; the terminal alert has
  /// fired exactly when phase is Finished.
  std::vector<std::size_t> fired_alerts;
  TimerConfig config;

  friend bool operator==(const TimerSnapshot&, const TimerSnapshot&) = default;
};

struct TickResult {
  TimerSnapshot snapshot;
  std::vector<DueAlert> due;
};

/// Drift-free countdown. Elapsed time is the sum of running spans measured
/// from the timestamps passed to each call; tick cadence never affects it.
/// Not thread-safe: one owner drives all calls with non-decreasing `now`.
class TimerSession {
public:
  /// Throws Error(InvalidConfig) naming the first violated rule.
  explicit TimerSession(TimerConfig config);

  TimerSnapshot start(double now);
  TimerSnapshot pause(double now);
  TimerSnapshot resume(double now);
  /// Returns to Idle from Running, Paused or Finished and forgets fired alerts.
  TimerSnapshot stop(double now);

  /// Recomputes time and returns every newly due alert once, largest offset
  /// first, with the terminal alert last. No-op outside Running.
  TickResult tick(double now);

  TimerSnapshot snapshot(double now) const;

  /// Seconds from `now` until the next reminder or the end, while Running.
  std::optional<double> seconds_until_next_alert(double now) const;

  TimerPhase phase() const noexcept { return phase_; }
  const TimerConfig& config() const noexcept { return config_; }
  DisplayMode display_mode() const noexcept { return display_mode_; }
  void set_display_mode(DisplayMode mode) noexcept { display_mode_ = mode; }

private:
  double elapsed_at(double now) const;
  [[noreturn]] void reject(std::string_view requested) const;

  TimerConfig config_;
  TimerPhase phase_ = TimerPhase::Idle;
  DisplayMode display_mode_ = DisplayMode::Countdown;
  double banked_s_ = 0.0;     // elapsed time of completed running spans
  double resumed_at_ = 0.0;   // clock value when the current span began
  std::size_t next_alert_ = 0;  // alerts fire in plan order, so fired = [0, next_alert_)
};

/// "MM:SS", zero padded; minutes keep growing past 59 ("90:00").
std::string format_mmss(long long total_seconds);

/// Countdown shows ceil(remaining), count-up shows floor(elapsed).
std::string display_value(const TimerSnapshot& snapshot);

}  // namespace pacer
