#include "pacer/timer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "pacer/error.hpp"

namespace pacer {

std::string_view to_string(TimerPhase phase) {
  switch (phase) {
    case TimerPhase::Idle: return "idle";
    case TimerPhase::Running: return "running";
    case TimerPhase::Paused: return "paused";
    case TimerPhase::Finished: return "finished";
  }
  return "unknown";
}

std::string_view to_string(DisplayMode mode) {
  return mode == DisplayMode::Countup ? "countup" : "countdown";
}

std::optional<TimerPhase> timer_phase_from_string(std::string_view text) {
  for (auto p : {TimerPhase::Idle, TimerPhase::Running, TimerPhase::Paused, TimerPhase::Finished}) {
    if (to_string(p) == text) return p;
  }
  return std::nullopt;
}

std::optional<DisplayMode> display_mode_from_string(std::string_view text) {
  if (text == "countdown") return DisplayMode::Countdown;
  if (text == "countup") return DisplayMode::Countup;
  return std::nullopt;
}

TimerSession::TimerSession(TimerConfig config) : config_(std::move(config)) {
  const auto report = validate_plan(config_);
  if (!report.ok()) {
    throw Error(ErrorCode::InvalidConfig, report.violations.front().describe());
  }
}

void TimerSession::reject(std::string_view requested) const {
  throw Error(ErrorCode::IllegalTransition,
              "cannot " + std::string(requested) + " while " + std::string(to_string(phase_)));
}

double TimerSession::elapsed_at(double now) const {
  double elapsed = banked_s_;
  if (phase_ == TimerPhase::Running) elapsed += std::max(0.0, now - resumed_at_);
  return std::min(elapsed, static_cast<double>(config_.duration_s));
}

TimerSnapshot TimerSession::start(double now) {
  if (phase_ != TimerPhase::Idle) reject("start");
  banked_s_ = 0.0;
  next_alert_ = 0;
  resumed_at_ = now;
  phase_ = TimerPhase::Running;
  return snapshot(now);
}

TimerSnapshot TimerSession::pause(double now) {
  if (phase_ != TimerPhase::Running) reject("pause");
  banked_s_ = elapsed_at(now);
  phase_ = TimerPhase::Paused;
  return snapshot(now);
}

TimerSnapshot TimerSession::resume(double now) {
  if (phase_ != TimerPhase::Paused) reject("resume");
  resumed_at_ = now;
  phase_ = TimerPhase::Running;
  return snapshot(now);
}

TimerSnapshot TimerSession::stop(double now) {
  if (phase_ == TimerPhase::Idle) reject("stop");
  phase_ = TimerPhase::Idle;
  banked_s_ = 0.0;
  next_alert_ = 0;
  return snapshot(now);
}

TickResult TimerSession::tick(double now) {
  TickResult result;
  if (phase_ != TimerPhase::Running) {
    result.snapshot = snapshot(now);
    return result;
  }

  const double remaining = config_.duration_s - elapsed_at(now);
  while (next_alert_ < config_.alerts.size() &&
         config_.alerts[next_alert_].offset_before_end_s + kTimeEpsilon >= remaining) {
    result.due.push_back({next_alert_, config_.alerts[next_alert_].offset_before_end_s});
    ++next_alert_;
  }
  if (remaining <= kTimeEpsilon) {
    banked_s_ = config_.duration_s;
    phase_ = TimerPhase::Finished;
    result.due.push_back({std::nullopt, 0});
  }
  result.snapshot = snapshot(now);
  return result;
}

TimerSnapshot TimerSession::snapshot(double now) const {
  TimerSnapshot s;
  s.phase = phase_;
  s.display_mode = display_mode_;
  s.config = config_;
  if (phase_ != TimerPhase::Idle) {
    s.elapsed_s = elapsed_at(now);
    for (std::size_t i = 0; i < next_alert_; ++i) s.fired_alerts.push_back(i);
  }
  s.remaining_s = config_.duration_s - s.elapsed_s;
  return s;
}

std::optional<double> TimerSession::seconds_until_next_alert(double now) const {
  if (phase_ != TimerPhase::Running) return std::nullopt;
  const double remaining = config_.duration_s - elapsed_at(now);
  const int target = next_alert_ < config_.alerts.size()
                         ? config_.alerts[next_alert_].offset_before_end_s
                         : 0;
  return std::max(0.0, remaining - target);
}

std::string format_mmss(long long total_seconds) {
  if (total_seconds < 0) total_seconds = 0;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%02lld:%02lld", total_seconds / 60, total_seconds % 60);
  return buf;
}

std::string display_value(const TimerSnapshot& snapshot) {
  if (snapshot.display_mode == DisplayMode::Countup) {
    return format_mmss(static_cast<long long>(std::floor(snapshot.elapsed_s + kTimeEpsilon)));
  }
  return format_mmss(static_cast<long long>(std::ceil(snapshot.remaining_s - kTimeEpsilon)));
}

}  // namespace pacer
