#include "pacer/haptic_sim.hpp"

#include <algorithm>
#include <cstdio>
#include <random>

#include "pacer/error.hpp"
#include "pacer/modality.hpp"

namespace pacer {

std::vector<double> NotificationSchedule::times() const {
  std::vector<double> out;
  out.reserve(entries.size());
  for (const auto& e : entries) out.push_back(e.fire_at_s);
  return out;
}

NotificationSchedule compile_schedule(const AlertPlan& plan, double min_spacing_s) {
  if (!(min_spacing_s > 0.0)) {
    throw Error(ErrorCode::InvalidSpacing, "minimum notification spacing must be positive");
  }
  const auto report = validate_plan(plan);
  if (!report.ok()) throw Error(ErrorCode::InvalidConfig, report.violations.front().describe());

  NotificationSchedule schedule;
  schedule.min_spacing_s = min_spacing_s;

  // Millisecond integers keep pulse arithmetic exact.
  long long previous_ms = 0;
  bool first = true;
  for (std::size_t i = 0; i < plan.alerts.size(); ++i) {
    const AlertSpec& alert = plan.alerts[i];
    if (!alert.modalities.haptic) continue;
    long long at_ms = static_cast<long long>(plan.duration_s - alert.offset_before_end_s) * 1000;
    const HapticPattern pattern = haptic_pattern(alert.haptic_intensity);
    for (std::size_t slot = 0; slot < pattern.pulses.size(); ++slot) {
      const double gap_s = static_cast<double>(at_ms - previous_ms) / 1000.0;
      if (!first && gap_s + kTimeEpsilon < min_spacing_s) {
        ++schedule.entries.back().merged_pulses;
        ++schedule.coalesced_count;
      } else {
        schedule.entries.push_back(
            {static_cast<double>(at_ms) / 1000.0, static_cast<int>(slot), i, 0});
      }
      previous_ms = at_ms;
      first = false;
      at_ms += pattern.pulses[slot].duration_ms + pattern.pulses[slot].gap_ms;
    }
  }
  return schedule;
}

std::string JitterModel::describe() const {
  char buf[96];
  switch (kind) {
    case JitterKind::None: return "none";
    case JitterKind::UniformDelay:
      std::snprintf(buf, sizeof buf, "uniform:%g", max_s);
      return buf;
    case JitterKind::GaussianDelay:
      std::snprintf(buf, sizeof buf, "gaussian:%g,%g", mean_s, std_s);
      return buf;
  }
  return "unknown";
}

namespace {

std::int64_t merge_count(std::vector<double>& v, std::vector<double>& scratch, std::size_t lo,
                         std::size_t hi) {
  if (hi - lo < 2) return 0;
  const std::size_t mid = lo + (hi - lo) / 2;
  std::int64_t count = merge_count(v, scratch, lo, mid) + merge_count(v, scratch, mid, hi);
  std::size_t i = lo, j = mid, k = lo;
  while (i < mid && j < hi) {
    if (v[j] < v[i]) {
      count += static_cast<std::int64_t>(mid - i);
      scratch[k++] = v[j++];
    } else {
      scratch[k++] = v[i++];
    }
  }
  while (i < mid) scratch[k++] = v[i++];
  while (j < hi) scratch[k++] = v[j++];
  std::copy(scratch.begin() + static_cast<std::ptrdiff_t>(lo),
            scratch.begin() + static_cast<std::ptrdiff_t>(hi),
            v.begin() + static_cast<std::ptrdiff_t>(lo));
  return count;
}

}  // namespace

std::int64_t count_inversions(const std::vector<double>& values) {
  std::vector<double> v = values, scratch(values.size());
  return merge_count(v, scratch, 0, v.size());
}

SimulationResult simulate(const NotificationSchedule& schedule, const JitterModel& jitter) {
  SimulationResult result;
  result.intended = schedule.times();
  result.delivered.reserve(result.intended.size());

  std::mt19937_64 rng(jitter.seed);
  auto sample_delay = [&]() -> double {
    switch (jitter.kind) {
      case JitterKind::None: return 0.0;
      case JitterKind::UniformDelay: {
        if (jitter.max_s <= 0.0) return 0.0;
        std::uniform_real_distribution<double> dist(0.0, jitter.max_s);
        return dist(rng);
      }
      case JitterKind::GaussianDelay: {
        if (jitter.std_s <= 0.0) return std::max(0.0, jitter.mean_s);
        std::normal_distribution<double> dist(jitter.mean_s, jitter.std_s);
        return std::max(0.0, dist(rng));
      }
    }
    return 0.0;
  };

  FidelityReport& report = result.report;
  double total = 0.0;
  for (double t : result.intended) {
    // The sampled delay is the deviation; subtracting t back out would add
    // rounding error.
    const double deviation = sample_delay();
    result.delivered.push_back(t + deviation);
    report.max_abs_deviation_s = std::max(report.max_abs_deviation_s, deviation);
    total += deviation;
  }
  if (!result.intended.empty()) report.mean_abs_deviation_s = total / result.intended.size();
  report.order_violations = count_inversions(result.delivered);

  std::vector<double> sorted = result.delivered;
  std::sort(sorted.begin(), sorted.end());
  report.coalesced_count = schedule.coalesced_count;
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    if (sorted[i] - sorted[i - 1] < kPerceptualMergeS) ++report.coalesced_count;
  }
  return result;
}

}  // namespace pacer
