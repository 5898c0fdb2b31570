#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pacer/modality_settings.hpp"

namespace pacer {

inline constexpr int kGridSeconds = 5;
inline constexpr int kMinDurationSeconds = 5;
inline constexpr std::size_t kMaxAlerts = 3;

/// One reminder, expressed as seconds remaining when it should fire.
struct AlertSpec {
  int offset_before_end_s = 0;
  ModalitySettings modalities;
  HapticIntensity haptic_intensity = HapticIntensity::Normal;

  friend bool operator==(const AlertSpec&, const AlertSpec&) = default;
};

/// Total session length plus 1-3 reminders ordered by decreasing offset
/// (alert 1 fires first).
struct AlertPlan {
  int duration_s = 0;
  std::vector<AlertSpec> alerts;

  std::vector<int> offsets() const;

  friend bool operator==(const AlertPlan&, const AlertPlan&) = default;
};

enum class Rule { OutOfRange, OffGrid, NotDecreasing, BadCount };

std::string_view to_string(Rule rule);

struct Violation {
  /// Alert position in the plan; empty when the rule concerns the duration
  /// or the plan as a whole.
  std::optional<std::size_t> alert_index;
  Rule rule;
  std::string message;

  std::string describe() const;
};

struct ValidationReport {
  std::vector<Violation> violations;

  bool ok() const noexcept { return violations.empty(); }
  bool has(Rule rule) const;
  /// One line per violation, in detection order.
  std::string describe() const;
};

/// Rounds to the nearest multiple of five seconds; remainders of exactly
/// 2.5 s round up. Throws std::invalid_argument for negative input.
int quantize(double seconds);

ValidationReport validate_plan(const AlertPlan& plan);

/// Builds the percentage-based default plan. Offsets start from the
/// fractions 1/2, 1/6 and 1/18 of the duration (three alerts), 1/2 and 1/6
/// (two) or 1/6 (one). Throws Error(InvalidDuration) when no valid plan fits.
AlertPlan default_plan(int duration_s, int alert_count);

/// Scales every offset to a new duration, keeping modalities and
/// intensities. Throws Error(InvalidDuration) when the result cannot fit.
AlertPlan rescale_plan(const AlertPlan& plan, int new_duration_s);

}  // namespace pacer
