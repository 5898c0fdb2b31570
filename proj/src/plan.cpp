#include "pacer/plan.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "pacer/error.hpp"

namespace pacer {

namespace {

bool on_grid(int seconds) { return seconds % kGridSeconds == 0; }

void require_duration(int duration_s) {
  if (duration_s < kMinDurationSeconds || !on_grid(duration_s)) {
    throw Error(ErrorCode::InvalidDuration,
                "duration " + std::to_string(duration_s) +
                    " s must be a positive multiple of 5 s");
  }
}

// Quantizes, clamps to [5, duration - 5] and separates colliding offsets by
// pushing the larger one upward, so the final (smallest) offset never moves.
std::vector<int> fit_offsets(const std::vector<double>& raw, int duration_s) {
  require_duration(duration_s);
  const int lo = kGridSeconds;
  const int hi = duration_s - kGridSeconds;
  const auto too_short = [&] {
    return Error(ErrorCode::InvalidDuration,
                 "duration " + std::to_string(duration_s) + " s is too short for " +
                     std::to_string(raw.size()) + " distinct alerts");
  };
  if (hi < lo) throw too_short();

  std::vector<int> out;
  out.reserve(raw.size());
  for (double r : raw) out.push_back(std::clamp(quantize(r), lo, hi));

  for (std::size_t i = out.size(); i-- > 1;) {
    if (out[i - 1] <= out[i]) out[i - 1] = out[i] + kGridSeconds;
  }
  if (!out.empty() && out.front() > hi) throw too_short();
  return out;
}

}  // namespace

std::vector<int> AlertPlan::offsets() const {
  std::vector<int> out;
  out.reserve(alerts.size());
  for (const auto& a : alerts) out.push_back(a.offset_before_end_s);
  return out;
}

std::string_view to_string(Rule rule) {
  switch (rule) {
    case Rule::OutOfRange: return "OutOfRange";
    case Rule::OffGrid: return "OffGrid";
    case Rule::NotDecreasing: return "NotDecreasing";
    case Rule::BadCount: return "BadCount";
  }
  return "Unknown";
}

std::string Violation::describe() const {
  std::string out{to_string(rule)};
  if (alert_index) out += " (alert " + std::to_string(*alert_index + 1) + ")";
  out += ": ";
  out += message;
  return out;
}

bool ValidationReport::has(Rule rule) const {
  return std::any_of(violations.begin(), violations.end(),
                     [rule](const Violation& v) { return v.rule == rule; });
}

std::string ValidationReport::describe() const {
  if (ok()) return "ok";
  std::ostringstream os;
  for (std::size_t i = 0; i < violations.size(); ++i) {
    if (i) os << '\n';
    os << violations[i].describe();
  }
  return os.str();
}

int quantize(double seconds) {
  if (!(seconds >= 0.0)) throw std::invalid_argument("quantize: negative or NaN input");
  return static_cast<int>(std::floor(seconds / kGridSeconds + 0.5)) * kGridSeconds;
}

ValidationReport validate_plan(const AlertPlan& plan) {
  ValidationReport report;
  auto add = [&](std::optional<std::size_t> index, Rule rule, std::string message) {
    report.violations.push_back({index, rule, std::move(message)});
  };

  const int duration = plan.duration_s;
  if (duration < kMinDurationSeconds) {
    add(std::nullopt, Rule::OutOfRange,
        "duration " + std::to_string(duration) + " s is below the 5 s minimum");
  }
  if (!on_grid(duration)) {
    add(std::nullopt, Rule::OffGrid,
        "duration " + std::to_string(duration) + " s is not a multiple of 5 s");
  }

  const std::size_t count = plan.alerts.size();
  if (count < 1 || count > kMaxAlerts) {
    add(std::nullopt, Rule::BadCount,
        "plan has " + std::to_string(count) + " alerts; expected 1 to 3");
  }

  for (std::size_t i = 0; i < count; ++i) {
    const int offset = plan.alerts[i].offset_before_end_s;
    const std::string label = "offset " + std::to_string(offset) + " s";
    if (offset <= 0 || offset >= duration) {
      add(i, Rule::OutOfRange,
          label + " must be above 0 s and below the " + std::to_string(duration) +
              " s duration");
    }
    if (!on_grid(offset)) add(i, Rule::OffGrid, label + " is not a multiple of 5 s");
    if (i > 0 && offset >= plan.alerts[i - 1].offset_before_end_s) {
      add(i, Rule::NotDecreasing,
          label + " must be smaller than the previous alert's " +
              std::to_string(plan.alerts[i - 1].offset_before_end_s) + " s");
    }
  }
  return report;
}

AlertPlan default_plan(int duration_s, int alert_count) {
  std::vector<double> fractions;
  switch (alert_count) {
    case 1: fractions = {1.0 / 6.0}; break;
    case 2: fractions = {1.0 / 2.0, 1.0 / 6.0}; break;
    case 3: fractions = {1.0 / 2.0, 1.0 / 6.0, 1.0 / 18.0}; break;
    default:
      throw Error(ErrorCode::InvalidConfig,
                  "alert count must be 1, 2 or 3 (got " + std::to_string(alert_count) + ")");
  }
  require_duration(duration_s);

  std::vector<double> raw;
  for (double f : fractions) raw.push_back(f * duration_s);
  const auto offsets = fit_offsets(raw, duration_s);

  AlertPlan plan{duration_s, {}};
  for (std::size_t i = 0; i < offsets.size(); ++i) {
    const bool last = i + 1 == offsets.size();
    plan.alerts.push_back({offsets[i], ModalitySettings::all(),
                           last ? HapticIntensity::Prominent : HapticIntensity::Normal});
  }
  return plan;
}

AlertPlan rescale_plan(const AlertPlan& plan, int new_duration_s) {
  if (new_duration_s == plan.duration_s) return plan;
  require_duration(new_duration_s);
  if (plan.duration_s <= 0) {
    throw Error(ErrorCode::InvalidConfig, "cannot rescale a plan without a duration");
  }

  const double scale = static_cast<double>(new_duration_s) / plan.duration_s;
  std::vector<double> raw;
  for (const auto& a : plan.alerts) raw.push_back(a.offset_before_end_s * scale);
  const auto offsets = fit_offsets(raw, new_duration_s);

  AlertPlan out = plan;
  out.duration_s = new_duration_s;
  for (std::size_t i = 0; i < offsets.size(); ++i) out.alerts[i].offset_before_end_s = offsets[i];
  return out;
}

}  // namespace pacer
