#include <charconv>

#include "pacer/cli.hpp"
#include "pacer/error.hpp"

namespace pacer::cli {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
  return s;
}

std::optional<long long> digits(std::string_view s) {
  if (s.empty() || s.size() > 9 || s.front() < '0' || s.front() > '9') return std::nullopt;
  long long value = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return value;
}

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = text.find(sep, start);
    parts.push_back(trim(text.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

double parse_real(std::string_view text, const std::string& what) {
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size() || value < 0.0) {
    throw Error(ErrorCode::InvalidConfig, "invalid " + what + " \"" + std::string(text) + "\"");
  }
  return value;
}

}  // namespace

int parse_time(std::string_view text) {
  const std::string_view t = trim(text);
  const auto bad = [&] {
    return Error(ErrorCode::InvalidConfig,
                 "invalid time \"" + std::string(text) + "\": expected MM:SS or whole seconds");
  };
  const auto colon = t.find(':');
  if (colon == std::string_view::npos) {
    const auto s = digits(t);
    if (!s) throw bad();
    return static_cast<int>(*s);
  }
  const auto m = digits(t.substr(0, colon));
  const std::string_view sec = t.substr(colon + 1);
  const auto s = sec.size() == 2 ? digits(sec) : std::nullopt;
  if (!m || !s || *s > 59 || *m > 100000) throw bad();
  return static_cast<int>(*m * 60 + *s);
}

std::vector<int> parse_time_list(std::string_view text) {
  std::vector<int> out;
  for (auto part : split(text, ',')) out.push_back(parse_time(part));
  return out;
}

std::vector<HapticIntensity> parse_intensity_list(std::string_view text) {
  std::vector<HapticIntensity> out;
  for (auto part : split(text, ',')) {
    const auto intensity = haptic_intensity_from_string(part);
    if (!intensity) {
      throw Error(ErrorCode::InvalidConfig,
                  "invalid haptic intensity \"" + std::string(part) + "\": expected normal or prominent");
    }
    out.push_back(*intensity);
  }
  return out;
}

JitterModel parse_jitter(std::string_view text, std::uint64_t seed) {
  const std::string_view t = trim(text);
  if (t == "none") return JitterModel::none();
  const auto colon = t.find(':');
  const std::string_view kind = t.substr(0, colon);
  const std::string_view args = colon == std::string_view::npos ? std::string_view() : t.substr(colon + 1);
  if (kind == "uniform" && colon != std::string_view::npos) {
    return JitterModel::uniform(parse_real(args, "jitter bound"), seed);
  }
  if (kind == "gaussian" && colon != std::string_view::npos) {
    const auto parts = split(args, ',');
    if (parts.size() == 2) {
      return JitterModel::gaussian(parse_real(parts[0], "jitter mean"), parse_real(parts[1], "jitter deviation"),
                                   seed);
    }
  }
  throw Error(ErrorCode::InvalidConfig,
              "invalid jitter \"" + std::string(text) + "\": expected none, uniform:D or gaussian:M,S");
}

AlertPlan build_plan(const PlanArgs& args) {
  const int duration = parse_time(args.duration);
  AlertPlan plan;
  if (args.alerts.empty()) {
    plan = default_plan(duration, args.count);
  } else {
    plan.duration_s = duration;
    for (int offset : parse_time_list(args.alerts)) {
      plan.alerts.push_back(AlertSpec{offset, ModalitySettings::all(), HapticIntensity::Normal});
    }
    if (!plan.alerts.empty()) plan.alerts.back().haptic_intensity = HapticIntensity::Prominent;
  }
  if (!args.haptic.empty()) {
    const auto intensities = parse_intensity_list(args.haptic);
    if (intensities.size() == 1) {
      for (auto& a : plan.alerts) a.haptic_intensity = intensities[0];
    } else if (intensities.size() == plan.alerts.size()) {
      for (std::size_t i = 0; i < intensities.size(); ++i) plan.alerts[i].haptic_intensity = intensities[i];
    } else {
      throw Error(ErrorCode::InvalidConfig, "--haptic lists " + std::to_string(intensities.size()) +
                                                " intensities for " + std::to_string(plan.alerts.size()) +
                                                " alerts");
    }
  }
  return plan;
}

}  // namespace pacer::cli
