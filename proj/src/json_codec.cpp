#include "pacer/json_codec.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pacer/error.hpp"

namespace pacer::json {

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw Error(ErrorCode::ParseError, (path.empty() ? std::string("document") : path) + ": " + what);
}

std::string child(const std::string& path, std::string_view key) {
  return path.empty() ? std::string(key) : path + "." + std::string(key);
}

}  // namespace

const Json& field(const Json& object, std::string_view key, const std::string& path) {
  if (!object.is_object()) fail(path, "expected object");
  auto it = object.find(key);
  if (it == object.end()) fail(child(path, key), "missing field");
  return *it;
}

void expect_object(const Json& value, const std::string& path,
                   std::initializer_list<std::string_view> allowed_keys) {
  if (!value.is_object()) fail(path, "expected object");
  for (const auto& item : value.items()) {
    if (std::find(allowed_keys.begin(), allowed_keys.end(), item.key()) == allowed_keys.end()) {
      fail(child(path, item.key()), "unknown field");
    }
  }
}

long long get_integer(const Json& object, std::string_view key, const std::string& path) {
  const Json& v = field(object, key, path);
  if (v.is_number_integer()) return v.get<long long>();
  if (v.is_number_float()) {
    const double d = v.get<double>();
    if (std::isfinite(d) && d == std::floor(d) && std::abs(d) < 9e15) return static_cast<long long>(d);
  }
  fail(child(path, key), "expected integer");
}

int get_int(const Json& object, std::string_view key, const std::string& path) {
  const long long v = get_integer(object, key, path);
  if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max()) {
    fail(child(path, key), "integer out of range");
  }
  return static_cast<int>(v);
}

double get_number(const Json& object, std::string_view key, const std::string& path) {
  const Json& v = field(object, key, path);
  if (!v.is_number()) fail(child(path, key), "expected number");
  return v.get<double>();
}

bool get_bool(const Json& object, std::string_view key, const std::string& path) {
  const Json& v = field(object, key, path);
  if (!v.is_boolean()) fail(child(path, key), "expected boolean");
  return v.get<bool>();
}

std::string get_string(const Json& object, std::string_view key, const std::string& path) {
  const Json& v = field(object, key, path);
  if (!v.is_string()) fail(child(path, key), "expected string");
  return v.get<std::string>();
}

const Json& get_array(const Json& object, std::string_view key, const std::string& path) {
  const Json& v = field(object, key, path);
  if (!v.is_array()) fail(child(path, key), "expected array");
  return v;
}

Json to_json(const ModalitySettings& settings) {
  return Json{{"visual", settings.visual},
              {"auditory", settings.auditory},
              {"speech", settings.speech},
              {"haptic", settings.haptic}};
}

ModalitySettings modality_settings_from_json(const Json& value, const std::string& path) {
  expect_object(value, path, {"visual", "auditory", "speech", "haptic"});
  return {get_bool(value, "visual", path), get_bool(value, "auditory", path),
          get_bool(value, "speech", path), get_bool(value, "haptic", path)};
}

Json to_json(const AlertSpec& spec) {
  return Json{{"offset_before_end_s", spec.offset_before_end_s},
              {"modalities", to_json(spec.modalities)},
              {"haptic_intensity", std::string(to_string(spec.haptic_intensity))}};
}

AlertSpec alert_spec_from_json(const Json& value, const std::string& path) {
  expect_object(value, path, {"offset_before_end_s", "modalities", "haptic_intensity"});
  AlertSpec spec;
  spec.offset_before_end_s = get_int(value, "offset_before_end_s", path);
  spec.modalities = modality_settings_from_json(field(value, "modalities", path), child(path, "modalities"));
  const auto intensity = get_string(value, "haptic_intensity", path);
  const auto parsed = haptic_intensity_from_string(intensity);
  if (!parsed) fail(child(path, "haptic_intensity"), "expected \"normal\" or \"prominent\"");
  spec.haptic_intensity = *parsed;
  return spec;
}

Json to_json(const AlertPlan& plan) {
  Json alerts = Json::array();
  for (const auto& a : plan.alerts) alerts.push_back(to_json(a));
  return Json{{"duration_s", plan.duration_s}, {"alerts", std::move(alerts)}};
}

AlertPlan alert_plan_from_json(const Json& value, const std::string& path) {
  expect_object(value, path, {"duration_s", "alerts"});
  AlertPlan plan;
  plan.duration_s = get_int(value, "duration_s", path);
  const Json& alerts = get_array(value, "alerts", path);
  for (std::size_t i = 0; i < alerts.size(); ++i) {
    plan.alerts.push_back(alert_spec_from_json(alerts[i], child(path, "alerts") + "[" + std::to_string(i) + "]"));
  }
  return plan;
}

Json parse(std::string_view text) {
  try {
    return Json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::parse_error& e) {
    std::size_t line = 1, column = 1;
    const std::size_t end = std::min<std::size_t>(e.byte ? e.byte - 1 : 0, text.size());
    for (std::size_t i = 0; i < end; ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    throw Error(ErrorCode::ParseError, "malformed JSON at line " + std::to_string(line) +
                                           ", column " + std::to_string(column));
  }
}

}  // namespace pacer::json
