#pragma once

#include <initializer_list>
#include <string>
#include <string_view>

#include "json.hpp"
#include "pacer/modality_settings.hpp"
#include "pacer/plan.hpp"

namespace pacer::json {

using Json = nlohmann::ordered_json;

// Strict field access. Every failure throws Error(ParseError) whose message
// starts with the dotted path of the offending field.
const Json& field(const Json& object, std::string_view key, const std::string& path);
void expect_object(const Json& value, const std::string& path,
                   std::initializer_list<std::string_view> allowed_keys);
long long get_integer(const Json& object, std::string_view key, const std::string& path);
int get_int(const Json& object, std::string_view key, const std::string& path);
double get_number(const Json& object, std::string_view key, const std::string& path);
bool get_bool(const Json& object, std::string_view key, const std::string& path);
std::string get_string(const Json& object, std::string_view key, const std::string& path);
const Json& get_array(const Json& object, std::string_view key, const std::string& path);

Json to_json(const ModalitySettings& settings);
ModalitySettings modality_settings_from_json(const Json& value, const std::string& path);

Json to_json(const AlertSpec& spec);
AlertSpec alert_spec_from_json(const Json& value, const std::string& path);

/// {"duration_s": ..., "alerts": [...]}
Json to_json(const AlertPlan& plan);
AlertPlan alert_plan_from_json(const Json& value, const std::string& path);

/// Parses text, reporting syntax errors with line and column.
Json parse(std::string_view text);

}  // namespace pacer::json
