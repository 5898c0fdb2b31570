#include "pacer/protocol.hpp"

#include <algorithm>

namespace pacer::protocol {

using json::Json;

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

[[noreturn]] void protocol_error(const std::string& what) {
  throw pacer::Error(ErrorCode::ProtocolError, what);
}

std::string sub(const std::string& path, std::string_view key) { return path + "." + std::string(key); }

Json alert_ref(const std::optional<std::size_t>& index) {
  return index ? Json(*index) : Json("terminal");
}

std::optional<std::size_t> alert_ref_from_json(const Json& object, const std::string& path) {
  const Json& v = json::field(object, "alert", path);
  if (v.is_string() && v.get<std::string>() == "terminal") return std::nullopt;
  const long long index = json::get_integer(object, "alert", path);
  if (index < 0) throw pacer::Error(ErrorCode::ParseError, sub(path, "alert") + ": negative index");
  return static_cast<std::size_t>(index);
}

std::uint64_t get_seq(const Json& object, const std::string& path) {
  const long long seq = json::get_integer(object, "seq", path);
  if (seq < 0) throw pacer::Error(ErrorCode::ParseError, sub(path, "seq") + ": negative sequence number");
  return static_cast<std::uint64_t>(seq);
}

Json presets_to_json(const std::vector<Preset>& presets) {
  Json out = Json::array();
  for (const auto& p : presets) out.push_back(pacer::to_json(p));
  return out;
}

std::vector<Preset> presets_from_json(const Json& object, const std::string& path) {
  const Json& arr = json::get_array(object, "presets", path);
  std::vector<Preset> out;
  for (std::size_t i = 0; i < arr.size(); ++i) {
    out.push_back(preset_from_json(arr[i], sub(path, "presets") + "[" + std::to_string(i) + "]"));
  }
  return out;
}

ErrorCode error_code_from_string(const std::string& text, const std::string& path) {
  for (int c = 0; c <= static_cast<int>(ErrorCode::ConnectError); ++c) {
    if (to_string(static_cast<ErrorCode>(c)) == text) return static_cast<ErrorCode>(c);
  }
  throw pacer::Error(ErrorCode::ParseError, path + ": unknown error code \"" + text + "\"");
}

Json parse_frame(std::string_view frame) {
  try {
    Json doc = json::parse(frame);
    if (!doc.is_object()) protocol_error("frame must be a JSON object");
    return doc;
  } catch (const pacer::Error& e) {
    protocol_error(e.what());
  }
}

}  // namespace

std::optional<std::uint64_t> sequence_of(const ServerMessage& message) {
  return std::visit(overloaded{
                        [](const evt::Ack&) -> std::optional<std::uint64_t> { return std::nullopt; },
                        [](const evt::Error&) -> std::optional<std::uint64_t> { return std::nullopt; },
                        [](const auto& m) -> std::optional<std::uint64_t> { return m.seq; },
                    },
                    message);
}

std::string_view type_name(const CommandBody& body) {
  return std::visit(overloaded{
                        [](const cmd::Hello&) { return std::string_view("hello"); },
                        [](const cmd::Configure&) { return std::string_view("configure"); },
                        [](const cmd::LoadPreset&) { return std::string_view("load_preset"); },
                        [](const cmd::Start&) { return std::string_view("start"); },
                        [](const cmd::Pause&) { return std::string_view("pause"); },
                        [](const cmd::Resume&) { return std::string_view("resume"); },
                        [](const cmd::Stop&) { return std::string_view("stop"); },
                        [](const cmd::SetDisplayMode&) { return std::string_view("set_display_mode"); },
                        [](const cmd::SetModalities&) { return std::string_view("set_modalities"); },
                        [](const cmd::SavePreset&) { return std::string_view("save_preset"); },
                        [](const cmd::DeletePreset&) { return std::string_view("delete_preset"); },
                    },
                    body);
}

std::string_view type_name(const ServerMessage& message) {
  return std::visit(overloaded{
                        [](const evt::Welcome&) { return std::string_view("welcome"); },
                        [](const evt::Snapshot&) { return std::string_view("snapshot"); },
                        [](const evt::Tick&) { return std::string_view("tick"); },
                        [](const evt::AlertFired&) { return std::string_view("alert_fired"); },
                        [](const evt::StateChanged&) { return std::string_view("state_changed"); },
                        [](const evt::PresetList&) { return std::string_view("preset_list"); },
                        [](const evt::Ack&) { return std::string_view("ack"); },
                        [](const evt::Error&) { return std::string_view("error"); },
                    },
                    message);
}

Json to_json(const SessionSnapshot& s) {
  Json fired = Json::array();
  for (auto i : s.timer.fired_alerts) fired.push_back(i);
  return Json{{"phase", std::string(to_string(s.timer.phase))},
              {"elapsed_s", s.timer.elapsed_s},
              {"remaining_s", s.timer.remaining_s},
              {"display_mode", std::string(to_string(s.timer.display_mode))},
              {"display", display_value(s.timer)},
              {"fired_alert_ids", std::move(fired)},
              {"config", json::to_json(s.timer.config)},
              {"modalities", json::to_json(s.modalities)}};
}

SessionSnapshot session_snapshot_from_json(const Json& value, const std::string& path) {
  json::expect_object(value, path,
                      {"phase", "elapsed_s", "remaining_s", "display_mode", "display",
                       "fired_alert_ids", "config", "modalities"});
  SessionSnapshot s;
  const auto phase = timer_phase_from_string(json::get_string(value, "phase", path));
  if (!phase) throw pacer::Error(ErrorCode::ParseError, sub(path, "phase") + ": unknown phase");
  s.timer.phase = *phase;
  s.timer.elapsed_s = json::get_number(value, "elapsed_s", path);
  s.timer.remaining_s = json::get_number(value, "remaining_s", path);
  const auto mode = display_mode_from_string(json::get_string(value, "display_mode", path));
  if (!mode) throw pacer::Error(ErrorCode::ParseError, sub(path, "display_mode") + ": unknown mode");
  s.timer.display_mode = *mode;
  const Json& fired = json::get_array(value, "fired_alert_ids", path);
  for (const auto& f : fired) {
    if (!f.is_number_unsigned()) {
      throw pacer::Error(ErrorCode::ParseError, sub(path, "fired_alert_ids") + ": expected indices");
    }
    s.timer.fired_alerts.push_back(f.get<std::size_t>());
  }
  s.timer.config = json::alert_plan_from_json(json::field(value, "config", path), sub(path, "config"));
  s.modalities = json::modality_settings_from_json(json::field(value, "modalities", path),
                                                   sub(path, "modalities"));
  return s;
}

Json to_json(const AlertEvent& e) {
  Json payload = std::visit(
      overloaded{
          [](const VisualPayload& p) { return Json{{"flash_pattern", p.flash_pattern}}; },
          [](const AuditoryPayload& p) { return Json{{"tone", p.tone}}; },
          [](const SpeechPayload& p) { return Json{{"text", p.text}}; },
          [](const HapticPattern& p) {
            Json pulses = Json::array();
            for (const auto& pulse : p.pulses) {
              pulses.push_back(Json{{"duration_ms", pulse.duration_ms}, {"gap_ms", pulse.gap_ms}});
            }
            return Json{{"intensity", std::string(to_string(p.intensity))}, {"pulses", std::move(pulses)}};
          },
      },
      e.payload);
  return Json{{"alert", alert_ref(e.alert_index)},
              {"channel", std::string(to_string(e.channel))},
              {"session_time_s", e.session_time_s},
              {"payload", std::move(payload)}};
}

AlertEvent alert_event_from_json(const Json& value, const std::string& path) {
  json::expect_object(value, path, {"alert", "channel", "session_time_s", "payload"});
  AlertEvent e;
  e.alert_index = alert_ref_from_json(value, path);
  const auto channel = channel_from_string(json::get_string(value, "channel", path));
  if (!channel) throw pacer::Error(ErrorCode::ParseError, sub(path, "channel") + ": unknown channel");
  e.channel = *channel;
  e.session_time_s = json::get_number(value, "session_time_s", path);
  const Json& p = json::field(value, "payload", path);
  const std::string ppath = sub(path, "payload");
  switch (e.channel) {
    case Channel::Visual:
      json::expect_object(p, ppath, {"flash_pattern"});
      e.payload = VisualPayload{json::get_string(p, "flash_pattern", ppath)};
      break;
    case Channel::Auditory:
      json::expect_object(p, ppath, {"tone"});
      e.payload = AuditoryPayload{json::get_string(p, "tone", ppath)};
      break;
    case Channel::Speech:
      json::expect_object(p, ppath, {"text"});
      e.payload = SpeechPayload{json::get_string(p, "text", ppath)};
      break;
    case Channel::Haptic: {
      json::expect_object(p, ppath, {"intensity", "pulses"});
      HapticPattern pattern;
      const auto intensity = haptic_intensity_from_string(json::get_string(p, "intensity", ppath));
      if (!intensity) throw pacer::Error(ErrorCode::ParseError, sub(ppath, "intensity") + ": unknown intensity");
      pattern.intensity = *intensity;
      const Json& pulses = json::get_array(p, "pulses", ppath);
      for (std::size_t i = 0; i < pulses.size(); ++i) {
        const std::string pp = sub(ppath, "pulses") + "[" + std::to_string(i) + "]";
        json::expect_object(pulses[i], pp, {"duration_ms", "gap_ms"});
        pattern.pulses.push_back({json::get_int(pulses[i], "duration_ms", pp), json::get_int(pulses[i], "gap_ms", pp)});
      }
      e.payload = std::move(pattern);
      break;
    }
  }
  return e;
}

Json to_json(const Command& command) {
  Json out{{"type", std::string(type_name(command.body))}, {"id", command.request_id}};
  std::visit(overloaded{
                 [&](const cmd::Hello& c) {
                   if (!c.client_name.empty()) out["client_name"] = c.client_name;
                 },
                 [&](const cmd::Configure& c) { out["config"] = json::to_json(c.config); },
                 [&](const cmd::LoadPreset& c) { out["preset_id"] = c.preset_id; },
                 [&](const cmd::SetDisplayMode& c) { out["mode"] = std::string(to_string(c.mode)); },
                 [&](const cmd::SetModalities& c) { out["modalities"] = json::to_json(c.settings); },
                 [&](const cmd::SavePreset& c) { out["name"] = c.name; },
                 [&](const cmd::DeletePreset& c) { out["preset_id"] = c.preset_id; },
                 [](const auto&) {},
             },
             command.body);
  return out;
}

Json to_json(const ServerMessage& message) {
  Json out{{"type", std::string(type_name(message))}};
  std::visit(overloaded{
                 [&](const evt::Welcome& m) {
                   out["client_id"] = m.client_id;
                   out["seq"] = m.seq;
                   out["snapshot"] = to_json(m.snapshot);
                   out["presets"] = presets_to_json(m.presets);
                 },
                 [&](const evt::Snapshot& m) {
                   out["seq"] = m.seq;
                   out["snapshot"] = to_json(m.snapshot);
                   out["resync"] = m.resync;
                 },
                 [&](const evt::Tick& m) {
                   out["seq"] = m.seq;
                   out["elapsed_s"] = m.elapsed_s;
                   out["remaining_s"] = m.remaining_s;
                   out["display"] = m.display;
                 },
                 [&](const evt::AlertFired& m) {
                   out["seq"] = m.seq;
                   out["alert"] = alert_ref(m.alert_index);
                   out["offset_before_end_s"] = m.offset_before_end_s;
                   out["session_time_s"] = m.session_time_s;
                   Json events = Json::array();
                   for (const auto& e : m.events) events.push_back(to_json(e));
                   out["events"] = std::move(events);
                 },
                 [&](const evt::StateChanged& m) {
                   out["seq"] = m.seq;
                   out["phase"] = std::string(to_string(m.phase));
                 },
                 [&](const evt::PresetList& m) {
                   out["seq"] = m.seq;
                   out["presets"] = presets_to_json(m.presets);
                 },
                 [&](const evt::Ack& m) { out["in_reply_to"] = m.in_reply_to; },
                 [&](const evt::Error& m) {
                   out["code"] = std::string(to_string(m.code));
                   out["message"] = m.message;
                   out["in_reply_to"] = m.in_reply_to;
                 },
             },
             message);
  return out;
}

std::string encode(const Command& command) { return to_json(command).dump(); }
std::string encode(const ServerMessage& message) { return to_json(message).dump(); }

Command decode_command(std::string_view frame) {
  const Json doc = parse_frame(frame);
  try {
    const std::string type = json::get_string(doc, "type", "");
    Command c;
    c.request_id = json::get_string(doc, "id", "");
    const std::string path = type;
    auto only = [&](std::initializer_list<std::string_view> extra) {
      std::vector<std::string_view> keys{"type", "id"};
      keys.insert(keys.end(), extra.begin(), extra.end());
      for (const auto& item : doc.items()) {
        if (std::find(keys.begin(), keys.end(), item.key()) == keys.end()) {
          protocol_error(type + "." + item.key() + ": unknown field");
        }
      }
    };
    if (type == "hello") {
      only({"client_name"});
      cmd::Hello h;
      if (doc.contains("client_name")) h.client_name = json::get_string(doc, "client_name", path);
      c.body = h;
    } else if (type == "configure") {
      only({"config"});
      c.body = cmd::Configure{json::alert_plan_from_json(json::field(doc, "config", path), sub(path, "config"))};
    } else if (type == "load_preset") {
      only({"preset_id"});
      c.body = cmd::LoadPreset{json::get_string(doc, "preset_id", path)};
    } else if (type == "start") {
      only({});
      c.body = cmd::Start{};
    } else if (type == "pause") {
      only({});
      c.body = cmd::Pause{};
    } else if (type == "resume") {
      only({});
      c.body = cmd::Resume{};
    } else if (type == "stop") {
      only({});
      c.body = cmd::Stop{};
    } else if (type == "set_display_mode") {
      only({"mode"});
      const auto mode = display_mode_from_string(json::get_string(doc, "mode", path));
      if (!mode) protocol_error(path + ".mode: expected \"countdown\" or \"countup\"");
      c.body = cmd::SetDisplayMode{*mode};
    } else if (type == "set_modalities") {
      only({"modalities"});
      c.body = cmd::SetModalities{
          json::modality_settings_from_json(json::field(doc, "modalities", path), sub(path, "modalities"))};
    } else if (type == "save_preset") {
      only({"name"});
      c.body = cmd::SavePreset{json::get_string(doc, "name", path)};
    } else if (type == "delete_preset") {
      only({"preset_id"});
      c.body = cmd::DeletePreset{json::get_string(doc, "preset_id", path)};
    } else {
      protocol_error("unknown command type \"" + type + "\"");
    }
    return c;
  } catch (const pacer::Error& e) {
    if (e.code() == ErrorCode::ProtocolError) throw;
    protocol_error(e.what());
  }
}

ServerMessage decode_server_message(std::string_view frame) {
  const Json doc = parse_frame(frame);
  try {
    const std::string type = json::get_string(doc, "type", "");
    const std::string& path = type;
    if (type == "welcome") {
      json::expect_object(doc, path, {"type", "client_id", "seq", "snapshot", "presets"});
      return evt::Welcome{json::get_string(doc, "client_id", path), get_seq(doc, path),
                          session_snapshot_from_json(json::field(doc, "snapshot", path), sub(path, "snapshot")),
                          presets_from_json(doc, path)};
    }
    if (type == "snapshot") {
      json::expect_object(doc, path, {"type", "seq", "snapshot", "resync"});
      return evt::Snapshot{get_seq(doc, path),
                           session_snapshot_from_json(json::field(doc, "snapshot", path), sub(path, "snapshot")),
                           json::get_bool(doc, "resync", path)};
    }
    if (type == "tick") {
      json::expect_object(doc, path, {"type", "seq", "elapsed_s", "remaining_s", "display"});
      return evt::Tick{get_seq(doc, path), json::get_number(doc, "elapsed_s", path),
                       json::get_number(doc, "remaining_s", path), json::get_string(doc, "display", path)};
    }
    if (type == "alert_fired") {
      json::expect_object(doc, path, {"type", "seq", "alert", "offset_before_end_s", "session_time_s", "events"});
      evt::AlertFired m;
      m.seq = get_seq(doc, path);
      m.alert_index = alert_ref_from_json(doc, path);
      m.offset_before_end_s = json::get_int(doc, "offset_before_end_s", path);
      m.session_time_s = json::get_number(doc, "session_time_s", path);
      const Json& events = json::get_array(doc, "events", path);
      for (std::size_t i = 0; i < events.size(); ++i) {
        m.events.push_back(alert_event_from_json(events[i], sub(path, "events") + "[" + std::to_string(i) + "]"));
      }
      return m;
    }
    if (type == "state_changed") {
      json::expect_object(doc, path, {"type", "seq", "phase"});
      const auto phase = timer_phase_from_string(json::get_string(doc, "phase", path));
      if (!phase) protocol_error(path + ".phase: unknown phase");
      return evt::StateChanged{get_seq(doc, path), *phase};
    }
    if (type == "preset_list") {
      json::expect_object(doc, path, {"type", "seq", "presets"});
      return evt::PresetList{get_seq(doc, path), presets_from_json(doc, path)};
    }
    if (type == "ack") {
      json::expect_object(doc, path, {"type", "in_reply_to"});
      return evt::Ack{json::get_string(doc, "in_reply_to", path)};
    }
    if (type == "error") {
      json::expect_object(doc, path, {"type", "code", "message", "in_reply_to"});
      return evt::Error{error_code_from_string(json::get_string(doc, "code", path), sub(path, "code")),
                        json::get_string(doc, "message", path), json::get_string(doc, "in_reply_to", path)};
    }
    protocol_error("unknown event type \"" + type + "\"");
  } catch (const pacer::Error& e) {
    if (e.code() == ErrorCode::ProtocolError) throw;
    protocol_error(e.what());
  }
}

std::string salvage_request_id(std::string_view frame) {
  try {
    const Json doc = Json::parse(frame.begin(), frame.end());
    if (doc.is_object()) {
      auto it = doc.find("id");
      if (it != doc.end() && it->is_string()) return it->get<std::string>();
    }
  } catch (const std::exception&) {
  }
  return {};
}

bool Mirror::apply(const ServerMessage& message) {
  if (const auto* w = std::get_if<evt::Welcome>(&message)) {
    client_id_ = w->client_id;
    seq_ = w->seq;
    snapshot_ = w->snapshot;
    presets_ = w->presets;
    return true;
  }
  const auto seq = sequence_of(message);
  if (!seq) return true;
  if (const auto* s = std::get_if<evt::Snapshot>(&message); s && s->resync) {
    if (*seq < seq_) return false;
  } else if (*seq <= seq_) {
    return false;
  }
  seq_ = *seq;

  std::visit(overloaded{
                 [&](const evt::Snapshot& m) { snapshot_ = m.snapshot; },
                 [&](const evt::Tick& m) {
                   if (!snapshot_) return;
                   snapshot_->timer.elapsed_s = m.elapsed_s;
                   snapshot_->timer.remaining_s = m.remaining_s;
                 },
                 [&](const evt::AlertFired& m) {
                   if (!snapshot_ || !m.alert_index) return;
                   auto& fired = snapshot_->timer.fired_alerts;
                   if (std::find(fired.begin(), fired.end(), *m.alert_index) == fired.end()) {
                     fired.push_back(*m.alert_index);
                     std::sort(fired.begin(), fired.end());
                   }
                 },
                 [&](const evt::StateChanged& m) {
                   if (snapshot_) snapshot_->timer.phase = m.phase;
                 },
                 [&](const evt::PresetList& m) { presets_ = m.presets; },
                 [](const auto&) {},
             },
             message);
  return true;
}

}  // namespace pacer::protocol
