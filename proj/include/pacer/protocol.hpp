#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "pacer/error.hpp"
#include "pacer/json_codec.hpp"
#include "pacer/modality.hpp"
#include "pacer/presets.hpp"
#include "pacer/timer.hpp"

namespace pacer::protocol {

// Client -> server. Each command carries a client-chosen request id that the
// server echoes in the matching Ack or Error.
namespace cmd {
struct Hello {
  std::string client_name;
  friend bool operator==(const Hello&, const Hello&) = default;
};
struct Configure {
  TimerConfig config;
  friend bool operator==(const Configure&, const Configure&) = default;
};
struct LoadPreset {
  std::string preset_id;
  friend bool operator==(const LoadPreset&, const LoadPreset&) = default;
};
struct Start {
  friend bool operator==(const Start&, const Start&) = default;
};
struct Pause {
  friend bool operator==(const Pause&, const Pause&) = default;
};
struct Resume {
  friend bool operator==(const Resume&, const Resume&) = default;
};
struct Stop {
  friend bool operator==(const Stop&, const Stop&) = default;
};
struct SetDisplayMode {
  DisplayMode mode = DisplayMode::Countdown;
  friend bool operator==(const SetDisplayMode&, const SetDisplayMode&) = default;
};
struct SetModalities {
  ModalitySettings settings;
  friend bool operator==(const SetModalities&, const SetModalities&) = default;
};
struct SavePreset {
  std::string name;
  friend bool operator==(const SavePreset&, const SavePreset&) = default;
};
struct DeletePreset {
  std::string preset_id;
  friend bool operator==(const DeletePreset&, const DeletePreset&) = default;
};
}  // namespace cmd

using CommandBody = std::variant<cmd::Hello, cmd::Configure, cmd::LoadPreset, cmd::Start, cmd::Pause,
                                 cmd::Resume, cmd::Stop, cmd::SetDisplayMode, cmd::SetModalities,
                                 cmd::SavePreset, cmd::DeletePreset>;

struct Command {
  std::string request_id;
  CommandBody body;
  friend bool operator==(const Command&, const Command&) = default;
};

/// Everything a client needs to render the timer.
struct SessionSnapshot {
  TimerSnapshot timer;
  ModalitySettings modalities;
  friend bool operator==(const SessionSnapshot&, const SessionSnapshot&) = default;
};

// Server -> client. Broadcast events carry a sequence number shared by all
// connections; Welcome carries the latest number at connect time. Ack and
// Error are private replies and carry none.
namespace evt {
struct Welcome {
  std::string client_id;
  std::uint64_t seq = 0;
  SessionSnapshot snapshot;
  std::vector<Preset> presets;
  friend bool operator==(const Welcome&, const Welcome&) = default;
};
struct Snapshot {
  std::uint64_t seq = 0;
  SessionSnapshot snapshot;
  /// True when sent to recover a client whose queue overflowed; it then
  /// repeats the latest seq instead of taking a new one.
  bool resync = false;
  friend bool operator==(const Snapshot&, const Snapshot&) = default;
};
struct Tick {
  std::uint64_t seq = 0;
  double elapsed_s = 0.0;
  double remaining_s = 0.0;
  std::string display;
  friend bool operator==(const Tick&, const Tick&) = default;
};
struct AlertFired {
  std::uint64_t seq = 0;
  std::optional<std::size_t> alert_index;  // empty for the terminal alert
  int offset_before_end_s = 0;
  double session_time_s = 0.0;
  std::vector<AlertEvent> events;
  friend bool operator==(const AlertFired&, const AlertFired&) = default;
};
struct StateChanged {
  std::uint64_t seq = 0;
  TimerPhase phase = TimerPhase::Idle;
  friend bool operator==(const StateChanged&, const StateChanged&) = default;
};
struct PresetList {
  std::uint64_t seq = 0;
  std::vector<Preset> presets;
  friend bool operator==(const PresetList&, const PresetList&) = default;
};
struct Ack {
  std::string in_reply_to;
  friend bool operator==(const Ack&, const Ack&) = default;
};
struct Error {
  ErrorCode code = ErrorCode::ProtocolError;
  std::string message;
  std::string in_reply_to;
  friend bool operator==(const Error&, const Error&) = default;
};
}  // namespace evt

using ServerMessage = std::variant<evt::Welcome, evt::Snapshot, evt::Tick, evt::AlertFired,
                                   evt::StateChanged, evt::PresetList, evt::Ack, evt::Error>;

/// Sequence number of a broadcast event, empty for private replies.
std::optional<std::uint64_t> sequence_of(const ServerMessage& message);
std::string_view type_name(const CommandBody& body);
std::string_view type_name(const ServerMessage& message);

json::Json to_json(const SessionSnapshot& snapshot);
SessionSnapshot session_snapshot_from_json(const json::Json& value, const std::string& path);
json::Json to_json(const AlertEvent& event);
AlertEvent alert_event_from_json(const json::Json& value, const std::string& path);

json::Json to_json(const Command& command);
json::Json to_json(const ServerMessage& message);

/// One frame is one JSON object. Both parsers throw Error(ProtocolError).
std::string encode(const Command& command);
std::string encode(const ServerMessage& message);
Command decode_command(std::string_view frame);
ServerMessage decode_server_message(std::string_view frame);

/// Best-effort extraction of the "id" field from a frame that failed to
/// decode, so the error reply can still reference it.
std::string salvage_request_id(std::string_view frame);

/// Client-side view of the session, updated only from server events.
class Mirror {
public:
  /// Applies one event. Messages older than the latest seq are ignored and
  /// return false.
  bool apply(const ServerMessage& message);

  const std::optional<SessionSnapshot>& snapshot() const noexcept { return snapshot_; }
  const std::vector<Preset>& presets() const noexcept { return presets_; }
  std::uint64_t seq() const noexcept { return seq_; }
  const std::string& client_id() const noexcept { return client_id_; }

  friend bool operator==(const Mirror& a, const Mirror& b) {
    return a.snapshot_ == b.snapshot_ && a.presets_ == b.presets_ && a.seq_ == b.seq_;
  }

private:
  std::optional<SessionSnapshot> snapshot_;
  std::vector<Preset> presets_;
  std::uint64_t seq_ = 0;
  std::string client_id_;
};

}  // namespace pacer::protocol
