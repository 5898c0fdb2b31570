#pragma once

#include <cstddef>
#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pacer/clock.hpp"
#include "pacer/modality.hpp"
#include "pacer/presets.hpp"
#include "pacer/protocol.hpp"
#include "pacer/timer.hpp"

namespace pacer {

using ClientId = std::string;

inline constexpr double kDefaultTickRateHz = 1.0;
inline constexpr std::size_t kDefaultClientQueue = 256;

/// Hosts one timer session for any number of clients. All state changes go
/// through apply() and poll(), which must be called from a single owner
/// (the transport's event loop). Clients read their outbound messages with
/// take_outbox().
class SessionEngine {
public:
  struct Options {
    double tick_rate_hz = kDefaultTickRateHz;
    std::size_t client_queue_capacity = kDefaultClientQueue;
    /// Configuration before any Configure command; defaults to 3:00 with the
    /// default three-alert plan.
    std::optional<TimerConfig> initial_config;
  };

  SessionEngine(const Clock& clock, PresetRepository& presets);
  SessionEngine(const Clock& clock, PresetRepository& presets, Options options);

  /// Registers a client and queues its Welcome.
  ClientId connect();
  void disconnect(const ClientId& client);

  /// Decodes one frame and applies it. A malformed frame yields a
  /// ProtocolError reply and marks the client for closing.
  void receive(const ClientId& from, std::string_view frame);
  /// Applies a command in arrival order. `from` may be empty for local
  /// callers that need no reply.
  void apply(const ClientId& from, const protocol::Command& command);

  /// Advances the timer to the clock's current time and broadcasts any Tick,
  /// AlertFired and StateChanged events that became due.
  void poll();
  /// Clock time at which poll() next has work to do, while running.
  std::optional<double> next_wake() const;

  std::vector<protocol::ServerMessage> take_outbox(const ClientId& client);
  bool has_outbox(const ClientId& client) const;
  bool closing(const ClientId& client) const;
  bool connected(const ClientId& client) const;
  std::vector<ClientId> clients() const;
  std::uint64_t overflow_count(const ClientId& client) const;

  /// Invoked whenever messages are queued for a client.
  void set_outbound_listener(std::function<void(const ClientId&)> listener);

  protocol::SessionSnapshot snapshot() const;
  std::uint64_t seq() const noexcept { return seq_; }
  const TimerSession& session() const noexcept { return session_; }
  const ModalitySettings& modalities() const noexcept { return modalities_; }
  double tick_rate_hz() const noexcept { return tick_period_s_ > 0 ? 1.0 / tick_period_s_ : 0.0; }
  SinkHub& sinks() noexcept { return sinks_; }

private:
  struct Client {
    std::deque<protocol::ServerMessage> outbox;
    bool closing = false;
    std::uint64_t overflows = 0;
  };

  void execute(const ClientId& from, const protocol::CommandBody& body);
  void replace_config(TimerConfig config);
  void broadcast(protocol::ServerMessage message);
  void send(const ClientId& to, protocol::ServerMessage message);
  void push(const ClientId& id, Client& client, protocol::ServerMessage message);
  void broadcast_phase();
  void restart_ticks(double now);
  double next_tick_at() const;
  protocol::evt::Welcome welcome(const ClientId& id) const;

  const Clock& clock_;
  PresetRepository& presets_;
  std::size_t queue_capacity_;
  double tick_period_s_;
  TimerSession session_;
  ModalitySettings modalities_;
  std::uint64_t seq_ = 0;
  std::uint64_t next_client_ = 1;
  std::map<ClientId, Client> clients_;
  std::function<void(const ClientId&)> listener_;
  SinkHub sinks_;
  double tick_anchor_ = 0.0;
  std::uint64_t tick_index_ = 1;
};

/// Drives the engine on a simulated clock, waking at every tick and alert
/// time up to `until`.
void advance_to(SessionEngine& engine, ManualClock& clock, double until);

}  // namespace pacer
