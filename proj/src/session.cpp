#include "pacer/session.hpp"

#include <algorithm>

namespace pacer {

using namespace protocol;

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

constexpr double kLateThresholdS = 1e-6;

TimerConfig initial(const std::optional<TimerConfig>& config) {
  return config ? *config : default_plan(180, 3);
}

}  // namespace

SessionEngine::SessionEngine(const Clock& clock, PresetRepository& presets)
    : SessionEngine(clock, presets, Options{}) {}

SessionEngine::SessionEngine(const Clock& clock, PresetRepository& presets, Options options)
    : clock_(clock),
      presets_(presets),
      queue_capacity_(std::max<std::size_t>(options.client_queue_capacity, 4)),
      tick_period_s_(options.tick_rate_hz > 0 ? 1.0 / options.tick_rate_hz : 1.0),
      session_(initial(options.initial_config)) {}

ClientId SessionEngine::connect() {
  ClientId id = "c" + std::to_string(next_client_++);
  auto& client = clients_[id];
  push(id, client, welcome(id));
  return id;
}

void SessionEngine::disconnect(const ClientId& client) { clients_.erase(client); }

evt::Welcome SessionEngine::welcome(const ClientId& id) const {
  return evt::Welcome{id, seq_, snapshot(), presets_.list()};
}

void SessionEngine::receive(const ClientId& from, std::string_view frame) {
  Command command;
  try {
    command = decode_command(frame);
  } catch (const pacer::Error& e) {
    send(from, evt::Error{ErrorCode::ProtocolError, e.what(), salvage_request_id(frame)});
    if (auto it = clients_.find(from); it != clients_.end()) it->second.closing = true;
    return;
  }
  apply(from, command);
}

void SessionEngine::apply(const ClientId& from, const Command& command) {
  // Time-based events that are already due go out before the command's effects.
  poll();
  try {
    execute(from, command.body);
    send(from, evt::Ack{command.request_id});
  } catch (const pacer::Error& e) {
    send(from, evt::Error{e.code(), e.what(), command.request_id});
  }
}

void SessionEngine::execute(const ClientId& from, const CommandBody& body) {
  const double now = clock_.now();
  std::visit(overloaded{
                 [&](const cmd::Hello&) {
                   if (!from.empty()) send(from, welcome(from));
                 },
                 [&](const cmd::Configure& c) { replace_config(c.config); },
                 [&](const cmd::LoadPreset& c) { replace_config(presets_.get(c.preset_id).config); },
                 [&](const cmd::Start&) {
                   session_.start(now);
                   restart_ticks(now);
                   broadcast_phase();
                 },
                 [&](const cmd::Pause&) {
                   session_.pause(now);
                   broadcast_phase();
                 },
                 [&](const cmd::Resume&) {
                   session_.resume(now);
                   restart_ticks(now);
                   broadcast_phase();
                 },
                 [&](const cmd::Stop&) {
                   session_.stop(now);
                   broadcast_phase();
                 },
                 [&](const cmd::SetDisplayMode& c) {
                   session_.set_display_mode(c.mode);
                   broadcast(evt::Snapshot{0, snapshot(), false});
                 },
                 [&](const cmd::SetModalities& c) {
                   modalities_ = c.settings;
                   broadcast(evt::Snapshot{0, snapshot(), false});
                 },
                 [&](const cmd::SavePreset& c) {
                   presets_.save(c.name, session_.config());
                   broadcast(evt::PresetList{0, presets_.list()});
                 },
                 [&](const cmd::DeletePreset& c) {
                   presets_.remove(c.preset_id);
                   broadcast(evt::PresetList{0, presets_.list()});
                 },
             },
             body);
}

void SessionEngine::replace_config(TimerConfig config) {
  const TimerPhase phase = session_.phase();
  if (phase == TimerPhase::Running || phase == TimerPhase::Paused) {
    throw pacer::Error(ErrorCode::IllegalTransition,
                       "cannot configure while " + std::string(to_string(phase)) + "; stop the timer first");
  }
  TimerSession next(std::move(config));
  next.set_display_mode(session_.display_mode());
  session_ = std::move(next);
  broadcast(evt::Snapshot{0, snapshot(), false});
}

void SessionEngine::broadcast_phase() {
  broadcast(evt::StateChanged{0, session_.phase()});
  broadcast(evt::Snapshot{0, snapshot(), false});
}

void SessionEngine::restart_ticks(double now) {
  tick_anchor_ = now;
  tick_index_ = 1;
}

double SessionEngine::next_tick_at() const {
  return tick_anchor_ + static_cast<double>(tick_index_) * tick_period_s_;
}

void SessionEngine::poll() {
  if (session_.phase() != TimerPhase::Running) return;
  const double now = clock_.now();
  const TickResult result = session_.tick(now);
  const TimerSnapshot& timer = result.snapshot;
  const bool finished = timer.phase == TimerPhase::Finished;

  if (now + kTimeEpsilon >= next_tick_at() || finished) {
    while (next_tick_at() <= now + kTimeEpsilon) ++tick_index_;
    broadcast(evt::Tick{0, timer.elapsed_s, timer.remaining_s, display_value(timer)});
  }

  for (const DueAlert& due : result.due) {
    const AlertSpec spec = due.terminal() ? terminal_alert_spec() : timer.config.alerts[*due.index];
    // Wake-up arithmetic can land a hair past the due time; report the
    // scheduled time unless the alert is genuinely late.
    const double scheduled = timer.config.duration_s - due.offset_before_end_s;
    const double at = timer.elapsed_s - scheduled < kLateThresholdS ? scheduled : timer.elapsed_s;
    auto events = dispatch(due, modalities_, spec, timer.remaining_s, at);
    sinks_.publish(events);
    broadcast(evt::AlertFired{0, due.index, due.offset_before_end_s, at, std::move(events)});
  }

  if (finished) broadcast_phase();
}

std::optional<double> SessionEngine::next_wake() const {
  const double now = clock_.now();
  const auto until_alert = session_.seconds_until_next_alert(now);
  if (!until_alert) return std::nullopt;
  return std::min(next_tick_at(), now + *until_alert);
}

void SessionEngine::broadcast(ServerMessage message) {
  ++seq_;
  std::visit(overloaded{
                 [&](evt::Ack&) {},
                 [&](evt::Error&) {},
                 [&](evt::Welcome&) {},
                 [&](auto& m) { m.seq = seq_; },
             },
             message);
  for (auto& [id, client] : clients_) push(id, client, message);
}

void SessionEngine::send(const ClientId& to, ServerMessage message) {
  if (to.empty()) return;
  auto it = clients_.find(to);
  if (it == clients_.end()) return;
  push(it->first, it->second, std::move(message));
}

void SessionEngine::push(const ClientId& id, Client& client, ServerMessage message) {
  if (client.outbox.size() < queue_capacity_) {
    client.outbox.push_back(std::move(message));
  } else {
    // Replace the backlog with messages that already reflect every dropped
    // event: a fresh Welcome if the original one was never read, otherwise
    // the newest preset list (snapshots do not carry presets) and a resync
    // snapshot. Recent replies survive so requests still get answered.
    ++client.overflows;
    client.outbox.push_back(std::move(message));
    bool welcome_pending = false;
    std::optional<ServerMessage> preset_list;
    std::deque<ServerMessage> replies;
    for (auto& queued : client.outbox) {
      if (std::holds_alternative<evt::Welcome>(queued)) {
        welcome_pending = true;
      } else if (std::holds_alternative<evt::PresetList>(queued)) {
        preset_list = std::move(queued);
      } else if (std::holds_alternative<evt::Ack>(queued) || std::holds_alternative<evt::Error>(queued)) {
        replies.push_back(std::move(queued));
      }
    }
    client.outbox.clear();
    if (welcome_pending) {
      client.outbox.push_back(welcome(id));
    } else {
      if (preset_list) client.outbox.push_back(std::move(*preset_list));
      client.outbox.push_back(evt::Snapshot{seq_, snapshot(), true});
    }
    while (replies.size() > queue_capacity_ / 2) replies.pop_front();
    for (auto& r : replies) client.outbox.push_back(std::move(r));
  }
  if (listener_) listener_(id);
}

std::vector<ServerMessage> SessionEngine::take_outbox(const ClientId& client) {
  auto it = clients_.find(client);
  if (it == clients_.end()) return {};
  std::vector<ServerMessage> out(std::make_move_iterator(it->second.outbox.begin()),
                                 std::make_move_iterator(it->second.outbox.end()));
  it->second.outbox.clear();
  return out;
}

bool SessionEngine::has_outbox(const ClientId& client) const {
  auto it = clients_.find(client);
  return it != clients_.end() && !it->second.outbox.empty();
}

bool SessionEngine::closing(const ClientId& client) const {
  auto it = clients_.find(client);
  return it != clients_.end() && it->second.closing;
}

bool SessionEngine::connected(const ClientId& client) const { return clients_.count(client) != 0; }

std::vector<ClientId> SessionEngine::clients() const {
  std::vector<ClientId> out;
  for (const auto& entry : clients_) out.push_back(entry.first);
  return out;
}

std::uint64_t SessionEngine::overflow_count(const ClientId& client) const {
  auto it = clients_.find(client);
  return it == clients_.end() ? 0 : it->second.overflows;
}

void SessionEngine::set_outbound_listener(std::function<void(const ClientId&)> listener) {
  listener_ = std::move(listener);
}

SessionSnapshot SessionEngine::snapshot() const {
  return SessionSnapshot{session_.snapshot(clock_.now()), modalities_};
}

void advance_to(SessionEngine& engine, ManualClock& clock, double until) {
  while (true) {
    const auto wake = engine.next_wake();
    if (!wake || *wake > until) break;
    clock.set(*wake);
    engine.poll();
  }
  clock.set(until);
  engine.poll();
}

}  // namespace pacer
