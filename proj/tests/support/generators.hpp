#pragma once

// Random generators shared by the property tests and the acceptance suite.

#include <algorithm>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "pacer/plan.hpp"
#include "pacer/presets.hpp"
#include "pacer/protocol.hpp"

namespace pacer::testing {

using Rng = std::mt19937_64;

inline int uniform_int(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }
inline double uniform_real(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}
inline bool coin(Rng& rng) { return uniform_int(rng, 0, 1) == 1; }

inline ModalitySettings random_modalities(Rng& rng) {
  return {coin(rng), coin(rng), coin(rng), coin(rng)};
}

/// Valid plan: duration on the grid, 1-3 strictly decreasing grid offsets.
inline AlertPlan random_plan(Rng& rng, int max_duration = 3600) {
  AlertPlan plan;
  const int count = uniform_int(rng, 1, 3);
  plan.duration_s = 5 * uniform_int(rng, count + 1, max_duration / 5);
  std::vector<int> slots;
  for (int s = 1; s < plan.duration_s / 5; ++s) slots.push_back(s);
  std::shuffle(slots.begin(), slots.end(), rng);
  slots.resize(count);
  std::sort(slots.rbegin(), slots.rend());
  for (int s : slots) {
    plan.alerts.push_back({5 * s, random_modalities(rng),
                           coin(rng) ? HapticIntensity::Prominent : HapticIntensity::Normal});
  }
  return plan;
}

inline std::string random_name(Rng& rng) {
  static const std::string alphabet = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789 -_'\"\\/";
  const int length = uniform_int(rng, 1, 40);
  std::string name;
  for (int i = 0; i < length; ++i) name += alphabet[uniform_int(rng, 0, static_cast<int>(alphabet.size()) - 1)];
  if (uniform_int(rng, 0, 9) == 0) name += "\xC3\xA9t\xC3\xA9";  // non-ASCII
  if (std::all_of(name.begin(), name.end(), [](char c) { return c == ' '; })) name = "x" + name;
  return name;
}

inline Timestamp random_timestamp(Rng& rng) {
  // 2000-01-01 .. ~2060
  return Timestamp{std::chrono::seconds{946684800LL + std::uniform_int_distribution<long long>(0, 1900000000LL)(rng)}};
}

inline PresetStore random_store(Rng& rng, int max_presets = 6) {
  PresetStore store;
  const int n = uniform_int(rng, 0, max_presets);
  for (int i = 0; i < n; ++i) {
    Preset p;
    p.id = make_preset_id();
    do {
      p.name = random_name(rng) + "#" + std::to_string(i);
    } while (store.find_by_name(p.name));
    p.config = random_plan(rng);
    p.created_at = random_timestamp(rng);
    p.updated_at = p.created_at + std::chrono::seconds{uniform_int(rng, 0, 100000)};
    store.presets.push_back(std::move(p));
  }
  return store;
}

inline protocol::SessionSnapshot random_snapshot(Rng& rng) {
  protocol::SessionSnapshot s;
  s.timer.config = random_plan(rng);
  s.timer.phase = static_cast<TimerPhase>(uniform_int(rng, 0, 3));
  s.timer.display_mode = coin(rng) ? DisplayMode::Countup : DisplayMode::Countdown;
  s.timer.elapsed_s = uniform_real(rng, 0.0, s.timer.config.duration_s);
  s.timer.remaining_s = s.timer.config.duration_s - s.timer.elapsed_s;
  for (std::size_t i = 0; i < s.timer.config.alerts.size(); ++i) {
    if (coin(rng)) s.timer.fired_alerts.push_back(i);
  }
  s.modalities = random_modalities(rng);
  return s;
}

inline AlertEvent random_alert_event(Rng& rng) {
  AlertEvent e;
  if (coin(rng)) e.alert_index = static_cast<std::size_t>(uniform_int(rng, 0, 2));
  e.channel = kAllChannels[static_cast<std::size_t>(uniform_int(rng, 0, 3))];
  e.session_time_s = uniform_real(rng, 0.0, 4000.0);
  switch (e.channel) {
    case Channel::Visual: e.payload = VisualPayload{"flash." + random_name(rng)}; break;
    case Channel::Auditory: e.payload = AuditoryPayload{"tone." + random_name(rng)}; break;
    case Channel::Speech: e.payload = SpeechPayload{random_name(rng)}; break;
    case Channel::Haptic:
      e.payload = haptic_pattern(coin(rng) ? HapticIntensity::Prominent : HapticIntensity::Normal);
      break;
  }
  return e;
}

inline protocol::Command random_command(Rng& rng) {
  using namespace protocol;
  Command c;
  c.request_id = "r" + std::to_string(uniform_int(rng, 0, 1 << 20));
  switch (uniform_int(rng, 0, 10)) {
    case 0: c.body = cmd::Hello{coin(rng) ? random_name(rng) : std::string()}; break;
    case 1: c.body = cmd::Configure{random_plan(rng)}; break;
    case 2: c.body = cmd::LoadPreset{make_preset_id()}; break;
    case 3: c.body = cmd::Start{}; break;
    case 4: c.body = cmd::Pause{}; break;
    case 5: c.body = cmd::Resume{}; break;
    case 6: c.body = cmd::Stop{}; break;
    case 7: c.body = cmd::SetDisplayMode{coin(rng) ? DisplayMode::Countup : DisplayMode::Countdown}; break;
    case 8: c.body = cmd::SetModalities{random_modalities(rng)}; break;
    case 9: c.body = cmd::SavePreset{random_name(rng)}; break;
    default: c.body = cmd::DeletePreset{make_preset_id()}; break;
  }
  return c;
}

inline protocol::ServerMessage random_server_message(Rng& rng) {
  using namespace protocol;
  const auto seq = static_cast<std::uint64_t>(uniform_int(rng, 0, 1 << 30));
  switch (uniform_int(rng, 0, 7)) {
    case 0: return evt::Welcome{"c" + std::to_string(uniform_int(rng, 1, 99)), seq, random_snapshot(rng),
                                random_store(rng, 3).presets};
    case 1: return evt::Snapshot{seq, random_snapshot(rng), coin(rng)};
    case 2: {
      const double elapsed = uniform_real(rng, 0, 600);
      return evt::Tick{seq, elapsed, 600 - elapsed, "01:23"};
    }
    case 3: {
      evt::AlertFired m{seq, {}, 0, uniform_real(rng, 0, 600), {}};
      if (coin(rng)) m.alert_index = static_cast<std::size_t>(uniform_int(rng, 0, 2));
      m.offset_before_end_s = 5 * uniform_int(rng, 0, 100);
      const int n = uniform_int(rng, 0, 4);
      for (int i = 0; i < n; ++i) m.events.push_back(random_alert_event(rng));
      return m;
    }
    case 4: return evt::StateChanged{seq, static_cast<TimerPhase>(uniform_int(rng, 0, 3))};
    case 5: return evt::PresetList{seq, random_store(rng, 3).presets};
    case 6: return evt::Ack{"r" + std::to_string(seq)};
    default:
      return evt::Error{static_cast<ErrorCode>(uniform_int(rng, 0, static_cast<int>(ErrorCode::ConnectError))),
                        random_name(rng), "r" + std::to_string(seq)};
  }
}

}  // namespace pacer::testing
