#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include "pacer/modality_settings.hpp"
#include "pacer/plan.hpp"
#include "pacer/timer.hpp"

namespace pacer {

// Haptic waveforms. Normal is one pulse, Prominent three; a pulse slot is
// pulse duration plus the following gap.
inline constexpr int kHapticPulseMs = 200;
inline constexpr int kHapticGapMs = 100;
inline constexpr int kProminentPulseCount = 3;

struct HapticPulse {
  int duration_ms = 0;
  int gap_ms = 0;
  friend bool operator==(const HapticPulse&, const HapticPulse&) = default;
};

struct HapticPattern {
  HapticIntensity intensity = HapticIntensity::Normal;
  std::vector<HapticPulse> pulses;
  friend bool operator==(const HapticPattern&, const HapticPattern&) = default;
};

HapticPattern haptic_pattern(HapticIntensity intensity);

// Payload ids shared with every client renderer.
inline constexpr std::string_view kFlashReminder = "flash.reminder";
inline constexpr std::string_view kFlashTerminal = "flash.terminal";
inline constexpr std::string_view kToneSingle = "tone.single";
inline constexpr std::string_view kToneDouble = "tone.double";

struct VisualPayload {
  std::string flash_pattern;
  friend bool operator==(const VisualPayload&, const VisualPayload&) = default;
};
struct AuditoryPayload {
  std::string tone;
  friend bool operator==(const AuditoryPayload&, const AuditoryPayload&) = default;
};
struct SpeechPayload {
  std::string text;
  friend bool operator==(const SpeechPayload&, const SpeechPayload&) = default;
};

using AlertPayload = std::variant<VisualPayload, AuditoryPayload, SpeechPayload, HapticPattern>;

struct AlertEvent {
  std::optional<std::size_t> alert_index;  // empty for the terminal alert
  Channel channel = Channel::Visual;
  AlertPayload payload;
  double session_time_s = 0.0;

  bool terminal() const noexcept { return !alert_index.has_value(); }
  friend bool operator==(const AlertEvent&, const AlertEvent&) = default;
};

/// "1 minute 30 seconds remaining", "10 seconds remaining", "Time is up".
std::string speech_text(int remaining_s);

/// Spec used for the implicit time-up alert.
AlertSpec terminal_alert_spec();

/// One event per channel enabled both globally and in the alert's own mask,
/// in Visual, Auditory, Speech, Haptic order. Pure.
std::vector<AlertEvent> dispatch(const DueAlert& due, const ModalitySettings& settings,
                                 const AlertSpec& spec, double remaining_s,
                                 double session_time_s = 0.0);

/// Produces the physical alert for one channel (a tone, a banner...).
class AlertSink {
public:
  virtual ~AlertSink() = default;
  virtual Channel channel() const = 0;
  virtual void deliver(const AlertEvent& event) = 0;
};

inline constexpr std::size_t kDefaultSinkQueue = 16;

/// Runs one sink on its own thread behind a bounded queue. submit() never
/// blocks; when the queue is full the oldest event is dropped. Exceptions
/// thrown by the sink are swallowed and counted.
class SinkWorker {
public:
  explicit SinkWorker(std::shared_ptr<AlertSink> sink, std::size_t capacity = kDefaultSinkQueue);
  ~SinkWorker();

  SinkWorker(const SinkWorker&) = delete;
  SinkWorker& operator=(const SinkWorker&) = delete;

  void submit(const AlertEvent& event);
  Channel channel() const { return channel_; }

  std::uint64_t delivered() const;
  std::uint64_t dropped() const;
  std::uint64_t failures() const;

  /// Blocks until the queue is empty and no delivery is in progress, or the
  /// timeout elapses. Returns true when idle.
  bool wait_idle(double timeout_s) const;

private:
  struct State;
  static void run(std::shared_ptr<State> state);

  Channel channel_;
  std::shared_ptr<State> state_;
  std::thread thread_;
};

/// Fans events out to every registered sink whose channel matches.
class SinkHub {
public:
  SinkWorker& add(std::shared_ptr<AlertSink> sink, std::size_t capacity = kDefaultSinkQueue);
  void publish(const std::vector<AlertEvent>& events);
  bool wait_idle(double timeout_s) const;
  const std::vector<std::unique_ptr<SinkWorker>>& workers() const { return workers_; }

private:
  std::vector<std::unique_ptr<SinkWorker>> workers_;
};

}  // namespace pacer
