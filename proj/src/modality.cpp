#include "pacer/modality.hpp"

#include <chrono>
#include <condition_variable>
#include <deque>
#include <mutex>
#include <cmath>

namespace pacer {

HapticPattern haptic_pattern(HapticIntensity intensity) {
  HapticPattern pattern{intensity, {}};
  const int pulses = intensity == HapticIntensity::Prominent ? kProminentPulseCount : 1;
  pattern.pulses.assign(pulses, HapticPulse{kHapticPulseMs, kHapticGapMs});
  return pattern;
}

std::string speech_text(int remaining_s) {
  if (remaining_s <= 0) return "Time is up";
  const int minutes = remaining_s / 60;
  const int seconds = remaining_s % 60;
  auto unit = [](int n, const char* word) {
    return std::to_string(n) + " " + word + (n == 1 ? "" : "s");
  };
  std::string text;
  if (minutes > 0) text = unit(minutes, "minute");
  if (seconds > 0) {
    if (!text.empty()) text += ' ';
    text += unit(seconds, "second");
  }
  return text + " remaining";
}

AlertSpec terminal_alert_spec() {
  return {0, ModalitySettings::all(), HapticIntensity::Prominent};
}

std::vector<AlertEvent> dispatch(const DueAlert& due, const ModalitySettings& settings,
                                 const AlertSpec& spec, double remaining_s,
                                 double session_time_s) {
  std::vector<AlertEvent> events;
  const bool terminal = due.terminal();
  // Late alerts announce the actual time left, rounded up to the 5 s grid.
  const int spoken =
      terminal ? 0
               : static_cast<int>(std::ceil(std::max(0.0, remaining_s) / kGridSeconds - kTimeEpsilon)) *
                     kGridSeconds;

  for (Channel channel : kAllChannels) {
    if (!settings.enabled(channel) || !spec.modalities.enabled(channel)) continue;
    AlertEvent event{due.index, channel, {}, session_time_s};
    switch (channel) {
      case Channel::Visual:
        event.payload = VisualPayload{std::string(terminal ? kFlashTerminal : kFlashReminder)};
        break;
      case Channel::Auditory:
        event.payload = AuditoryPayload{std::string(terminal ? kToneDouble : kToneSingle)};
        break;
      case Channel::Speech:
        event.payload = SpeechPayload{speech_text(spoken)};
        break;
      case Channel::Haptic:
        event.payload = haptic_pattern(spec.haptic_intensity);
        break;
    }
    events.push_back(std::move(event));
  }
  return events;
}

struct SinkWorker::State {
  std::shared_ptr<AlertSink> sink;
  std::size_t capacity;
  std::mutex mutex;
  std::condition_variable cv;
  std::deque<AlertEvent> queue;
  bool busy = false;
  bool stopping = false;
  std::uint64_t delivered = 0;
  std::uint64_t dropped = 0;
  std::uint64_t failures = 0;
};

SinkWorker::SinkWorker(std::shared_ptr<AlertSink> sink, std::size_t capacity)
    : channel_(sink->channel()), state_(std::make_shared<State>()) {
  state_->sink = std::move(sink);
  state_->capacity = capacity ? capacity : 1;
  thread_ = std::thread(&SinkWorker::run, state_);
}

SinkWorker::~SinkWorker() {
  {
    std::lock_guard lock(state_->mutex);
    state_->stopping = true;
  }
  state_->cv.notify_all();
  // A stalled sink must not hang engine shutdown; the thread owns a
  // reference to the shared state and exits once deliver() returns.
  if (wait_idle(0.5)) {
    thread_.join();
  } else {
    thread_.detach();
  }
}

void SinkWorker::submit(const AlertEvent& event) {
  {
    std::lock_guard lock(state_->mutex);
    if (state_->queue.size() >= state_->capacity) {
      state_->queue.pop_front();
      ++state_->dropped;
    }
    state_->queue.push_back(event);
  }
  state_->cv.notify_all();
}

void SinkWorker::run(std::shared_ptr<State> state) {
  std::unique_lock lock(state->mutex);
  while (true) {
    state->cv.wait(lock, [&] { return state->stopping || !state->queue.empty(); });
    if (state->stopping) {
      state->queue.clear();
      state->cv.notify_all();
      return;
    }
    AlertEvent event = std::move(state->queue.front());
    state->queue.pop_front();
    state->busy = true;
    lock.unlock();
    bool ok = true;
    try {
      state->sink->deliver(event);
    } catch (...) {
      ok = false;
    }
    lock.lock();
    state->busy = false;
    ok ? ++state->delivered : ++state->failures;
    state->cv.notify_all();
  }
}

std::uint64_t SinkWorker::delivered() const {
  std::lock_guard lock(state_->mutex);
  return state_->delivered;
}

std::uint64_t SinkWorker::dropped() const {
  std::lock_guard lock(state_->mutex);
  return state_->dropped;
}

std::uint64_t SinkWorker::failures() const {
  std::lock_guard lock(state_->mutex);
  return state_->failures;
}

bool SinkWorker::wait_idle(double timeout_s) const {
  std::unique_lock lock(state_->mutex);
  return state_->cv.wait_for(lock, std::chrono::duration<double>(timeout_s),
                             [&] { return state_->queue.empty() && !state_->busy; });
}

SinkWorker& SinkHub::add(std::shared_ptr<AlertSink> sink, std::size_t capacity) {
  workers_.push_back(std::make_unique<SinkWorker>(std::move(sink), capacity));
  return *workers_.back();
}

void SinkHub::publish(const std::vector<AlertEvent>& events) {
  for (const auto& event : events) {
    for (auto& worker : workers_) {
      if (worker->channel() == event.channel) worker->submit(event);
    }
  }
}

bool SinkHub::wait_idle(double timeout_s) const {
  bool idle = true;
  for (const auto& worker : workers_) idle = worker->wait_idle(timeout_s) && idle;
  return idle;
}

}  // namespace pacer
