#include <atomic>
#include <chrono>
#include <stdexcept>
#include <thread>

#include "doctest.h"
#include "pacer/modality.hpp"

using namespace pacer;

namespace {

std::vector<Channel> channels_of(const std::vector<AlertEvent>& events) {
  std::vector<Channel> out;
  for (const auto& e : events) out.push_back(e.channel);
  return out;
}

ModalitySettings from_mask(int mask) {
  return {(mask & 1) != 0, (mask & 2) != 0, (mask & 4) != 0, (mask & 8) != 0};
}

class RecordingSink : public AlertSink {
public:
  explicit RecordingSink(Channel c) : channel_(c) {}
  Channel channel() const override { return channel_; }
  void deliver(const AlertEvent&) override { ++count; }
  std::atomic<int> count{0};

private:
  Channel channel_;
};

class ThrowingSink : public AlertSink {
public:
  Channel channel() const override { return Channel::Speech; }
  void deliver(const AlertEvent&) override { throw std::runtime_error("speaker on fire"); }
};

class StallingSink : public AlertSink {
public:
  Channel channel() const override { return Channel::Auditory; }
  void deliver(const AlertEvent&) override {
    while (!release) std::this_thread::sleep_for(std::chrono::milliseconds(1));
  }
  std::atomic<bool> release{false};
};

}  // namespace

TEST_CASE("dispatch with every channel on, prominent final reminder") {
  const AlertSpec spec{10, ModalitySettings::all(), HapticIntensity::Prominent};
  const auto events = dispatch({2u, 10}, ModalitySettings::all(), spec, 10.0, 170.0);
  REQUIRE(events.size() == 4);
  CHECK(channels_of(events) == std::vector<Channel>{Channel::Visual, Channel::Auditory, Channel::Speech, Channel::Haptic});
  CHECK(std::get<HapticPattern>(events[3].payload).pulses.size() == 3);
  CHECK(std::get<SpeechPayload>(events[2].payload).text == "10 seconds remaining");
  CHECK(std::get<AuditoryPayload>(events[1].payload).tone == kToneSingle);
  CHECK(std::get<VisualPayload>(events[0].payload).flash_pattern == kFlashReminder);
  for (const auto& e : events) {
    CHECK(e.alert_index == 2u);
    CHECK(e.session_time_s == 170.0);
  }
}

TEST_CASE("dispatch with everything off yields nothing") {
  const AlertSpec spec{90, ModalitySettings::all(), HapticIntensity::Normal};
  CHECK(dispatch({0u, 90}, ModalitySettings::none(), spec, 90.0).empty());
}

TEST_CASE("haptic-only normal reminder is a single pulse") {
  ModalitySettings haptic_only = ModalitySettings::none();
  haptic_only.haptic = true;
  const AlertSpec spec{90, ModalitySettings::all(), HapticIntensity::Normal};
  const auto events = dispatch({0u, 90}, haptic_only, spec, 90.0);
  REQUIRE(events.size() == 1);
  const auto& pattern = std::get<HapticPattern>(events[0].payload);
  CHECK(pattern.intensity == HapticIntensity::Normal);
  REQUIRE(pattern.pulses.size() == 1);
  CHECK(pattern.pulses[0] == HapticPulse{200, 100});
}

TEST_CASE("terminal alert uses the double tone and says time is up") {
  const auto events = dispatch({std::nullopt, 0}, ModalitySettings::all(), terminal_alert_spec(), 0.0, 180.0);
  REQUIRE(events.size() == 4);
  CHECK(events[0].terminal());
  CHECK(std::get<VisualPayload>(events[0].payload).flash_pattern == kFlashTerminal);
  CHECK(std::get<AuditoryPayload>(events[1].payload).tone == kToneDouble);
  CHECK(std::get<SpeechPayload>(events[2].payload).text == "Time is up");
}

TEST_CASE("late reminders announce the time actually left") {
  const AlertSpec spec{90, ModalitySettings::all(), HapticIntensity::Normal};
  ModalitySettings speech_only = ModalitySettings::none();
  speech_only.speech = true;
  auto text = [&](double remaining) {
    return std::get<SpeechPayload>(dispatch({0u, 90}, speech_only, spec, remaining).at(0).payload).text;
  };
  CHECK(text(90.0) == "1 minute 30 seconds remaining");
  CHECK(text(89.2) == "1 minute 30 seconds remaining");
  CHECK(text(8.0) == "10 seconds remaining");
  CHECK(text(0.0) == "Time is up");
}

TEST_CASE("speech_text renders minutes and seconds") {
  // Rule: "<m> minute(s)" and/or "<s> second(s)" then "remaining"; 0 -> "Time is up".
  CHECK(speech_text(90) == "1 minute 30 seconds remaining");
  CHECK(speech_text(0) == "Time is up");
  CHECK(speech_text(60) == "1 minute remaining");
  CHECK(speech_text(120) == "2 minutes remaining");
  CHECK(speech_text(5) == "5 seconds remaining");
  CHECK(speech_text(3605) == "60 minutes 5 seconds remaining");
  CHECK(speech_text(61) == "1 minute 1 second remaining");
}

TEST_CASE("toggle independence over all sixteen settings") {
  const AlertSpec spec{30, ModalitySettings::all(), HapticIntensity::Normal};
  for (int mask = 0; mask < 16; ++mask) {
    const ModalitySettings settings = from_mask(mask);
    const auto events = dispatch({1u, 30}, settings, spec, 30.0);
    std::vector<Channel> expected;
    for (Channel c : kAllChannels) {
      if (settings.enabled(c)) expected.push_back(c);
    }
    CHECK(channels_of(events) == expected);
    CHECK(events == dispatch({1u, 30}, settings, spec, 30.0));

    for (Channel flipped : kAllChannels) {
      ModalitySettings other = settings;
      other.set(flipped, !settings.enabled(flipped));
      const auto changed = dispatch({1u, 30}, other, spec, 30.0);
      for (Channel c : kAllChannels) {
        const bool before = std::count(expected.begin(), expected.end(), c) == 1;
        const auto after_channels = channels_of(changed);
        const bool after = std::count(after_channels.begin(), after_channels.end(), c) == 1;
        CHECK((c == flipped) == (before != after));
      }
    }
  }
}

TEST_CASE("per-alert masks narrow the global toggles") {
  AlertSpec spec{30, ModalitySettings::all(), HapticIntensity::Normal};
  spec.modalities.auditory = false;
  const auto events = dispatch({0u, 30}, ModalitySettings::all(), spec, 30.0);
  CHECK(channels_of(events) == std::vector<Channel>{Channel::Visual, Channel::Speech, Channel::Haptic});
}

TEST_CASE("sink worker delivers, isolates failures, and drops oldest on overflow") {
  auto good = std::make_shared<RecordingSink>(Channel::Visual);
  auto poisoned = std::make_shared<ThrowingSink>();
  auto stalled = std::make_shared<StallingSink>();
  SinkHub hub;
  auto& good_worker = hub.add(good);
  auto& poisoned_worker = hub.add(poisoned);
  auto& stalled_worker = hub.add(stalled, 4);

  const auto events = dispatch({0u, 90}, ModalitySettings::all(), {90, ModalitySettings::all(), HapticIntensity::Normal}, 90.0);
  const auto start = std::chrono::steady_clock::now();
  for (int i = 0; i < 10; ++i) hub.publish(events);
  const auto elapsed = std::chrono::steady_clock::now() - start;
  CHECK(elapsed < std::chrono::milliseconds(200));  // publish never waits on the stalled sink

  CHECK(good_worker.wait_idle(5.0));
  CHECK(poisoned_worker.wait_idle(5.0));
  CHECK(good->count == 10);
  CHECK(good_worker.delivered() == 10);
  CHECK(poisoned_worker.failures() == 10);
  // One event is held by the stalled delivery, four wait, the rest are dropped.
  CHECK(stalled_worker.dropped() >= 5);
  stalled->release = true;
  CHECK(stalled_worker.wait_idle(5.0));
  CHECK(stalled_worker.delivered() + stalled_worker.dropped() == 10);
}
