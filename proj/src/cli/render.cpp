#include <ostream>

#include "pacer/cli.hpp"

namespace pacer::cli {

using namespace protocol;

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::string offsets_text(const AlertPlan& plan) {
  if (plan.alerts.empty()) return "none";
  std::string out;
  for (const auto& a : plan.alerts) {
    if (!out.empty()) out += ' ';
    out += format_mmss(a.offset_before_end_s);
  }
  return out;
}

std::string describe(const SessionSnapshot& s) {
  const TimerSnapshot& t = s.timer;
  return std::string(to_string(t.phase)) + " " + display_value(t) + " " + std::string(to_string(t.display_mode)) +
         " | duration " + format_mmss(t.config.duration_s) + " | alerts " + offsets_text(t.config) + " | fired " +
         std::to_string(t.fired_alerts.size());
}

}  // namespace

Renderer::Renderer(std::ostream& out, std::ostream& err, Style style) : out_(out), err_(err), style_(style) {}

void Renderer::banner(const std::string& text) {
  const std::string line = "  >>> " + text + " <<<  ";
  if (style_.color) {
    out_ << "\x1b[1;7m" << line << "\x1b[0m\n";
  } else {
    out_ << "====" << line << "====\n";
  }
}

void Renderer::render(const ServerMessage& message) {
  const bool fresh = mirror_.apply(message);
  if (!fresh) return;
  std::visit(overloaded{
                 [&](const evt::Welcome& m) {
                   out_ << "welcome " << m.client_id << ": " << describe(m.snapshot) << '\n';
                 },
                 [&](const evt::Snapshot& m) {
                   if (m.resync) out_ << "resync: " << describe(m.snapshot) << '\n';
                 },
                 [&](const evt::Tick& m) {
                   const bool up = mirror_.snapshot() && mirror_.snapshot()->timer.display_mode == DisplayMode::Countup;
                   out_ << m.display << (up ? " elapsed" : " remaining") << '\n';
                 },
                 [&](const evt::AlertFired& m) {
                   const std::string at = format_mmss(static_cast<long long>(m.session_time_s + 0.5));
                   if (m.alert_index) {
                     out_ << "alert " << *m.alert_index + 1 << " at " << at << " (" << m.offset_before_end_s
                          << " s before end)\n";
                   } else {
                     out_ << "time is up at " << at << '\n';
                   }
                   for (const AlertEvent& e : m.events) {
                     std::visit(overloaded{
                                    [&](const VisualPayload&) {
                                      banner(m.alert_index ? speech_text(m.offset_before_end_s) : "TIME IS UP");
                                    },
                                    [&](const AuditoryPayload& p) {
                                      out_ << "\a[BELL] " << p.tone << '\n';
                                    },
                                    [&](const SpeechPayload& p) {
                                      if (style_.speech_marker) out_ << "[SPEECH] " << p.text << '\n';
                                    },
                                    [&](const HapticPattern& p) {
                                      out_ << "[HAPTIC] " << to_string(p.intensity) << ", " << p.pulses.size()
                                           << (p.pulses.size() == 1 ? " pulse" : " pulses") << '\n';
                                    },
                                },
                                e.payload);
                   }
                 },
                 [&](const evt::StateChanged& m) { out_ << "state " << to_string(m.phase) << '\n'; },
                 [&](const evt::PresetList& m) { out_ << "presets: " << m.presets.size() << '\n'; },
                 [&](const evt::Ack&) {},
                 [&](const evt::Error& m) {
                   err_ << "error " << to_string(m.code) << ": " << m.message << '\n';
                 },
             },
             message);
  out_.flush();
}

}  // namespace pacer::cli
