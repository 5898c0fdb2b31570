#pragma once

#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pacer/haptic_sim.hpp"
#include "pacer/modality.hpp"
#include "pacer/plan.hpp"
#include "pacer/protocol.hpp"

namespace pacer::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUser = 1;
inline constexpr int kExitRuntime = 2;

/// Standard streams, injectable for in-process tests. `in_fd` is only read
/// by `attach`.
struct Io {
  std::ostream& out;
  std::ostream& err;
  int in_fd = 0;
};

/// Entry point shared by the binary and the tests. Returns the exit code.
int main(int argc, const char* const* argv, Io io);
int main(const std::vector<std::string>& args, Io io);

/// "3:00", "0:05", "90". Throws Error(InvalidConfig) on anything else.
int parse_time(std::string_view text);
/// Comma separated list of parse_time values.
std::vector<int> parse_time_list(std::string_view text);
std::vector<HapticIntensity> parse_intensity_list(std::string_view text);

/// "none", "uniform:D" or "gaussian:M,S". Throws Error(InvalidConfig).
JitterModel parse_jitter(std::string_view text, std::uint64_t seed);

struct PlanArgs {
  std::string duration = "3:00";
  std::string alerts;      // explicit offsets before end; empty for defaults
  int count = 3;           // used with default offsets
  std::string haptic;      // one intensity for all alerts or one per alert
};

/// Builds an unvalidated plan. Explicit offsets keep the default intensity
/// rule: the last reminder is Prominent.
AlertPlan build_plan(const PlanArgs& args);

/// Speech sink that runs `command` (split on spaces) with the utterance
/// appended as the last argument, waiting for it to exit.
std::shared_ptr<AlertSink> make_speech_command_sink(std::string command);

/// Turns server messages into terminal lines. Used by `run` and `attach`.
class Renderer {
public:
  struct Style {
    bool color = false;          // ANSI high-contrast banners
    bool speech_marker = true;   // print [SPEECH] lines when no command runs them
  };

  Renderer(std::ostream& out, std::ostream& err, Style style);

  void render(const protocol::ServerMessage& message);

private:
  void banner(const std::string& text);

  std::ostream& out_;
  std::ostream& err_;
  Style style_;
  protocol::Mirror mirror_;
};

}  // namespace pacer::cli
