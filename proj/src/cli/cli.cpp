#include "pacer/cli.hpp"

#include <poll.h>
#include <pthread.h>
#include <signal.h>
#include <termios.h>
#include <unistd.h>

#include <charconv>
#include <chrono>
#include <fstream>
#include <iostream>
#include <memory>
#include <thread>

#include "CLI11.hpp"
#include "pacer/error.hpp"
#include "pacer/session.hpp"
#include "pacer/websocket.hpp"

namespace pacer::cli {

using namespace protocol;

namespace {

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidConfig:
    case ErrorCode::IllegalTransition:
    case ErrorCode::InvalidDuration:
    case ErrorCode::InvalidSpacing:
    case ErrorCode::DuplicateName:
    case ErrorCode::NotFound:
    case ErrorCode::ParseError:
      return kExitUser;
    default:
      return kExitRuntime;
  }
}

bool is_tty(const std::ostream& out, int fd) {
  return (&out == &std::cout) && ::isatty(fd) == 1;
}

void add_plan_options(CLI::App& app, PlanArgs& plan) {
  app.add_option("-d,--duration", plan.duration, "Session length, MM:SS or seconds")->capture_default_str();
  app.add_option("-a,--alerts", plan.alerts, "Comma separated times before end, e.g. 1:30,0:30,0:10");
  app.add_option("-n,--count", plan.count, "Number of default alerts when --alerts is absent")
      ->capture_default_str()
      ->check(CLI::Range(1, 3));
  app.add_option("--haptic", plan.haptic, "normal|prominent, one value or one per alert");
}

/// Builds and validates a plan; prints the report and returns nullopt on
/// failure.
std::optional<AlertPlan> checked_plan(const PlanArgs& args, Io io) {
  AlertPlan plan = build_plan(args);
  const ValidationReport report = validate_plan(plan);
  if (!report.ok()) {
    io.err << report.describe() << '\n';
    return std::nullopt;
  }
  return plan;
}

// ---------------------------------------------------------------- run

struct RunArgs {
  PlanArgs plan;
  bool no_visual = false, no_auditory = false, no_speech = false, no_haptic = false;
  std::string display = "countdown";
  double tick_rate = kDefaultTickRateHz;
  bool faketime = false;
  bool json = false;
  std::string speech_cmd;
};

int run_timer(const RunArgs& args, Io io) {
  const auto plan = checked_plan(args.plan, io);
  if (!plan) return kExitUser;
  const auto mode = display_mode_from_string(args.display);
  if (!mode) throw Error(ErrorCode::InvalidConfig, "--display must be countdown or countup");
  if (!(args.tick_rate > 0.0)) throw Error(ErrorCode::InvalidConfig, "--tick-rate must be positive");

  ManualClock fake;
  SteadyClock real;
  const Clock& clock = args.faketime ? static_cast<const Clock&>(fake) : real;
  PresetRepository presets("");
  SessionEngine engine(clock, presets, SessionEngine::Options{args.tick_rate, std::size_t(1) << 24, *plan});
  if (!args.speech_cmd.empty()) engine.sinks().add(make_speech_command_sink(args.speech_cmd));

  Renderer renderer(io.out, io.err, {is_tty(io.out, STDOUT_FILENO), args.speech_cmd.empty()});
  const ClientId self = engine.connect();
  auto drain = [&] {
    for (const auto& m : engine.take_outbox(self)) {
      if (args.json) {
        io.out << encode(m) << '\n';
      } else {
        renderer.render(m);
      }
    }
    io.out.flush();
  };
  drain();
  const ModalitySettings modalities{!args.no_visual, !args.no_auditory, !args.no_speech, !args.no_haptic};
  engine.apply("", Command{"", cmd::SetModalities{modalities}});
  engine.apply("", Command{"", cmd::SetDisplayMode{*mode}});
  engine.apply(self, Command{"start", cmd::Start{}});
  drain();

  while (engine.session().phase() == TimerPhase::Running) {
    const auto wake = engine.next_wake();
    if (!wake) break;
    if (args.faketime) {
      fake.set(*wake);
    } else {
      const double delay = *wake - clock.now();
      if (delay > 0) std::this_thread::sleep_for(std::chrono::duration<double>(delay));
    }
    engine.poll();
    drain();
  }
  if (!args.speech_cmd.empty()) engine.sinks().wait_idle(30.0);
  return kExitOk;
}

// ---------------------------------------------------------------- serve

struct ServeArgs {
  std::string bind = kDefaultBind;
  std::uint16_t port = kDefaultPort;
  std::string presets_path;
  double tick_rate = kDefaultTickRateHz;
};

std::filesystem::path presets_path_or_default(const std::string& path) {
  return path.empty() ? default_presets_path() : std::filesystem::path(path);
}

void report_load_issues(const PresetRepository& repo, Io io) {
  for (const auto& issue : repo.load_issues()) io.err << "warning: skipped preset: " << issue.message << '\n';
}

int serve(const ServeArgs& args, Io io) {
  if (!(args.tick_rate > 0.0)) throw Error(ErrorCode::InvalidConfig, "--tick-rate must be positive");
  PresetRepository presets(presets_path_or_default(args.presets_path));
  report_load_issues(presets, io);
  SteadyClock clock;
  SessionEngine engine(clock, presets, SessionEngine::Options{args.tick_rate, kDefaultClientQueue, std::nullopt});
  WebSocketServer server(engine, clock, args.bind, args.port);
  io.out << "listening on ws://" << args.bind << ':' << server.port() << '\n';
  io.out.flush();

  // Signals are taken synchronously by a waiter thread; the serving loop
  // only ever sees a stop().
  sigset_t set, previous;
  sigemptyset(&set);
  sigaddset(&set, SIGINT);
  sigaddset(&set, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &set, &previous);
  std::thread waiter([&] {
    int sig = 0;
    sigwait(&set, &sig);
    server.stop();
  });
  server.run();
  waiter.join();
  pthread_sigmask(SIG_SETMASK, &previous, nullptr);
  io.out << "stopped\n";
  return kExitOk;
}

// ---------------------------------------------------------------- attach

struct AttachArgs {
  std::string host = kDefaultBind;
  std::uint16_t port = kDefaultPort;
};

class RawTerminal {
public:
  explicit RawTerminal(int fd) : fd_(fd) {
    if (::isatty(fd) != 1 || ::tcgetattr(fd, &saved_) != 0) return;
    termios raw = saved_;
    raw.c_lflag &= ~static_cast<tcflag_t>(ICANON | ECHO | ISIG);
    raw.c_cc[VMIN] = 1;
    raw.c_cc[VTIME] = 0;
    active_ = ::tcsetattr(fd, TCSANOW, &raw) == 0;
  }
  ~RawTerminal() {
    if (active_) ::tcsetattr(fd_, TCSANOW, &saved_);
  }
  RawTerminal(const RawTerminal&) = delete;
  RawTerminal& operator=(const RawTerminal&) = delete;

private:
  int fd_;
  termios saved_{};
  bool active_ = false;
};

int attach(const AttachArgs& args, Io io) {
  WebSocketClient client;
  client.connect(args.host, args.port);
  RawTerminal terminal(io.in_fd);
  Renderer renderer(io.out, io.err, {is_tty(io.out, STDOUT_FILENO), true});
  Mirror mirror;
  int next_id = 1;
  auto send = [&](CommandBody body) { client.send(encode(Command{"k" + std::to_string(next_id++), body})); };
  bool input_open = io.in_fd >= 0;

  while (true) {
    while (auto frame = client.receive(input_open ? 0.0 : 0.05)) {
      try {
        const ServerMessage m = decode_server_message(*frame);
        mirror.apply(m);
        renderer.render(m);
      } catch (const Error& e) {
        io.err << "bad frame from server: " << e.what() << '\n';
      }
    }
    if (client.closed()) {
      io.err << "connection closed\n";
      return kExitRuntime;
    }
    if (!input_open) continue;
    pollfd pfd{io.in_fd, POLLIN, 0};
    if (::poll(&pfd, 1, 50) <= 0) continue;
    char key = 0;
    const auto n = ::read(io.in_fd, &key, 1);
    if (n <= 0) {
      input_open = false;
      continue;
    }
    switch (key) {
      case ' ': {
        const TimerPhase phase = mirror.snapshot() ? mirror.snapshot()->timer.phase : TimerPhase::Idle;
        if (phase == TimerPhase::Running) {
          send(cmd::Pause{});
        } else if (phase == TimerPhase::Paused) {
          send(cmd::Resume{});
        } else {
          send(cmd::Start{});
        }
        break;
      }
      case 's':
        send(cmd::Stop{});
        break;
      case 'q':
      case 3:  // Ctrl-C with signals disabled in raw mode
        client.close();
        return kExitOk;
      default:
        break;
    }
  }
}

// ---------------------------------------------------------------- presets

const Preset& resolve_preset(const PresetRepository& repo, const std::string& ref) {
  if (const Preset* p = repo.store().find(ref)) return *p;
  if (const Preset* p = repo.store().find_by_name(ref)) return *p;
  throw Error(ErrorCode::NotFound, "no preset with id or name \"" + ref + "\"");
}

std::string preset_line(const Preset& p) {
  std::string offsets;
  for (const auto& a : p.config.alerts) {
    if (!offsets.empty()) offsets += ',';
    offsets += format_mmss(a.offset_before_end_s);
  }
  return p.id + "  " + format_mmss(p.config.duration_s) + "  [" + offsets + "]  " + p.name;
}

// ---------------------------------------------------------------- hapticsim

struct HapticArgs {
  PlanArgs plan;
  double min_spacing = kDefaultMinSpacingS;
  std::string jitter = "none";
  std::uint64_t seed = 0;
  bool json = false;
  std::string csv;
};

std::string shortest(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

int hapticsim(const HapticArgs& args, Io io) {
  const auto plan = checked_plan(args.plan, io);
  if (!plan) return kExitUser;
  const JitterModel jitter = parse_jitter(args.jitter, args.seed);
  const NotificationSchedule schedule = compile_schedule(*plan, args.min_spacing);
  const SimulationResult result = simulate(schedule, jitter);
  const FidelityReport& r = result.report;

  if (args.json) {
    json::Json doc{{"jitter", jitter.describe()},
                   {"seed", args.seed},
                   {"min_spacing_s", schedule.min_spacing_s},
                   {"notifications", schedule.entries.size()},
                   {"max_abs_deviation_s", r.max_abs_deviation_s},
                   {"mean_abs_deviation_s", r.mean_abs_deviation_s},
                   {"order_violations", r.order_violations},
                   {"coalesced_count", r.coalesced_count}};
    io.out << doc.dump(2) << '\n';
  } else {
    io.out << "jitter               " << jitter.describe() << " (seed " << args.seed << ")\n"
           << "notifications        " << schedule.entries.size() << '\n'
           << "max_abs_deviation_s  " << shortest(r.max_abs_deviation_s) << '\n'
           << "mean_abs_deviation_s " << shortest(r.mean_abs_deviation_s) << '\n'
           << "order_violations     " << r.order_violations << '\n'
           << "coalesced_count      " << r.coalesced_count << '\n';
  }
  if (!args.csv.empty()) {
    std::ofstream csv(args.csv, std::ios::binary | std::ios::trunc);
    if (!csv) throw Error(ErrorCode::StorageFailure, "cannot write " + args.csv);
    csv << "intended_s,delivered_s\n";
    for (std::size_t i = 0; i < result.intended.size(); ++i) {
      csv << shortest(result.intended[i]) << ',' << shortest(result.delivered[i]) << '\n';
    }
    if (!csv.flush()) throw Error(ErrorCode::StorageFailure, "cannot write " + args.csv);
  }
  return kExitOk;
}

}  // namespace

int main(const std::vector<std::string>& args, Io io) {
  CLI::App app{"Presentation timer with multi-interval reminders", "pacer"};
  app.require_subcommand(1);

  RunArgs run_args;
  auto* run = app.add_subcommand("run", "Run a timer in this terminal");
  add_plan_options(*run, run_args.plan);
  run->add_flag("--no-visual", run_args.no_visual, "Disable banners");
  run->add_flag("--no-auditory", run_args.no_auditory, "Disable the terminal bell");
  run->add_flag("--no-speech", run_args.no_speech, "Disable speech");
  run->add_flag("--no-haptic", run_args.no_haptic, "Disable haptic markers");
  run->add_option("--display", run_args.display, "countdown or countup")->capture_default_str();
  run->add_option("--tick-rate", run_args.tick_rate, "Status lines per second")->capture_default_str();
  run->add_flag("--faketime", run_args.faketime, "Simulated clock: run the whole session instantly");
  run->add_flag("--json", run_args.json, "Print protocol events as JSON lines");
  run->add_option("--speech-cmd", run_args.speech_cmd, "Command run with each utterance as its last argument");

  ServeArgs serve_args;
  auto* serve_cmd = app.add_subcommand("serve", "Host a session for WebSocket clients");
  serve_cmd->add_option("--bind", serve_args.bind, "Listen address")->envname("PACER_BIND")->capture_default_str();
  serve_cmd->add_option("--port", serve_args.port, "Listen port, 0 picks one")
      ->envname("PACER_PORT")
      ->capture_default_str();
  serve_cmd->add_option("--presets-path", serve_args.presets_path, "Preset file")->envname("PACER_PRESETS");
  serve_cmd->add_option("--tick-rate", serve_args.tick_rate, "Tick events per second")
      ->envname("PACER_TICK_RATE")
      ->capture_default_str();

  AttachArgs attach_args;
  auto* attach_cmd = app.add_subcommand("attach", "Follow and control a running session");
  attach_cmd->add_option("--host", attach_args.host)->envname("PACER_BIND")->capture_default_str();
  attach_cmd->add_option("--port", attach_args.port)->envname("PACER_PORT")->capture_default_str();

  std::string presets_path;
  auto* preset = app.add_subcommand("preset", "Manage saved presets");
  preset->require_subcommand(1);
  preset->add_option("--presets-path", presets_path, "Preset file")->envname("PACER_PRESETS");
  bool list_json = false;
  auto* preset_list = preset->add_subcommand("list", "List presets");
  preset_list->add_flag("--json", list_json);
  PlanArgs save_plan;
  std::string save_name;
  auto* preset_save = preset->add_subcommand("save", "Save a preset");
  preset_save->add_option("name", save_name)->required();
  add_plan_options(*preset_save, save_plan);
  std::string ref, new_name;
  auto* preset_delete = preset->add_subcommand("delete", "Delete a preset by id or name");
  preset_delete->add_option("preset", ref)->required();
  auto* preset_rename = preset->add_subcommand("rename", "Rename a preset");
  preset_rename->add_option("preset", ref)->required();
  preset_rename->add_option("new-name", new_name)->required();

  HapticArgs haptic_args;
  auto* haptic = app.add_subcommand("hapticsim", "Simulate notification-scheduled haptics");
  add_plan_options(*haptic, haptic_args.plan);
  haptic->add_option("--min-spacing", haptic_args.min_spacing, "Minimum seconds between notifications")
      ->capture_default_str();
  haptic->add_option("--jitter", haptic_args.jitter, "none, uniform:D or gaussian:M,S")->capture_default_str();
  haptic->add_option("--seed", haptic_args.seed)->capture_default_str();
  haptic->add_flag("--json", haptic_args.json);
  haptic->add_option("--csv", haptic_args.csv, "Write intended,delivered pairs to this file");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  if (!reversed.empty()) reversed.pop_back();  // program name
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, io.out, io.err);
    return code == 0 ? kExitOk : kExitUser;
  }

  try {
    if (*run) return run_timer(run_args, io);
    if (*serve_cmd) return serve(serve_args, io);
    if (*attach_cmd) return attach(attach_args, io);
    if (*haptic) return hapticsim(haptic_args, io);
    if (*preset) {
      PresetRepository repo(presets_path_or_default(presets_path));
      report_load_issues(repo, io);
      if (*preset_list) {
        const auto presets = repo.list();
        if (list_json) {
          json::Json doc = json::Json::array();
          for (const auto& p : presets) doc.push_back(to_json(p));
          io.out << doc.dump(2) << '\n';
        } else if (presets.empty()) {
          io.out << "no presets\n";
        } else {
          for (const auto& p : presets) io.out << preset_line(p) << '\n';
        }
      } else if (*preset_save) {
        const auto plan = checked_plan(save_plan, io);
        if (!plan) return kExitUser;
        io.out << "saved " << preset_line(repo.save(save_name, *plan)) << '\n';
      } else if (*preset_delete) {
        const Preset victim = resolve_preset(repo, ref);
        repo.remove(victim.id);
        io.out << "deleted " << preset_line(victim) << '\n';
      } else if (*preset_rename) {
        const std::string id = resolve_preset(repo, ref).id;
        io.out << "renamed " << preset_line(repo.rename(id, new_name)) << '\n';
      }
      return kExitOk;
    }
  } catch (const Error& e) {
    io.err << "error: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    io.err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitUser;
}

int main(int argc, const char* const* argv, Io io) {
  return main(std::vector<std::string>(argv, argv + argc), io);
}

}  // namespace pacer::cli
