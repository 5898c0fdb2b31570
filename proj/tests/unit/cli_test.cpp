#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <thread>

#include "doctest.h"
#include "pacer/cli.hpp"
#include "pacer/websocket.hpp"
#include "support/temp_dir.hpp"

using namespace pacer;

namespace {

struct Outcome {
  int code = -1;
  std::string out, err;
};

Outcome invoke(std::vector<std::string> args, int in_fd = -1) {
  args.insert(args.begin(), "pacer");
  std::ostringstream out, err;
  Outcome o;
  o.code = cli::main(args, {out, err, in_fd});
  o.out = out.str();
  o.err = err.str();
  return o;
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

std::vector<std::string> matching(const std::string& text, std::string_view prefix) {
  std::vector<std::string> out;
  for (auto& l : lines(text)) {
    if (l.rfind(prefix, 0) == 0) out.push_back(l);
  }
  return out;
}

}  // namespace

TEST_CASE("time arguments accept MM:SS and seconds") {
  CHECK(cli::parse_time("3:00") == 180);
  CHECK(cli::parse_time("0:05") == 5);
  CHECK(cli::parse_time("90") == 90);
  CHECK(cli::parse_time("120:00") == 7200);
  CHECK(cli::parse_time(" 1:30 ") == 90);
  for (const char* bad : {"", "1:5", "1:60", "-5", "a", "1:30:00", "1.5", ":30"}) {
    CHECK_THROWS_AS(cli::parse_time(bad), Error);
  }
  CHECK(cli::parse_time_list("1:30,0:30, 0:10") == std::vector<int>{90, 30, 10});
}

TEST_CASE("jitter arguments") {
  CHECK(cli::parse_jitter("none", 1).kind == JitterKind::None);
  const auto u = cli::parse_jitter("uniform:1.5", 9);
  CHECK(u.kind == JitterKind::UniformDelay);
  CHECK(u.max_s == 1.5);
  CHECK(u.seed == 9);
  const auto g = cli::parse_jitter("gaussian:0.2,0.05", 1);
  CHECK(g.mean_s == 0.2);
  CHECK(g.std_s == 0.05);
  for (const char* bad : {"uniform", "uniform:-1", "gaussian:1", "poisson:2", "uniform:x"}) {
    CHECK_THROWS_AS(cli::parse_jitter(bad, 0), Error);
  }
}

TEST_CASE("plan flags build the same plan as the scheduler") {
  CHECK(cli::build_plan({"3:00", "", 3, ""}) == default_plan(180, 3));
  CHECK(cli::build_plan({"3:00", "1:30,0:30,0:10", 3, ""}) == default_plan(180, 3));
  const auto p = cli::build_plan({"10:00", "5:00", 3, "prominent"});
  CHECK(p.alerts.size() == 1);
  CHECK(p.alerts[0].haptic_intensity == HapticIntensity::Prominent);
  CHECK_THROWS_AS(cli::build_plan({"3:00", "1:30,0:30", 3, "normal,normal,normal"}), Error);
}

TEST_CASE("run reproduces the default session under simulated time") {
  const auto r = invoke({"run", "--faketime", "--duration", "3:00", "--alerts", "1:30,0:30,0:10"});
  CHECK(r.code == 0);
  const std::vector<std::string> alerts{"alert 1 at 01:30 (90 s before end)", "alert 2 at 02:30 (30 s before end)",
                                        "alert 3 at 02:50 (10 s before end)"};
  CHECK(matching(r.out, "alert ") == alerts);
  CHECK(matching(r.out, "time is up") == std::vector<std::string>{"time is up at 03:00"});
  CHECK(matching(r.out, "[SPEECH] ").back() == "[SPEECH] Time is up");
  CHECK(lines(r.out).back() == "state finished");
  CHECK(matching(r.out, "[HAPTIC]").size() == 4);
  CHECK(matching(r.out, "02:59 remaining").size() == 1);
}

TEST_CASE("run validation errors print the report and exit 1") {
  auto r = invoke({"run", "--faketime", "--duration", "3:00", "--alerts", "0:33"});
  CHECK(r.code == 1);
  CHECK(r.err == "OffGrid (alert 1): offset 33 s is not a multiple of 5 s\n");
  r = invoke({"run", "--faketime", "--duration", "3:00", "--alerts", "4:00"});
  CHECK(r.code == 1);
  CHECK(r.err.rfind("OutOfRange (alert 1)", 0) == 0);
  r = invoke({"run", "--faketime", "--duration", "3:00", "--alerts", "0:10,0:30"});
  CHECK(r.code == 1);
  CHECK(r.err.rfind("NotDecreasing", 0) == 0);
  r = invoke({"run", "--faketime", "--duration", "3:00", "--alerts", "soon"});
  CHECK(r.code == 1);
  CHECK(invoke({"run", "--bogus"}).code == 1);
  CHECK(invoke({}).code == 1);
}

TEST_CASE("run honours modality flags and count-up display") {
  const auto r = invoke({"run", "--faketime", "--no-auditory", "--no-speech", "--no-haptic", "--display", "countup",
                      "--duration", "0:20", "--count", "1"});
  CHECK(r.code == 0);
  CHECK(r.out.find("[BELL]") == std::string::npos);
  CHECK(r.out.find("[SPEECH]") == std::string::npos);
  CHECK(r.out.find("[HAPTIC]") == std::string::npos);
  CHECK(r.out.find(">>> TIME IS UP <<<") != std::string::npos);
  CHECK(matching(r.out, "00:01 elapsed").size() == 1);
  CHECK(matching(r.out, "00:20 elapsed").size() == 1);
}

TEST_CASE("run --json emits protocol frames") {
  const auto r = invoke({"run", "--faketime", "--json", "--duration", "0:30", "--count", "1"});
  CHECK(r.code == 0);
  std::vector<double> fired;
  for (const auto& l : lines(r.out)) {
    const auto m = protocol::decode_server_message(l);
    if (const auto* a = std::get_if<protocol::evt::AlertFired>(&m)) fired.push_back(a->session_time_s);
  }
  CHECK(fired == std::vector<double>{25, 30});
}

TEST_CASE("speech command receives the utterance") {
  testing::TempDir dir;
  const auto log = dir / "spoken.txt";
  const auto script = dir / "say.sh";
  {
    std::ofstream s(script);
    s << "#!/bin/sh\nprintf '%s\\n' \"$1\" >> '" << log.string() << "'\n";
  }
  std::filesystem::permissions(script, std::filesystem::perms::owner_all);
  const auto r = invoke({"run", "--faketime", "--duration", "0:20", "--count", "1", "--speech-cmd", script.string()});
  CHECK(r.code == 0);
  CHECK(r.out.find("[SPEECH]") == std::string::npos);
  std::ifstream in(log);
  std::stringstream text;
  text << in.rdbuf();
  CHECK(text.str() == "5 seconds remaining\nTime is up\n");
}

TEST_CASE("preset subcommands manage the store") {
  testing::TempDir dir;
  const std::string path = (dir / "presets.json").string();
  auto r = invoke({"preset", "--presets-path", path, "list"});
  CHECK(r.code == 0);
  CHECK(r.out == "no presets\n");
  r = invoke({"preset", "--presets-path", path, "save", "Keynote", "--duration", "10:00"});
  CHECK(r.code == 0);
  CHECK(r.out.find("10:00  [05:00,01:40,00:35]  Keynote") != std::string::npos);
  r = invoke({"preset", "--presets-path", path, "save", "keynote", "--duration", "5:00"});
  CHECK(r.code == 1);
  CHECK(r.err.find("error: ") == 0);
  r = invoke({"preset", "--presets-path", path, "save", "Bad", "--alerts", "0:33"});
  CHECK(r.code == 1);
  CHECK(r.err.rfind("OffGrid", 0) == 0);
  r = invoke({"preset", "--presets-path", path, "rename", "Keynote", "Lightning"});
  CHECK(r.code == 0);
  r = invoke({"preset", "--presets-path", path, "list", "--json"});
  const auto doc = json::Json::parse(r.out);
  REQUIRE(doc.size() == 1);
  CHECK(doc[0]["name"] == "Lightning");
  r = invoke({"preset", "--presets-path", path, "delete", doc[0]["id"].get<std::string>()});
  CHECK(r.code == 0);
  CHECK(invoke({"preset", "--presets-path", path, "delete", "Lightning"}).code == 1);
  CHECK(invoke({"preset", "--presets-path", path, "list"}).out == "no presets\n");
}

TEST_CASE("hapticsim reports") {
  auto r = invoke({"hapticsim", "--json"});
  CHECK(r.code == 0);
  auto doc = json::Json::parse(r.out);
  CHECK(doc["max_abs_deviation_s"] == 0.0);
  CHECK(doc["order_violations"] == 0);

  r = invoke({"hapticsim", "--duration", "3:00", "--alerts", "0:10", "--haptic", "prominent", "--min-spacing", "0.5",
           "--json"});
  CHECK(json::Json::parse(r.out)["coalesced_count"] == 2);

  const auto a = invoke({"hapticsim", "--jitter", "uniform:1.0", "--seed", "42", "--json"});
  const auto b = invoke({"hapticsim", "--jitter", "uniform:1.0", "--seed", "42", "--json"});
  CHECK(a.code == 0);
  CHECK(a.out == b.out);
  CHECK(json::Json::parse(a.out)["max_abs_deviation_s"].get<double>() <= 1.0);

  CHECK(invoke({"hapticsim", "--jitter", "sometimes"}).code == 1);
  CHECK(invoke({"hapticsim", "--min-spacing", "0"}).code == 1);
  CHECK(invoke({"hapticsim", "--alerts", "0:33"}).code == 1);
}

TEST_CASE("hapticsim writes intended and delivered pairs") {
  testing::TempDir dir;
  const auto csv = dir / "pairs.csv";
  const auto r = invoke({"hapticsim", "--min-spacing", "0.1", "--csv", csv.string()});
  CHECK(r.code == 0);
  std::ifstream in(csv);
  std::stringstream text;
  text << in.rdbuf();
  CHECK(text.str() == "intended_s,delivered_s\n90,90\n150,150\n170,170\n170.3,170.3\n170.6,170.6\n");
}

TEST_CASE("attach renders the session and sends keys as commands") {
  SteadyClock clock;
  PresetRepository presets("");
  SessionEngine engine(clock, presets);
  WebSocketServer server(engine, clock, "127.0.0.1", 0);
  std::thread serving([&] { server.run(); });

  WebSocketClient observer;
  observer.connect("127.0.0.1", server.port());
  REQUIRE(observer.receive(5.0));
  observer.send(protocol::encode(protocol::Command{"o1", protocol::cmd::Start{}}));

  int keys[2];
  REQUIRE(::pipe(keys) == 0);
  Outcome attached;
  std::thread client([&] { attached = invoke({"attach", "--port", std::to_string(server.port())}, keys[0]); });

  auto wait_for_phase = [&](TimerPhase phase) {
    for (int i = 0; i < 100; ++i) {
      const auto frame = observer.receive(5.0);
      if (!frame) return false;
      const auto m = protocol::decode_server_message(*frame);
      if (const auto* s = std::get_if<protocol::evt::StateChanged>(&m); s && s->phase == phase) return true;
    }
    return false;
  };
  CHECK(wait_for_phase(TimerPhase::Running));
  std::this_thread::sleep_for(std::chrono::milliseconds(300));
  REQUIRE(::write(keys[1], " ", 1) == 1);
  CHECK(wait_for_phase(TimerPhase::Paused));
  std::this_thread::sleep_for(std::chrono::milliseconds(300));
  REQUIRE(::write(keys[1], "q", 1) == 1);
  client.join();
  ::close(keys[0]);
  ::close(keys[1]);
  server.stop();
  serving.join();

  CHECK(attached.code == 0);
  const auto out = lines(attached.out);
  REQUIRE_FALSE(out.empty());
  CHECK(out.front().rfind("welcome c2: running", 0) == 0);
  CHECK(matching(attached.out, "state paused").size() == 1);
}

TEST_CASE("attach without a server is a runtime error") {
  std::uint16_t port = 0;
  {
    SteadyClock clock;
    PresetRepository presets("");
    SessionEngine engine(clock, presets);
    WebSocketServer server(engine, clock, "127.0.0.1", 0);
    port = server.port();
  }
  const auto r = invoke({"attach", "--port", std::to_string(port)});
  CHECK(r.code == 2);
  CHECK(r.err.find("cannot connect") != std::string::npos);
}

#ifdef PACER_BINARY
TEST_CASE("the installed binary runs a simulated session") {
  FILE* pipe = ::popen(PACER_BINARY " run --faketime --duration 0:15 --count 1 2>&1", "r");
  REQUIRE(pipe);
  std::string output;
  char buf[256];
  while (const auto n = std::fread(buf, 1, sizeof buf, pipe)) output.append(buf, n);
  const int status = ::pclose(pipe);
  CHECK(WIFEXITED(status));
  CHECK(WEXITSTATUS(status) == 0);
  CHECK(output.find("time is up at 00:15") != std::string::npos);

  pipe = ::popen(PACER_BINARY " run --faketime --alerts 0:33 2>&1", "r");
  REQUIRE(pipe);
  output.clear();
  while (const auto n = std::fread(buf, 1, sizeof buf, pipe)) output.append(buf, n);
  CHECK(WEXITSTATUS(::pclose(pipe)) == 1);
  CHECK(output == "OffGrid (alert 1): offset 33 s is not a multiple of 5 s\n");
}
#endif
