#include <thread>

#include "doctest.h"
#include "pacer/websocket.hpp"

using namespace pacer;
using namespace pacer::protocol;

namespace {

struct LiveServer {
  LiveServer() : engine(clock, presets), server(engine, clock, "127.0.0.1", 0), thread([this] { server.run(); }) {}
  ~LiveServer() {
    server.stop();
    thread.join();
  }

  SteadyClock clock;
  PresetRepository presets{""};
  SessionEngine engine;
  WebSocketServer server;
  std::thread thread;
};

ServerMessage next(WebSocketClient& client) {
  const auto frame = client.receive(5.0);
  REQUIRE(frame);
  return decode_server_message(*frame);
}

// Skips ticks until a message of type T arrives.
template <class T>
T next_of(WebSocketClient& client) {
  for (int i = 0; i < 50; ++i) {
    const auto m = next(client);
    if (const auto* x = std::get_if<T>(&m)) return *x;
  }
  FAIL("message never arrived");
  return {};
}

}  // namespace

TEST_CASE("clients connected over websockets see the same state") {
  LiveServer live;
  CHECK(live.server.port() != 0);
  WebSocketClient a, b;
  a.connect("127.0.0.1", live.server.port());
  b.connect("127.0.0.1", live.server.port());
  const auto wa = std::get<evt::Welcome>(next(a));
  const auto wb = std::get<evt::Welcome>(next(b));
  CHECK(wa.client_id != wb.client_id);
  CHECK(wa.snapshot.timer.phase == TimerPhase::Idle);

  a.send(encode(Command{"s1", cmd::Start{}}));
  CHECK(next_of<evt::StateChanged>(a).phase == TimerPhase::Running);
  CHECK(next_of<evt::StateChanged>(b).phase == TimerPhase::Running);
  CHECK(next_of<evt::Ack>(a).in_reply_to == "s1");

  b.send(encode(Command{"p1", cmd::Pause{}}));
  const auto pa = next_of<evt::StateChanged>(a);
  const auto pb = next_of<evt::StateChanged>(b);
  CHECK(pa == pb);
  CHECK(pa.phase == TimerPhase::Paused);
  const auto sa = next_of<evt::Snapshot>(a);
  const auto sb = next_of<evt::Snapshot>(b);
  CHECK(encode(ServerMessage{sa}) == encode(ServerMessage{sb}));
}

TEST_CASE("a malformed frame gets an error and the connection closes") {
  LiveServer live;
  WebSocketClient c;
  c.connect("127.0.0.1", live.server.port());
  next(c);
  c.send("{oops");
  const auto e = std::get<evt::Error>(next(c));
  CHECK(e.code == ErrorCode::ProtocolError);
  CHECK_FALSE(c.receive(5.0).has_value());
  CHECK(c.closed());
}

TEST_CASE("connecting to a closed port fails cleanly") {
  std::uint16_t port = 0;
  {
    LiveServer live;
    port = live.server.port();
  }
  WebSocketClient c;
  try {
    c.connect("127.0.0.1", port);
    FAIL("expected ConnectError");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ConnectError);
  }
}

TEST_CASE("binding an address in use is a bind error") {
  LiveServer live;
  ManualClock clock;
  PresetRepository presets("");
  SessionEngine engine(clock, presets);
  try {
    WebSocketServer second(engine, clock, "127.0.0.1", live.server.port());
    FAIL("expected BindError");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::BindError);
  }
}
