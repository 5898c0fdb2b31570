#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>

#include "pacer/session.hpp"

namespace pacer {

inline constexpr std::uint16_t kDefaultPort = 7365;
inline constexpr const char* kDefaultBind = "127.0.0.1";

/// WebSocket front end for a SessionEngine: text frames, one JSON object
/// per frame. The engine is only touched from the thread inside run().
class WebSocketServer {
public:
  /// Binds immediately; throws Error(BindError). Port 0 picks a free port.
  WebSocketServer(SessionEngine& engine, const Clock& clock, const std::string& bind_address,
                  std::uint16_t port);
  ~WebSocketServer();

  WebSocketServer(const WebSocketServer&) = delete;
  WebSocketServer& operator=(const WebSocketServer&) = delete;

  std::uint16_t port() const;
  /// Serves until stop() is called.
  void run();
  /// Safe from any thread.
  void stop();
  /// Runs `task` on the serving thread.
  void post(std::function<void()> task);

private:
  struct Impl;
  std::shared_ptr<Impl> impl_;
};

/// Minimal client used by `attach` and the tests. Frames are received on a
/// background thread and queued.
class WebSocketClient {
public:
  WebSocketClient();
  ~WebSocketClient();

  WebSocketClient(const WebSocketClient&) = delete;
  WebSocketClient& operator=(const WebSocketClient&) = delete;

  /// Throws Error(ConnectError).
  void connect(const std::string& host, std::uint16_t port);
  /// Safe from any thread; ignored once closed.
  void send(std::string frame);
  /// Next received frame, or empty on timeout or when the connection is
  /// closed and no frames remain.
  std::optional<std::string> receive(double timeout_s);
  bool closed() const;
  void close();

private:
  struct Impl;
  std::shared_ptr<Impl> impl_;
};

}  // namespace pacer
