#include "pacer/websocket.hpp"

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/websocket.hpp>

#include <chrono>
#include <condition_variable>
#include <deque>
#include <map>
#include <mutex>
#include <thread>

#include "pacer/error.hpp"

namespace pacer {

namespace beast = boost::beast;
namespace websocket = beast::websocket;
namespace net = boost::asio;
using tcp = net::ip::tcp;

struct WebSocketServer::Impl : std::enable_shared_from_this<WebSocketServer::Impl> {
  struct Connection;

  Impl(SessionEngine& e, const Clock& c) : engine(e), clock(c), acceptor(ioc), timer(ioc) {}

  void accept();
  void reschedule();
  void flush(const ClientId& id);

  SessionEngine& engine;
  const Clock& clock;
  net::io_context ioc;
  tcp::acceptor acceptor;
  net::steady_timer timer;
  std::map<ClientId, std::weak_ptr<Connection>> connections;
};

struct WebSocketServer::Impl::Connection : std::enable_shared_from_this<Connection> {
  Connection(Impl& server, tcp::socket socket) : server(server), ws(std::move(socket)) {}

  void start() {
    ws.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
    ws.async_accept([self = shared_from_this()](beast::error_code ec) { self->on_accept(ec); });
  }

  void on_accept(beast::error_code ec) {
    if (ec) return;
    ws.text(true);
    id = server.engine.connect();
    server.connections[id] = weak_from_this();
    read();
    flush();
    server.reschedule();
  }

  void read() {
    ws.async_read(buffer, [self = shared_from_this()](beast::error_code ec, std::size_t) {
      self->on_read(ec);
    });
  }

  void on_read(beast::error_code ec) {
    if (ec) {
      finish();
      return;
    }
    const std::string frame = beast::buffers_to_string(buffer.data());
    buffer.consume(buffer.size());
    server.engine.receive(id, frame);
    server.reschedule();
    // A closing connection stops reading; the write or close started here
    // keeps it alive until the reply is out.
    flush();
    if (!server.engine.closing(id)) read();
  }

  void flush() {
    if (writing || done) return;
    for (auto& message : server.engine.take_outbox(id)) pending.push_back(protocol::encode(message));
    if (pending.empty()) {
      if (server.engine.closing(id)) {
        writing = true;
        ws.async_close(websocket::close_code::policy_error,
                       [self = shared_from_this()](beast::error_code) { self->finish(); });
      }
      return;
    }
    writing = true;
    ws.async_write(net::buffer(pending.front()),
                   [self = shared_from_this()](beast::error_code ec, std::size_t) {
                     self->writing = false;
                     if (ec) {
                       self->finish();
                       return;
                     }
                     self->pending.pop_front();
                     self->flush();
                   });
  }

  void finish() {
    if (done) return;
    done = true;
    if (!id.empty()) {
      server.engine.disconnect(id);
      server.connections.erase(id);
    }
    beast::error_code ignored;
    beast::get_lowest_layer(ws).socket().close(ignored);
  }

  Impl& server;
  websocket::stream<beast::tcp_stream> ws;
  beast::flat_buffer buffer;
  std::deque<std::string> pending;
  ClientId id;
  bool writing = false;
  bool done = false;
};

void WebSocketServer::Impl::accept() {
  acceptor.async_accept([self = shared_from_this()](beast::error_code ec, tcp::socket socket) {
    if (ec) return;  // acceptor closed
    std::make_shared<Connection>(*self, std::move(socket))->start();
    self->accept();
  });
}

void WebSocketServer::Impl::reschedule() {
  const auto wake = engine.next_wake();
  if (!wake) {
    timer.cancel();
    return;
  }
  const double delay = std::max(0.0, *wake - clock.now());
  timer.expires_after(std::chrono::duration_cast<std::chrono::nanoseconds>(std::chrono::duration<double>(delay)));
  timer.async_wait([self = shared_from_this()](beast::error_code ec) {
    if (ec) return;
    self->engine.poll();
    self->reschedule();
  });
}

void WebSocketServer::Impl::flush(const ClientId& id) {
  auto it = connections.find(id);
  if (it == connections.end()) return;
  if (auto conn = it->second.lock()) conn->flush();
}

WebSocketServer::WebSocketServer(SessionEngine& engine, const Clock& clock, const std::string& bind_address,
                                 std::uint16_t port)
    : impl_(std::make_shared<Impl>(engine, clock)) {
  beast::error_code ec;
  const auto address = net::ip::make_address(bind_address, ec);
  if (ec) throw Error(ErrorCode::BindError, "invalid bind address \"" + bind_address + "\"");
  const tcp::endpoint endpoint{address, port};
  auto& acceptor = impl_->acceptor;
  acceptor.open(endpoint.protocol(), ec);
  if (!ec) acceptor.set_option(net::socket_base::reuse_address(true), ec);
  if (!ec) acceptor.bind(endpoint, ec);
  if (!ec) acceptor.listen(net::socket_base::max_listen_connections, ec);
  if (ec) {
    throw Error(ErrorCode::BindError,
                "cannot listen on " + bind_address + ":" + std::to_string(port) + ": " + ec.message());
  }

  std::weak_ptr<Impl> weak = impl_;
  engine.set_outbound_listener([weak](const ClientId& id) {
    if (auto impl = weak.lock()) {
      net::post(impl->ioc, [weak, id] {
        if (auto impl = weak.lock()) impl->flush(id);
      });
    }
  });
}

WebSocketServer::~WebSocketServer() {
  impl_->engine.set_outbound_listener({});
  beast::error_code ignored;
  impl_->acceptor.close(ignored);
  impl_->timer.cancel();
  const auto connections = impl_->connections;
  for (auto& [id, weak] : connections) {
    if (auto conn = weak.lock()) beast::get_lowest_layer(conn->ws).socket().close(ignored);
  }
  // Drain the aborted handlers so they release their references to Impl.
  impl_->ioc.restart();
  impl_->ioc.poll();
}

std::uint16_t WebSocketServer::port() const { return impl_->acceptor.local_endpoint().port(); }

void WebSocketServer::run() {
  impl_->accept();
  impl_->reschedule();
  impl_->ioc.run();
}

void WebSocketServer::stop() { impl_->ioc.stop(); }

void WebSocketServer::post(std::function<void()> task) { net::post(impl_->ioc, std::move(task)); }

struct WebSocketClient::Impl : std::enable_shared_from_this<WebSocketClient::Impl> {
  Impl() : ws(ioc) {}

  void read() {
    ws.async_read(buffer, [self = shared_from_this()](beast::error_code ec, std::size_t) {
      if (ec) {
        self->mark_closed();
        return;
      }
      {
        std::lock_guard lock(self->mutex);
        self->inbox.push_back(beast::buffers_to_string(self->buffer.data()));
      }
      self->buffer.consume(self->buffer.size());
      self->cv.notify_all();
      self->read();
    });
  }

  void write_next() {
    if (writing || outbox.empty() || is_closed()) return;
    writing = true;
    ws.async_write(net::buffer(outbox.front()), [self = shared_from_this()](beast::error_code ec, std::size_t) {
      self->writing = false;
      if (ec) {
        self->mark_closed();
        return;
      }
      self->outbox.pop_front();
      self->write_next();
    });
  }

  void mark_closed() {
    {
      std::lock_guard lock(mutex);
      closed = true;
    }
    cv.notify_all();
  }

  bool is_closed() {
    std::lock_guard lock(mutex);
    return closed;
  }

  net::io_context ioc;
  websocket::stream<beast::tcp_stream> ws;
  beast::flat_buffer buffer;
  std::deque<std::string> outbox;  // io thread only
  bool writing = false;
  std::mutex mutex;
  std::condition_variable cv;
  std::deque<std::string> inbox;
  bool closed = false;
  std::thread thread;
};

WebSocketClient::WebSocketClient() : impl_(std::make_shared<Impl>()) {}

WebSocketClient::~WebSocketClient() {
  close();
  if (impl_->thread.joinable()) impl_->thread.join();
}

void WebSocketClient::connect(const std::string& host, std::uint16_t port) {
  try {
    tcp::resolver resolver(impl_->ioc);
    const auto results = resolver.resolve(host, std::to_string(port));
    beast::get_lowest_layer(impl_->ws).expires_after(std::chrono::seconds(5));
    beast::get_lowest_layer(impl_->ws).connect(results);
    beast::get_lowest_layer(impl_->ws).expires_never();
    impl_->ws.handshake(host + ":" + std::to_string(port), "/");
    impl_->ws.text(true);
  } catch (const std::exception& e) {
    throw Error(ErrorCode::ConnectError,
                "cannot connect to " + host + ":" + std::to_string(port) + ": " + e.what());
  }
  impl_->read();
  impl_->thread = std::thread([impl = impl_] {
    impl->ioc.run();
    impl->mark_closed();
  });
}

void WebSocketClient::send(std::string frame) {
  net::post(impl_->ioc, [impl = impl_, frame = std::move(frame)]() mutable {
    impl->outbox.push_back(std::move(frame));
    impl->write_next();
  });
}

std::optional<std::string> WebSocketClient::receive(double timeout_s) {
  std::unique_lock lock(impl_->mutex);
  impl_->cv.wait_for(lock, std::chrono::duration<double>(timeout_s),
                     [&] { return !impl_->inbox.empty() || impl_->closed; });
  if (impl_->inbox.empty()) return std::nullopt;
  std::string frame = std::move(impl_->inbox.front());
  impl_->inbox.pop_front();
  return frame;
}

bool WebSocketClient::closed() const {
  std::lock_guard lock(impl_->mutex);
  return impl_->closed && impl_->inbox.empty();
}

void WebSocketClient::close() {
  if (!impl_->thread.joinable()) return;
  net::post(impl_->ioc, [impl = impl_] {
    if (impl->is_closed()) {
      impl->ioc.stop();
      return;
    }
    // Give the peer a moment to answer the close handshake.
    auto deadline = std::make_shared<net::steady_timer>(impl->ioc, std::chrono::seconds(1));
    deadline->async_wait([impl, deadline](beast::error_code) { impl->ioc.stop(); });
    impl->ws.async_close(websocket::close_code::normal, [impl](beast::error_code) {
      impl->mark_closed();
      impl->ioc.stop();
    });
  });
  impl_->thread.join();
  impl_->mark_closed();
}

}  // namespace pacer
