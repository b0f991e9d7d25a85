#include <set>

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/websocket.hpp>

#include "rtc/service.hpp"

namespace rtc::service {

namespace beast = boost::beast;
namespace websocket = beast::websocket;
namespace net = boost::asio;
using tcp = net::ip::tcp;

namespace {

/// One WebSocket with a send queue. All socket work runs on the stream's
/// strand; send() may be called from any thread.
class WsConnection : public std::enable_shared_from_this<WsConnection>
{
public:
    using TextHandler = std::function<void(std::string)>;
    using CloseHandler = std::function<void()>;

    explicit WsConnection(tcp::socket socket) : ws_(std::move(socket)) {}

    websocket::stream<beast::tcp_stream>& stream() { return ws_; }

    /// Starts the read loop once the handshake is done.
    void run(TextHandler on_text, CloseHandler on_closed)
    {
        on_text_ = std::move(on_text);
        on_closed_ = std::move(on_closed);
        ws_.text(true);
        read();
    }

    void send(std::string text)
    {
        net::post(ws_.get_executor(), [self = shared_from_this(), text = std::move(text)]() mutable {
            if (self->closed_)
                return;
            self->queue_.push_back(std::move(text));
            if (self->queue_.size() == 1)
                self->write();
        });
    }

    void close()
    {
        net::post(ws_.get_executor(), [self = shared_from_this()] {
            if (self->closed_)
                return;
            self->ws_.async_close(websocket::close_code::normal,
                                  [self](beast::error_code) { self->finish(); });
        });
    }

private:
    void read()
    {
        ws_.async_read(buffer_, [self = shared_from_this()](beast::error_code ec, std::size_t) {
            if (ec) {
                self->finish();
                return;
            }
            std::string text = beast::buffers_to_string(self->buffer_.data());
            self->buffer_.consume(self->buffer_.size());
            if (self->on_text_)
                self->on_text_(std::move(text));
            self->read();
        });
    }

    void write()
    {
        ws_.async_write(net::buffer(queue_.front()), [self = shared_from_this()](beast::error_code ec, std::size_t) {
            if (ec) {
                self->finish();
                return;
            }
            self->queue_.pop_front();
            if (!self->queue_.empty())
                self->write();
        });
    }

    void finish()
    {
        if (closed_)
            return;
        closed_ = true;
        queue_.clear();
        beast::error_code ignored;
        beast::get_lowest_layer(ws_).socket().close(ignored);
        on_text_ = nullptr;
        if (auto cb = std::move(on_closed_))
            cb();
    }

    websocket::stream<beast::tcp_stream> ws_;
    beast::flat_buffer buffer_;
    std::deque<std::string> queue_;
    TextHandler on_text_;
    CloseHandler on_closed_;
    bool closed_ = false;
};

} // namespace

// ------------------------------------------------------------------ server

struct Server::Impl
{
    ServerConfig config;
    net::io_context ioc;
    tcp::acceptor acceptor{ioc};
    std::thread io_thread;
    std::shared_ptr<ConnectionHandler::Registry> registry;
    std::mutex mu;
    std::condition_variable stopped_cv;
    bool running = false;
    std::set<std::shared_ptr<WsConnection>> connections; // io thread only
    std::vector<std::thread> reapers;

    void accept()
    {
        acceptor.async_accept(net::make_strand(ioc), [this](beast::error_code ec, tcp::socket socket) {
            if (ec)
                return;
            auto conn = std::make_shared<WsConnection>(std::move(socket));
            conn->stream().set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
            conn->stream().async_accept([this, conn](beast::error_code hec) {
                if (!hec)
                    net::post(ioc, [this, conn] { attach(conn); });
            });
            accept();
        });
    }

    void attach(const std::shared_ptr<WsConnection>& conn)
    {
        connections.insert(conn);
        std::weak_ptr<WsConnection> weak = conn;
        auto handler = std::make_shared<ConnectionHandler>(registry, [weak](const proto::ServerMessage& m) {
            if (auto c = weak.lock())
                c->send(proto::encode(m));
        });
        conn->run([handler](std::string text) { handler->onText(text); },
                  [this, weak, handler]() mutable {
                      // Tear sessions down off the I/O thread: joining them
                      // must not stall other connections.
                      std::lock_guard lock(mu);
                      reapers.emplace_back([h = std::move(handler)]() mutable { h.reset(); });
                      net::post(ioc, [this, weak] {
                          if (auto c = weak.lock())
                              connections.erase(c);
                      });
                  });
    }
};

Server::Server(ServerConfig config) : impl_(std::make_unique<Impl>())
{
    impl_->config = std::move(config);
    impl_->registry = std::make_shared<ConnectionHandler::Registry>(impl_->config.max_sessions);
}

Server::~Server() { stop(); }

unsigned short Server::start()
{
    Impl& s = *impl_;
    const tcp::endpoint ep(net::ip::make_address(s.config.address), s.config.port);
    s.acceptor.open(ep.protocol());
    s.acceptor.set_option(net::socket_base::reuse_address(true));
    s.acceptor.bind(ep);
    s.acceptor.listen(net::socket_base::max_listen_connections);
    s.accept();
    {
        std::lock_guard lock(s.mu);
        s.running = true;
    }
    s.io_thread = std::thread([&s] { s.ioc.run(); });
    return port();
}

unsigned short Server::port() const { return impl_->acceptor.local_endpoint().port(); }

void Server::stop()
{
    Impl& s = *impl_;
    {
        std::lock_guard lock(s.mu);
        if (!s.running)
            return;
        s.running = false;
    }
    net::post(s.ioc, [&s] {
        beast::error_code ignored;
        s.acceptor.close(ignored);
        for (const auto& c : s.connections)
            c->close();
    });
    // Give close frames a moment, then stop the loop.
    std::this_thread::sleep_for(std::chrono::milliseconds(50));
    s.ioc.stop();
    if (s.io_thread.joinable())
        s.io_thread.join();
    s.connections.clear();
    std::vector<std::thread> reapers;
    {
        std::lock_guard lock(s.mu);
        reapers.swap(s.reapers);
    }
    for (auto& t : reapers)
        t.join();
    s.stopped_cv.notify_all();
}

void Server::wait()
{
    std::unique_lock lock(impl_->mu);
    impl_->stopped_cv.wait(lock, [this] { return !impl_->running; });
}

// ------------------------------------------------------------------ client

struct Client::Impl
{
    net::io_context ioc;
    std::shared_ptr<WsConnection> conn;
    std::thread io_thread;
    mutable std::mutex mu;
    std::condition_variable cv;
    std::deque<std::string> inbox;
    std::vector<std::string> transcript;
    bool open = false;

    void shutdown()
    {
        if (conn)
            conn->close();
        if (io_thread.joinable()) {
            std::this_thread::sleep_for(std::chrono::milliseconds(20));
            ioc.stop();
            io_thread.join();
        }
        conn.reset();
        std::lock_guard lock(mu);
        open = false;
        cv.notify_all();
    }
};

Client::Client() : impl_(std::make_unique<Impl>()) {}

Client::~Client() { close(); }

proto::Hello Client::connect(const std::string& host, unsigned short port, const std::string& agent)
{
    Impl& c = *impl_;
    tcp::resolver resolver(c.ioc);
    const auto results = resolver.resolve(host, std::to_string(port));
    c.conn = std::make_shared<WsConnection>(tcp::socket(net::make_strand(c.ioc)));
    auto& ws = c.conn->stream();
    beast::get_lowest_layer(ws).connect(results);
    ws.handshake(host + ":" + std::to_string(port), "/");
    {
        std::lock_guard lock(c.mu);
        c.open = true;
    }
    c.conn->run(
        [&c](std::string text) {
            {
                std::lock_guard lock(c.mu);
                c.transcript.push_back(text);
                c.inbox.push_back(std::move(text));
            }
            c.cv.notify_all();
        },
        [&c] {
            {
                std::lock_guard lock(c.mu);
                c.open = false;
            }
            c.cv.notify_all();
        });
    c.io_thread = std::thread([&c] {
        auto guard = net::make_work_guard(c.ioc);
        c.ioc.run();
    });

    send(proto::Hello{agent, proto::kVersion, std::nullopt});
    const auto reply = receive(std::chrono::seconds(10));
    if (!reply)
        throw std::runtime_error("no Hello from server");
    if (const auto* err = std::get_if<proto::Error>(&*reply))
        throw std::runtime_error("server refused Hello: " + err->message);
    const auto* hello = std::get_if<proto::Hello>(&*reply);
    if (!hello)
        throw std::runtime_error("expected Hello, got " + std::string(proto::kindOf(*reply)));
    return *hello;
}

void Client::send(const proto::ClientMessage& m) { sendText(proto::encode(m)); }

void Client::sendText(const std::string& text)
{
    if (!impl_->conn)
        throw std::runtime_error("client is not connected");
    impl_->conn->send(text);
}

std::optional<proto::ServerMessage> Client::receive(std::chrono::milliseconds timeout)
{
    Impl& c = *impl_;
    std::unique_lock lock(c.mu);
    if (!c.cv.wait_for(lock, timeout, [&c] { return !c.inbox.empty() || !c.open; }))
        return std::nullopt;
    if (c.inbox.empty())
        return std::nullopt;
    std::string text = std::move(c.inbox.front());
    c.inbox.pop_front();
    lock.unlock();
    return proto::decodeServer(text);
}

std::vector<std::string> Client::transcript() const
{
    std::lock_guard lock(impl_->mu);
    return impl_->transcript;
}

bool Client::connected() const
{
    std::lock_guard lock(impl_->mu);
    return impl_->open;
}

void Client::close() { impl_->shutdown(); }

} // namespace rtc::service
