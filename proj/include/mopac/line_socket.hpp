#ifndef MOPAC_LINE_SOCKET_HPP
#define MOPAC_LINE_SOCKET_HPP

#include <chrono>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>

namespace mopac {

/// Blocking line-delimited byte stream over TCP. One instance per
/// connection; reads are buffered, writes append the terminating '\n'.
class LineConnection {
public:
    explicit LineConnection(int fd) : fd_(fd) {}
    ~LineConnection();

    LineConnection(const LineConnection&) = delete;
    LineConnection& operator=(const LineConnection&) = delete;
    LineConnection(LineConnection&& other) noexcept;
    LineConnection& operator=(LineConnection&& other) noexcept;

    /// False when the peer is gone.
    bool send_line(const std::string& line);

    /// Next line without its terminator; nullopt on EOF, closed peer, or
    /// an elapsed timeout.
    std::optional<std::string> recv_line(
        std::optional<std::chrono::milliseconds> timeout = std::nullopt);

    /// Wakes any thread blocked in recv_line by forcing EOF on the
    /// stream; the descriptor itself stays open until close().
    void shutdown_both();

    void close();
    bool valid() const { return fd_ >= 0; }
    int fd() const { return fd_; }

private:
    int fd_ = -1;
    std::string buffer_;
};

class ListenSocket {
public:
    /// Binds and listens on host:port; port 0 picks a free port.
    ListenSocket(const std::string& host, std::uint16_t port);
    ~ListenSocket();

    ListenSocket(const ListenSocket&) = delete;
    ListenSocket& operator=(const ListenSocket&) = delete;

    std::uint16_t port() const { return port_; }

    /// Accepted connection, or nullopt on timeout / closed listener.
    std::optional<LineConnection> accept(
        std::optional<std::chrono::milliseconds> timeout = std::nullopt);

    void close();

private:
    int fd_ = -1;
    std::uint16_t port_ = 0;
};

/// Client side; throws std::runtime_error when the connect fails.
LineConnection connect_line(const std::string& host, std::uint16_t port);

}  // namespace mopac

#endif  // MOPAC_LINE_SOCKET_HPP
