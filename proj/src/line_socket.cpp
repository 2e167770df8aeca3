#include "mopac/line_socket.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <stdexcept>
#include <utility>

namespace mopac {

namespace {

sockaddr_in make_addr(const std::string& host, std::uint16_t port) {
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(port);
    if (inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1)
        throw std::runtime_error("bad IPv4 address: " + host);
    return addr;
}

// -1 timeout blocks; returns false when the deadline passes first.
bool wait_readable(int fd, std::optional<std::chrono::milliseconds> timeout) {
    pollfd pfd{fd, POLLIN, 0};
    int ms = timeout ? static_cast<int>(timeout->count()) : -1;
    for (;;) {
        int rc = ::poll(&pfd, 1, ms);
        if (rc > 0) return true;
        if (rc == 0) return false;
        if (errno != EINTR) return false;
    }
}

}  // namespace

LineConnection::~LineConnection() { close(); }

LineConnection::LineConnection(LineConnection&& other) noexcept
    : fd_(std::exchange(other.fd_, -1)), buffer_(std::move(other.buffer_)) {}

LineConnection& LineConnection::operator=(LineConnection&& other) noexcept {
    if (this != &other) {
        close();
        fd_ = std::exchange(other.fd_, -1);
        buffer_ = std::move(other.buffer_);
    }
    return *this;
}

void LineConnection::shutdown_both() {
    if (fd_ >= 0) ::shutdown(fd_, SHUT_RDWR);
}

void LineConnection::close() {
    if (fd_ >= 0) {
        ::close(fd_);
        fd_ = -1;
    }
}

bool LineConnection::send_line(const std::string& line) {
    if (fd_ < 0) return false;
    std::string framed = line;
    framed.push_back('\n');
    std::size_t sent = 0;
    while (sent < framed.size()) {
        ssize_t n = ::send(fd_, framed.data() + sent, framed.size() - sent,
                           MSG_NOSIGNAL);
        if (n < 0) {
            if (errno == EINTR) continue;
            return false;
        }
        sent += static_cast<std::size_t>(n);
    }
    return true;
}

std::optional<std::string> LineConnection::recv_line(
    std::optional<std::chrono::milliseconds> timeout) {
    const auto start = std::chrono::steady_clock::now();
    for (;;) {
        if (auto pos = buffer_.find('\n'); pos != std::string::npos) {
            std::string line = buffer_.substr(0, pos);
            buffer_.erase(0, pos + 1);
            if (!line.empty() && line.back() == '\r') line.pop_back();
            return line;
        }
        if (fd_ < 0) return std::nullopt;

        std::optional<std::chrono::milliseconds> remaining;
        if (timeout) {
            auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
                std::chrono::steady_clock::now() - start);
            if (elapsed >= *timeout) return std::nullopt;
            remaining = *timeout - elapsed;
        }
        if (!wait_readable(fd_, remaining)) return std::nullopt;

        char chunk[4096];
        ssize_t n = ::recv(fd_, chunk, sizeof chunk, 0);
        if (n == 0) return std::nullopt;  // EOF with no complete line
        if (n < 0) {
            if (errno == EINTR) continue;
            return std::nullopt;
        }
        buffer_.append(chunk, static_cast<std::size_t>(n));
    }
}

ListenSocket::ListenSocket(const std::string& host, std::uint16_t port) {
    fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
    if (fd_ < 0) throw std::runtime_error("socket: " + std::string(strerror(errno)));
    int one = 1;
    ::setsockopt(fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
    auto addr = make_addr(host, port);
    if (::bind(fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0) {
        auto err = errno;
        ::close(fd_);
        fd_ = -1;
        throw std::runtime_error("bind " + host + ":" + std::to_string(port) +
                                 ": " + strerror(err));
    }
    if (::listen(fd_, 16) != 0) {
        auto err = errno;
        ::close(fd_);
        fd_ = -1;
        throw std::runtime_error("listen: " + std::string(strerror(err)));
    }
    socklen_t len = sizeof addr;
    ::getsockname(fd_, reinterpret_cast<sockaddr*>(&addr), &len);
    port_ = ntohs(addr.sin_port);
}

ListenSocket::~ListenSocket() { close(); }

void ListenSocket::close() {
    if (fd_ >= 0) {
        ::shutdown(fd_, SHUT_RDWR);
        ::close(fd_);
        fd_ = -1;
    }
}

std::optional<LineConnection> ListenSocket::accept(
    std::optional<std::chrono::milliseconds> timeout) {
    if (fd_ < 0) return std::nullopt;
    if (!wait_readable(fd_, timeout)) return std::nullopt;
    int conn = ::accept(fd_, nullptr, nullptr);
    if (conn < 0) return std::nullopt;
    int one = 1;
    ::setsockopt(conn, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
    return LineConnection(conn);
}

LineConnection connect_line(const std::string& host, std::uint16_t port) {
    int fd = ::socket(AF_INET, SOCK_STREAM, 0);
    if (fd < 0) throw std::runtime_error("socket: " + std::string(strerror(errno)));
    auto addr = make_addr(host, port);
    if (::connect(fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0) {
        auto err = errno;
        ::close(fd);
        throw std::runtime_error("connect " + host + ":" + std::to_string(port) +
                                 ": " + strerror(err));
    }
    int one = 1;
    ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
    return LineConnection(fd);
}

}  // namespace mopac
