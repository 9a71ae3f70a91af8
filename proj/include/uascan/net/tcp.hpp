#pragma once

#include <arpa/inet.h>
#include <fcntl.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstdint>
#include <cstring>
#include <optional>
#include <string>
#include <utility>

#include "uascan/bytes.hpp"
#include "uascan/errors.hpp"
#include "uascan/net/url.hpp"

namespace uascan::net {

using Millis = std::chrono::milliseconds;

namespace detail {

inline void set_nonblocking(int fd, bool on) {
    int flags = ::fcntl(fd, F_GETFL, 0);
    if (flags < 0) throw NetError(errc::io_error, "fcntl F_GETFL failed");
    if (on)
        flags |= O_NONBLOCK;
    else
        flags &= ~O_NONBLOCK;
    if (::fcntl(fd, F_SETFL, flags) < 0) throw NetError(errc::io_error, "fcntl F_SETFL failed");
}

/// Waits for readiness; returns false on timeout.
inline bool wait_fd(int fd, short events, Millis timeout) {
    struct pollfd p{};
    p.fd = fd;
    p.events = events;
    int n;
    do {
        n = ::poll(&p, 1, static_cast<int>(timeout.count()));
    } while (n < 0 && errno == EINTR);
    if (n < 0) throw NetError(errc::io_error, std::string("poll: ") + std::strerror(errno));
    return n > 0;
}

}  // namespace detail

/// A connected TCP stream with blocking-with-timeout reads/writes and
/// byte accounting for scan budgets.
class TcpConn {
public:
    TcpConn() = default;
    explicit TcpConn(int fd) : fd_(fd) {}
    TcpConn(const TcpConn&) = delete;
    TcpConn& operator=(const TcpConn&) = delete;
    TcpConn(TcpConn&& other) noexcept { *this = std::move(other); }
    TcpConn& operator=(TcpConn&& other) noexcept {
        if (this != &other) {
            close();
            fd_ = std::exchange(other.fd_, -1);
            sent_ = other.sent_;
            received_ = other.received_;
        }
        return *this;
    }
    ~TcpConn() { close(); }

    static TcpConn connect_to(const Target& target, Millis timeout) {
        struct addrinfo hints{};
        hints.ai_family = AF_UNSPEC;
        hints.ai_socktype = SOCK_STREAM;
        struct addrinfo* res = nullptr;
        std::string port = std::to_string(target.port);
        int rc = ::getaddrinfo(target.host.c_str(), port.c_str(), &hints, &res);
        if (rc != 0)
            throw NetError(errc::connect_timeout,
                           target.to_string() + ": " + ::gai_strerror(rc));
        std::string last_error = "no addresses";
        for (struct addrinfo* ai = res; ai; ai = ai->ai_next) {
            int fd = ::socket(ai->ai_family, ai->ai_socktype, ai->ai_protocol);
            if (fd < 0) {
                last_error = std::strerror(errno);
                continue;
            }
            try {
                detail::set_nonblocking(fd, true);
                int c = ::connect(fd, ai->ai_addr, ai->ai_addrlen);
                if (c < 0 && errno != EINPROGRESS) {
                    last_error = std::strerror(errno);
                    ::close(fd);
                    continue;
                }
                if (c < 0) {
                    if (!detail::wait_fd(fd, POLLOUT, timeout)) {
                        ::close(fd);
                        ::freeaddrinfo(res);
                        throw NetError(errc::connect_timeout, target.to_string() + ": connect timed out");
                    }
                    int err = 0;
                    socklen_t len = sizeof err;
                    if (::getsockopt(fd, SOL_SOCKET, SO_ERROR, &err, &len) < 0 || err != 0) {
                        last_error = std::strerror(err ? err : errno);
                        ::close(fd);
                        continue;
                    }
                }
                detail::set_nonblocking(fd, false);
                int one = 1;
                ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
                ::freeaddrinfo(res);
                return TcpConn(fd);
            } catch (...) {
                ::close(fd);
                ::freeaddrinfo(res);
                throw;
            }
        }
        ::freeaddrinfo(res);
        throw NetError(errc::connect_timeout, target.to_string() + ": " + last_error);
    }

    bool open() const { return fd_ >= 0; }
    uint64_t bytes_sent() const { return sent_; }
    uint64_t bytes_received() const { return received_; }

    void send_all(BytesView data) {
        size_t off = 0;
        while (off < data.size()) {
            ssize_t n = ::send(fd_, data.data() + off, data.size() - off, MSG_NOSIGNAL);
            if (n < 0) {
                if (errno == EINTR) continue;
                throw NetError(errc::io_error, std::string("send: ") + std::strerror(errno));
            }
            off += static_cast<size_t>(n);
            sent_ += static_cast<uint64_t>(n);
        }
    }

    /// Reads exactly n bytes or throws; peer close mid-read is io_error,
    /// silence past the deadline is transport_error.
    void recv_exact(uint8_t* dst, size_t n, Millis timeout) {
        auto deadline = std::chrono::steady_clock::now() + timeout;
        size_t off = 0;
        while (off < n) {
            auto remaining = std::chrono::duration_cast<Millis>(deadline - std::chrono::steady_clock::now());
            if (remaining.count() <= 0 || !detail::wait_fd(fd_, POLLIN, remaining))
                throw NetError(errc::transport_error, "read timed out");
            ssize_t got = ::recv(fd_, dst + off, n - off, 0);
            if (got == 0) throw NetError(errc::io_error, "connection closed by peer");
            if (got < 0) {
                if (errno == EINTR || errno == EAGAIN || errno == EWOULDBLOCK) continue;
                throw NetError(errc::io_error, std::string("recv: ") + std::strerror(errno));
            }
            off += static_cast<size_t>(got);
            received_ += static_cast<uint64_t>(got);
        }
    }

    /// True when a read would not block (data or EOF pending).
    bool readable(Millis timeout) { return detail::wait_fd(fd_, POLLIN, timeout); }

    void close() {
        if (fd_ >= 0) {
            ::close(fd_);
            fd_ = -1;
        }
    }

private:
    int fd_ = -1;
    uint64_t sent_ = 0;
    uint64_t received_ = 0;
};

/// Listening socket for the mock fixtures.
class TcpListener {
public:
    TcpListener() = default;
    TcpListener(const TcpListener&) = delete;
    TcpListener& operator=(const TcpListener&) = delete;
    TcpListener(TcpListener&& other) noexcept { *this = std::move(other); }
    TcpListener& operator=(TcpListener&& other) noexcept {
        if (this != &other) {
            close();
            fd_ = std::exchange(other.fd_, -1);
            port_ = other.port_;
        }
        return *this;
    }
    ~TcpListener() { close(); }

    /// Binds 127.0.0.1-style listeners; port 0 picks an ephemeral port.
    static TcpListener bind_to(const std::string& host, uint16_t port) {
        int fd = ::socket(AF_INET, SOCK_STREAM, 0);
        if (fd < 0) throw NetError(errc::bind_failure, std::string("socket: ") + std::strerror(errno));
        int one = 1;
        ::setsockopt(fd, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
        struct sockaddr_in addr{};
        addr.sin_family = AF_INET;
        addr.sin_port = htons(port);
        if (::inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1) {
            ::close(fd);
            throw NetError(errc::bind_failure, "listener host must be an IPv4 literal: " + host);
        }
        if (::bind(fd, reinterpret_cast<struct sockaddr*>(&addr), sizeof addr) < 0) {
            int err = errno;
            ::close(fd);
            throw NetError(errc::bind_failure,
                           host + ":" + std::to_string(port) + ": " + std::strerror(err));
        }
        if (::listen(fd, 64) < 0) {
            int err = errno;
            ::close(fd);
            throw NetError(errc::bind_failure, std::string("listen: ") + std::strerror(err));
        }
        socklen_t len = sizeof addr;
        ::getsockname(fd, reinterpret_cast<struct sockaddr*>(&addr), &len);
        TcpListener l;
        l.fd_ = fd;
        l.port_ = ntohs(addr.sin_port);
        return l;
    }

    uint16_t port() const { return port_; }
    bool open() const { return fd_ >= 0; }

    /// Accepts one connection or returns nullopt on timeout.
    std::optional<TcpConn> accept(Millis timeout) {
        if (!detail::wait_fd(fd_, POLLIN, timeout)) return std::nullopt;
        int fd = ::accept(fd_, nullptr, nullptr);
        if (fd < 0) {
            if (errno == EINTR || errno == EAGAIN || errno == EWOULDBLOCK) return std::nullopt;
            throw NetError(errc::io_error, std::string("accept: ") + std::strerror(errno));
        }
        int one = 1;
        ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
        return TcpConn(fd);
    }

    void close() {
        if (fd_ >= 0) {
            ::close(fd_);
            fd_ = -1;
        }
    }

private:
    int fd_ = -1;
    uint16_t port_ = 0;
};

}  // namespace uascan::net
