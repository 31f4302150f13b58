#include "abestore/net/transport_tcp.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cstring>

#include "abestore/errors.hpp"

namespace abestore::net {

namespace {

[[noreturn]] void abort_errno(const std::string& what) {
    throw ProtocolError(ErrorCode::ChannelAbort, what + ": " + std::strerror(errno));
}

class TcpTransport final : public Transport {
public:
    explicit TcpTransport(int fd) : fd_(fd) {
        int one = 1;
        setsockopt(fd_, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
    }
    ~TcpTransport() override { close(); }

    void send_bytes(std::span<const uint8_t> data) override {
        size_t off = 0;
        while (off < data.size()) {
            ssize_t n = ::send(fd_, data.data() + off, data.size() - off, MSG_NOSIGNAL);
            if (n <= 0) abort_errno("tcp send");
            off += size_t(n);
        }
    }

    Bytes recv_exact(size_t n) override {
        Bytes out(n);
        size_t off = 0;
        while (off < n) {
            ssize_t r = ::recv(fd_, out.data() + off, n - off, 0);
            if (r == 0)
                throw ProtocolError(ErrorCode::ChannelAbort, "tcp peer closed mid-read");
            if (r < 0) abort_errno("tcp recv");
            off += size_t(r);
        }
        return out;
    }

    void close() override {
        if (fd_ >= 0) {
            ::shutdown(fd_, SHUT_RDWR);
            ::close(fd_);
            fd_ = -1;
        }
    }

private:
    int fd_;
};

}  // namespace

std::unique_ptr<Transport> tcp_connect(const std::string& host, uint16_t port) {
    addrinfo hints{};
    hints.ai_family = AF_UNSPEC;
    hints.ai_socktype = SOCK_STREAM;
    addrinfo* res = nullptr;
    if (getaddrinfo(host.c_str(), std::to_string(port).c_str(), &hints, &res) != 0 || !res)
        throw ProtocolError(ErrorCode::ChannelAbort, "cannot resolve " + host);
    int fd = -1;
    for (addrinfo* ai = res; ai; ai = ai->ai_next) {
        fd = socket(ai->ai_family, ai->ai_socktype, ai->ai_protocol);
        if (fd < 0) continue;
        if (connect(fd, ai->ai_addr, ai->ai_addrlen) == 0) break;
        ::close(fd);
        fd = -1;
    }
    freeaddrinfo(res);
    if (fd < 0) throw ProtocolError(ErrorCode::ChannelAbort, "cannot connect to " + host);
    return std::make_unique<TcpTransport>(fd);
}

TcpListener::TcpListener(uint16_t port) {
    fd_ = socket(AF_INET, SOCK_STREAM, 0);
    if (fd_ < 0) abort_errno("socket");
    int one = 1;
    setsockopt(fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
    addr.sin_port = htons(port);
    if (bind(fd_, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0) abort_errno("bind");
    if (listen(fd_, 16) != 0) abort_errno("listen");
    socklen_t len = sizeof(addr);
    if (getsockname(fd_, reinterpret_cast<sockaddr*>(&addr), &len) != 0)
        abort_errno("getsockname");
    port_ = ntohs(addr.sin_port);
}

TcpListener::~TcpListener() { close(); }

std::unique_ptr<Transport> TcpListener::accept() {
    int fd = ::accept(fd_, nullptr, nullptr);
    if (fd < 0) abort_errno("accept");
    return std::make_unique<TcpTransport>(fd);
}

void TcpListener::close() {
    if (fd_ >= 0) {
        ::close(fd_);
        fd_ = -1;
    }
}

}  // namespace abestore::net
