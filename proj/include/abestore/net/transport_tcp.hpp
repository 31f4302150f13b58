#pragma once

#include <cstdint>
#include <string>

#include "abestore/net/transport.hpp"

namespace abestore::net {

std::unique_ptr<Transport> tcp_connect(const std::string& host, uint16_t port);

class TcpListener {
public:
    // port 0 picks an ephemeral port (see port()).
    explicit TcpListener(uint16_t port);
    ~TcpListener();
    TcpListener(const TcpListener&) = delete;
    TcpListener& operator=(const TcpListener&) = delete;

    uint16_t port() const { return port_; }
    // Blocks; throws ProtocolError(ChannelAbort) once close()d.
    std::unique_ptr<Transport> accept();
    void close();

private:
    int fd_ = -1;
    uint16_t port_ = 0;
};

}  // namespace abestore::net
