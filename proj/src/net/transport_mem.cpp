#include <condition_variable>
#include <deque>
#include <mutex>

#include "abestore/errors.hpp"
#include "abestore/net/transport.hpp"

namespace abestore::net {

struct MemEndpoint::Shared {
    struct Direction {
        std::deque<uint8_t> buf;
        bool closed = false;
        TamperHook hook;
    };
    std::mutex m;
    std::condition_variable cv;
    Direction dir[2];  // dir[0]: a->b, dir[1]: b->a
};

MemPair mem_pair() {
    auto shared = std::make_shared<MemEndpoint::Shared>();
    MemPair p;
    p.a.reset(new MemEndpoint(shared, 0));
    p.b.reset(new MemEndpoint(shared, 1));
    return p;
}

MemEndpoint::MemEndpoint(std::shared_ptr<Shared> shared, int side)
    : shared_(std::move(shared)), side_(side) {}

MemEndpoint::~MemEndpoint() { close(); }

void MemEndpoint::send_bytes(std::span<const uint8_t> data) {
    Bytes chunk(data.begin(), data.end());
    std::unique_lock lock(shared_->m);
    auto& out = shared_->dir[side_];
    if (out.closed) throw ProtocolError(ErrorCode::ChannelAbort, "send on closed transport");
    if (out.hook) {
        std::optional<Bytes> kept;
        {
            // Run the hook outside the lock so it may inject().
            TamperHook hook = out.hook;
            lock.unlock();
            kept = hook(chunk);
            lock.lock();
        }
        if (!kept) return;  // dropped
        chunk = std::move(*kept);
    }
    out.buf.insert(out.buf.end(), chunk.begin(), chunk.end());
    shared_->cv.notify_all();
}

Bytes MemEndpoint::recv_exact(size_t n) {
    std::unique_lock lock(shared_->m);
    auto& in = shared_->dir[1 - side_];
    shared_->cv.wait(lock, [&] { return in.buf.size() >= n || in.closed; });
    if (in.buf.size() < n)
        throw ProtocolError(ErrorCode::ChannelAbort, "transport closed mid-read");
    Bytes out(in.buf.begin(), in.buf.begin() + n);
    in.buf.erase(in.buf.begin(), in.buf.begin() + n);
    return out;
}

void MemEndpoint::close() {
    std::lock_guard lock(shared_->m);
    shared_->dir[0].closed = true;
    shared_->dir[1].closed = true;
    shared_->cv.notify_all();
}

void MemEndpoint::set_send_hook(TamperHook hook) {
    std::lock_guard lock(shared_->m);
    shared_->dir[side_].hook = std::move(hook);
}

void MemEndpoint::inject(std::span<const uint8_t> data) {
    std::lock_guard lock(shared_->m);
    auto& out = shared_->dir[side_];
    out.buf.insert(out.buf.end(), data.begin(), data.end());
    shared_->cv.notify_all();
}

}  // namespace abestore::net
