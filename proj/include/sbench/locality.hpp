#pragma once

#include <cstddef>
#include <cstdint>
#include <cstring>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <type_traits>
#include <vector>

#include "sbench/errors.hpp"
#include "sbench/tasking.hpp"

namespace sbench {

struct LocalityId {
    int rank = 0;
    int world = 1;
};

/// One (step, payload) message as framed on the wire.
struct RawMessage {
    std::uint64_t step = 0;
    std::vector<std::byte> bytes;
};

/// A locality's connection to its peers. Messages travel on directed,
/// ordered, reliable streams keyed by (sender, receiver, tag); each sent
/// message is received exactly once. recv completion is delivered through a
/// callback so typed channels can fulfil futures without an extra hop.
class Transport {
  public:
    using Completion =
        std::function<void(const RawMessage*, std::exception_ptr)>;

    virtual ~Transport() = default;

    LocalityId id() const { return id_; }

    virtual void send_bytes(int to, std::uint32_t tag, std::uint64_t step,
                            std::span<const std::byte> payload) = 0;

    /// Registers interest in the next message on (from, tag). If a message is
    /// already queued it completes inline. A message whose step differs from
    /// `step` completes with ProtocolError; a closed peer with TransportError.
    virtual void recv_bytes(int from, std::uint32_t tag, std::uint64_t step,
                            Completion done) = 0;

  protected:
    explicit Transport(LocalityId id) : id_(id) {}
    LocalityId id_;
};

/// Typed FIFO channel between two localities over one tag.
template <class T>
class Channel {
    static_assert(std::is_trivially_copyable_v<T>,
                  "channel payloads are raw IEEE/byte images");

  public:
    Channel(Transport& transport, int peer, std::uint32_t tag)
        : tr_(&transport), peer_(peer), tag_(tag) {}

    /// Non-blocking enqueue of (step, value).
    void send(std::uint64_t step, const T& value) {
        std::span<const std::byte> bytes(
            reinterpret_cast<const std::byte*>(&value), sizeof(T));
        tr_->send_bytes(peer_, tag_, step, bytes);
    }

    /// May be issued before the matching send; the future becomes ready when
    /// the step-`step` message arrives.
    Future<T> recv(std::uint64_t step) {
        Promise<T> promise;
        tr_->recv_bytes(peer_, tag_, step,
                        [promise](const RawMessage* msg,
                                  std::exception_ptr err) mutable {
                            if (err) {
                                promise.set_error(err);
                                return;
                            }
                            if (msg->bytes.size() != sizeof(T)) {
                                promise.set_error(std::make_exception_ptr(
                                    ProtocolError("payload size mismatch")));
                                return;
                            }
                            T value;
                            std::memcpy(&value, msg->bytes.data(), sizeof(T));
                            promise.set_value(value);
                        });
        return promise.future();
    }

  private:
    Transport* tr_;
    int peer_;
    std::uint32_t tag_;
};

// ---------------------------------------------------------------------------
// In-process cluster
// ---------------------------------------------------------------------------

/// L localities in one process, exchanging messages through shared queues.
class InprocCluster {
  public:
    explicit InprocCluster(int world);
    ~InprocCluster();

    Transport& transport(int rank);

    /// Marks `rank` as done sending: peers' pending receives from it fail,
    /// already-delivered messages stay drainable.
    void close_rank(int rank);

    struct Impl;

  private:
    std::shared_ptr<Impl> impl_;
    std::vector<std::unique_ptr<Transport>> transports_;
};

/// Spawns `world` threads, runs locality_main(transport) on each, joins,
/// and rethrows the first locality failure.
void run_cluster_inproc(int world,
                        const std::function<void(Transport&)>& locality_main);

// ---------------------------------------------------------------------------
// TCP cluster
// ---------------------------------------------------------------------------

/// Listening endpoint; port 0 picks an ephemeral port (for loopback tests).
struct TcpEndpoint {
    int listen_fd = -1;
    std::uint16_t port = 0;
};

TcpEndpoint tcp_listen(const std::string& host, std::uint16_t port);

/// One locality over TCP. peers[r] is the "host:port" every rank r listens
/// on; rank r accepts connections from higher ranks and connects to lower
/// ones, one socket per pair. Wire frames are little-endian
/// u32 tag, u64 step, u32 byte-length, raw payload.
class TcpTransport final : public Transport {
  public:
    TcpTransport(LocalityId id, TcpEndpoint own,
                 std::vector<std::string> peers,
                 double connect_timeout_s = 15.0);
    ~TcpTransport() override;

    void send_bytes(int to, std::uint32_t tag, std::uint64_t step,
                    std::span<const std::byte> payload) override;
    void recv_bytes(int from, std::uint32_t tag, std::uint64_t step,
                    Completion done) override;

  private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// Loopback TCP analogue of run_cluster_inproc: every locality is a thread
/// with its own sockets on 127.0.0.1 (ephemeral ports).
void run_cluster_tcp_loopback(
    int world, const std::function<void(Transport&)>& locality_main);

}  // namespace sbench
