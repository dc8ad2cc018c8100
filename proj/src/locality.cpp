#include "sbench/locality.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <sys/socket.h>
#include <unistd.h>

#include <atomic>
#include <cerrno>
#include <chrono>
#include <cstring>
#include <deque>
#include <map>
#include <mutex>
#include <set>
#include <thread>
#include <utility>

namespace sbench {

namespace {

// -------------------------------------------------------------------------
// Receiver-side demux shared by both transports. One slot per (from, tag):
// FIFO of arrived frames plus FIFO of outstanding receives; whichever side
// gets there first parks. Completions run outside the slot lock.
// -------------------------------------------------------------------------

class Mailbox {
  public:
    void deliver(int from, std::uint32_t tag, RawMessage msg) {
        Slot& s = slot(from, tag);
        Transport::Completion done;
        std::uint64_t want = 0;
        {
            std::lock_guard lk(s.m);
            if (s.waiting.empty()) {
                s.arrived.push_back(std::move(msg));
                return;
            }
            want = s.waiting.front().first;
            done = std::move(s.waiting.front().second);
            s.waiting.pop_front();
        }
        complete(std::move(done), want, msg);
    }

    void recv(int from, std::uint32_t tag, std::uint64_t step,
              Transport::Completion done) {
        Slot& s = slot(from, tag);
        RawMessage msg;
        bool closed = false;
        {
            std::lock_guard lk(s.m);
            if (!s.arrived.empty()) {
                msg = std::move(s.arrived.front());
                s.arrived.pop_front();
            } else if (s.closed) {
                closed = true;
            } else {
                s.waiting.emplace_back(step, std::move(done));
                return;
            }
        }
        if (closed) {
            done(nullptr, std::make_exception_ptr(TransportError(
                              "recv on closed channel with no message")));
            return;
        }
        complete(std::move(done), step, msg);
    }

    /// Peer went away: fail its outstanding receives, leave queued frames
    /// drainable, and error out any later recv that finds the queue empty.
    void close_from(int from) {
        std::vector<Transport::Completion> orphans;
        {
            std::lock_guard lk(map_m_);
            closed_peers_.insert(from);
            for (auto& [key, s] : slots_) {
                if (key.first != from) continue;
                std::lock_guard slk(s->m);
                s->closed = true;
                for (auto& [step, done] : s->waiting)
                    orphans.push_back(std::move(done));
                s->waiting.clear();
            }
        }
        for (auto& done : orphans)
            done(nullptr, std::make_exception_ptr(
                              TransportError("peer closed the channel")));
    }

    void close_all(int world) {
        for (int r = 0; r < world; ++r) close_from(r);
    }

  private:
    struct Slot {
        std::mutex m;
        std::deque<RawMessage> arrived;
        std::deque<std::pair<std::uint64_t, Transport::Completion>> waiting;
        bool closed = false;
    };

    static void complete(Transport::Completion done, std::uint64_t want,
                         const RawMessage& msg) {
        if (msg.step != want) {
            done(nullptr,
                 std::make_exception_ptr(ProtocolError(
                     "step mismatch: expected " + std::to_string(want) +
                     ", got " + std::to_string(msg.step))));
            return;
        }
        done(&msg, nullptr);
    }

    Slot& slot(int from, std::uint32_t tag) {
        std::lock_guard lk(map_m_);
        auto key = std::make_pair(from, tag);
        auto it = slots_.find(key);
        if (it == slots_.end()) {
            it = slots_.emplace(key, std::make_unique<Slot>()).first;
            if (closed_peers_.count(from)) it->second->closed = true;
        }
        return *it->second;
    }

    std::mutex map_m_;
    std::map<std::pair<int, std::uint32_t>, std::unique_ptr<Slot>> slots_;
    std::set<int> closed_peers_;
};

}  // namespace

// -------------------------------------------------------------------------
// In-process cluster
// -------------------------------------------------------------------------

struct InprocCluster::Impl {
    explicit Impl(int world) : boxes(world) {}
    std::vector<Mailbox> boxes;
};

namespace {

class InprocTransport final : public Transport {
  public:
    InprocTransport(LocalityId id, std::shared_ptr<InprocCluster::Impl> impl)
        : Transport(id), impl_(std::move(impl)) {}

    void send_bytes(int to, std::uint32_t tag, std::uint64_t step,
                    std::span<const std::byte> payload) override {
        if (to < 0 || to >= id_.world)
            throw TransportError("send to unknown rank");
        RawMessage msg;
        msg.step = step;
        msg.bytes.assign(payload.begin(), payload.end());
        impl_->boxes[to].deliver(id_.rank, tag, std::move(msg));
    }

    void recv_bytes(int from, std::uint32_t tag, std::uint64_t step,
                    Completion done) override {
        if (from < 0 || from >= id_.world)
            throw TransportError("recv from unknown rank");
        impl_->boxes[id_.rank].recv(from, tag, step, std::move(done));
    }

  private:
    std::shared_ptr<InprocCluster::Impl> impl_;
};

}  // namespace

InprocCluster::InprocCluster(int world) {
    if (world < 1) throw ConfigError("world size must be >= 1");
    impl_ = std::make_shared<Impl>(world);
    for (int r = 0; r < world; ++r)
        transports_.push_back(
            std::make_unique<InprocTransport>(LocalityId{r, world}, impl_));
}

InprocCluster::~InprocCluster() = default;

Transport& InprocCluster::transport(int rank) {
    return *transports_.at(rank);
}

void InprocCluster::close_rank(int rank) {
    const int world = int(impl_->boxes.size());
    for (int q = 0; q < world; ++q)
        if (q != rank) impl_->boxes[q].close_from(rank);
}

void run_cluster_inproc(int world,
                        const std::function<void(Transport&)>& locality_main) {
    InprocCluster cluster(world);
    std::mutex err_m;
    std::exception_ptr first_error;
    std::vector<std::thread> threads;
    threads.reserve(world);
    for (int r = 0; r < world; ++r) {
        threads.emplace_back([&, r] {
            try {
                locality_main(cluster.transport(r));
            } catch (...) {
                std::lock_guard lk(err_m);
                if (!first_error) first_error = std::current_exception();
            }
            // locality r sends nothing further; unblock anyone waiting on it
            cluster.close_rank(r);
        });
    }
    for (auto& t : threads) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

// -------------------------------------------------------------------------
// TCP transport
// -------------------------------------------------------------------------

namespace {

void store_le32(std::byte* p, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) p[i] = std::byte((v >> (8 * i)) & 0xff);
}
void store_le64(std::byte* p, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) p[i] = std::byte((v >> (8 * i)) & 0xff);
}
std::uint32_t load_le32(const std::byte* p) {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= std::uint32_t(p[i]) << (8 * i);
    return v;
}
std::uint64_t load_le64(const std::byte* p) {
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= std::uint64_t(p[i]) << (8 * i);
    return v;
}

constexpr std::uint32_t kHelloMagic = 0x53424348;  // "SBCH"
constexpr std::size_t kFrameHeader = 4 + 8 + 4;    // tag, step, length

bool read_exact(int fd, std::byte* buf, std::size_t len) {
    std::size_t got = 0;
    while (got < len) {
        ssize_t n = ::read(fd, buf + got, len - got);
        if (n == 0) return false;  // orderly EOF
        if (n < 0) {
            if (errno == EINTR) continue;
            return false;
        }
        got += std::size_t(n);
    }
    return true;
}

void write_all(int fd, const std::byte* buf, std::size_t len) {
    std::size_t sent = 0;
    while (sent < len) {
        ssize_t n = ::write(fd, buf + sent, len - sent);
        if (n < 0) {
            if (errno == EINTR) continue;
            throw TransportError(std::string("send failed: ") +
                                 std::strerror(errno));
        }
        sent += std::size_t(n);
    }
}

std::pair<std::string, std::uint16_t> split_host_port(const std::string& s) {
    auto pos = s.rfind(':');
    if (pos == std::string::npos)
        throw ConfigError("peer address must be host:port, got '" + s + "'");
    int port = std::stoi(s.substr(pos + 1));
    if (port < 0 || port > 65535)
        throw ConfigError("port out of range in '" + s + "'");
    return {s.substr(0, pos), std::uint16_t(port)};
}

int connect_with_retry(const std::string& host, std::uint16_t port,
                       double timeout_s) {
    const double deadline = monotonic_seconds() + timeout_s;
    for (;;) {
        addrinfo hints{};
        hints.ai_family = AF_INET;
        hints.ai_socktype = SOCK_STREAM;
        addrinfo* res = nullptr;
        const std::string port_str = std::to_string(port);
        if (getaddrinfo(host.c_str(), port_str.c_str(), &hints, &res) == 0) {
            int fd = ::socket(res->ai_family, res->ai_socktype, 0);
            if (fd >= 0 && ::connect(fd, res->ai_addr, res->ai_addrlen) == 0) {
                freeaddrinfo(res);
                int one = 1;
                setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
                return fd;
            }
            if (fd >= 0) ::close(fd);
            freeaddrinfo(res);
        }
        if (monotonic_seconds() > deadline)
            throw TransportError("could not connect to " + host + ":" +
                                 port_str);
        std::this_thread::sleep_for(std::chrono::milliseconds(20));
    }
}

}  // namespace

TcpEndpoint tcp_listen(const std::string& host, std::uint16_t port) {
    int fd = ::socket(AF_INET, SOCK_STREAM, 0);
    if (fd < 0) throw TransportError("socket() failed");
    int one = 1;
    setsockopt(fd, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);

    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(port);
    if (host.empty() || host == "*" || host == "0.0.0.0") {
        addr.sin_addr.s_addr = htonl(INADDR_ANY);
    } else if (inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1) {
        addrinfo hints{};
        hints.ai_family = AF_INET;
        hints.ai_socktype = SOCK_STREAM;
        addrinfo* res = nullptr;
        if (getaddrinfo(host.c_str(), nullptr, &hints, &res) != 0 || !res) {
            ::close(fd);
            throw TransportError("cannot resolve listen host '" + host + "'");
        }
        addr.sin_addr = reinterpret_cast<sockaddr_in*>(res->ai_addr)->sin_addr;
        freeaddrinfo(res);
    }
    if (::bind(fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0) {
        ::close(fd);
        throw TransportError(std::string("bind failed: ") +
                             std::strerror(errno));
    }
    if (::listen(fd, 64) != 0) {
        ::close(fd);
        throw TransportError("listen failed");
    }
    socklen_t len = sizeof addr;
    getsockname(fd, reinterpret_cast<sockaddr*>(&addr), &len);
    return {fd, ntohs(addr.sin_port)};
}

struct TcpTransport::Impl {
    struct Peer {
        int fd = -1;
        std::mutex send_m;
        std::thread reader;
    };

    explicit Impl(int world) : peers(world) {}

    Mailbox box;
    std::vector<Peer> peers;  // sized once; Peer holds a mutex, never moves
    int listen_fd = -1;
    std::atomic<bool> shutting_down{false};

    void reader_loop(int peer_rank) {
        Peer& p = peers[peer_rank];
        std::byte header[kFrameHeader];
        while (read_exact(p.fd, header, kFrameHeader)) {
            RawMessage msg;
            const std::uint32_t tag = load_le32(header);
            msg.step = load_le64(header + 4);
            const std::uint32_t len = load_le32(header + 12);
            msg.bytes.resize(len);
            if (len > 0 && !read_exact(p.fd, msg.bytes.data(), len)) break;
            box.deliver(peer_rank, tag, std::move(msg));
        }
        box.close_from(peer_rank);
    }
};

TcpTransport::TcpTransport(LocalityId id, TcpEndpoint own,
                           std::vector<std::string> peers,
                           double connect_timeout_s)
    : Transport(id), impl_(std::make_unique<Impl>(id.world)) {
    if (int(peers.size()) != id.world)
        throw ConfigError("peer list must name all " +
                          std::to_string(id.world) + " localities");
    impl_->listen_fd = own.listen_fd;

    // lower ranks listen, higher ranks dial: one socket per pair
    for (int q = 0; q < id.rank; ++q) {
        auto [host, port] = split_host_port(peers[q]);
        int fd = connect_with_retry(host, port, connect_timeout_s);
        std::byte hello[8];
        store_le32(hello, kHelloMagic);
        store_le32(hello + 4, std::uint32_t(id.rank));
        write_all(fd, hello, sizeof hello);
        impl_->peers[q].fd = fd;
    }
    for (int n = id.rank + 1; n < id.world; ++n) {
        int fd = ::accept(impl_->listen_fd, nullptr, nullptr);
        if (fd < 0) throw TransportError("accept failed");
        int one = 1;
        setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
        std::byte hello[8];
        if (!read_exact(fd, hello, sizeof hello) ||
            load_le32(hello) != kHelloMagic)
            throw TransportError("bad handshake from peer");
        const int peer_rank = int(load_le32(hello + 4));
        if (peer_rank <= id.rank || peer_rank >= id.world)
            throw TransportError("handshake announced invalid rank");
        impl_->peers[peer_rank].fd = fd;
    }
    for (int q = 0; q < id.world; ++q)
        if (q != id.rank && impl_->peers[q].fd >= 0)
            impl_->peers[q].reader =
                std::thread([this, q] { impl_->reader_loop(q); });
}

TcpTransport::~TcpTransport() {
    impl_->shutting_down = true;
    for (auto& p : impl_->peers)
        if (p.fd >= 0) ::shutdown(p.fd, SHUT_RDWR);
    for (auto& p : impl_->peers)
        if (p.reader.joinable()) p.reader.join();
    for (auto& p : impl_->peers)
        if (p.fd >= 0) ::close(p.fd);
    if (impl_->listen_fd >= 0) ::close(impl_->listen_fd);
    impl_->box.close_all(id_.world);
}

void TcpTransport::send_bytes(int to, std::uint32_t tag, std::uint64_t step,
                              std::span<const std::byte> payload) {
    if (to < 0 || to >= id_.world || to == id_.rank)
        throw TransportError("send to unknown rank");
    Impl::Peer& p = impl_->peers[to];
    if (p.fd < 0) throw TransportError("no connection to peer");
    std::vector<std::byte> frame(kFrameHeader + payload.size());
    store_le32(frame.data(), tag);
    store_le64(frame.data() + 4, step);
    store_le32(frame.data() + 12, std::uint32_t(payload.size()));
    std::memcpy(frame.data() + kFrameHeader, payload.data(), payload.size());
    std::lock_guard lk(p.send_m);
    write_all(p.fd, frame.data(), frame.size());
}

void TcpTransport::recv_bytes(int from, std::uint32_t tag, std::uint64_t step,
                              Completion done) {
    if (from < 0 || from >= id_.world || from == id_.rank)
        throw TransportError("recv from unknown rank");
    impl_->box.recv(from, tag, step, std::move(done));
}

void run_cluster_tcp_loopback(
    int world, const std::function<void(Transport&)>& locality_main) {
    std::vector<TcpEndpoint> endpoints;
    std::vector<std::string> peers;
    for (int r = 0; r < world; ++r) {
        endpoints.push_back(tcp_listen("127.0.0.1", 0));
        peers.push_back("127.0.0.1:" + std::to_string(endpoints.back().port));
    }
    std::mutex err_m;
    std::exception_ptr first_error;
    std::vector<std::thread> threads;
    threads.reserve(world);
    for (int r = 0; r < world; ++r) {
        threads.emplace_back([&, r] {
            try {
                TcpTransport tr(LocalityId{r, world}, endpoints[r], peers);
                locality_main(tr);
            } catch (...) {
                std::lock_guard lk(err_m);
                if (!first_error) first_error = std::current_exception();
            }
        });
    }
    for (auto& t : threads) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

}  // namespace sbench
