#include <doctest.h>

#include <random>
#include <vector>

#include "sbench/locality.hpp"

using namespace sbench;

namespace {

/// Deterministic exchange script used to compare transports: rank 0 streams
/// `count` random doubles to rank 1, rank 1 echoes each back doubled.
std::vector<double> run_echo_script(
    int count, std::uint64_t seed,
    const std::function<void(int, const std::function<void(Transport&)>&)>&
        cluster_runner) {
    std::vector<double> received;
    received.resize(count);
    cluster_runner(2, [&](Transport& tr) {
        if (tr.id().rank == 0) {
            std::mt19937_64 rng(seed);
            std::uniform_real_distribution<double> dist(-1e6, 1e6);
            Channel<double> out(tr, 1, 0);
            Channel<double> back(tr, 1, 1);
            for (int i = 0; i < count; ++i) {
                out.send(i, dist(rng));
                received[i] = back.recv(i).get();
            }
        } else {
            Channel<double> in(tr, 0, 0);
            Channel<double> out(tr, 0, 1);
            for (int i = 0; i < count; ++i)
                out.send(i, in.recv(i).get() * 2.0);
        }
    });
    return received;
}

}  // namespace

TEST_CASE("inproc channel round-trips a value") {
    InprocCluster cluster(2);
    Channel<double> tx(cluster.transport(0), 1, 5);
    Channel<double> rx(cluster.transport(1), 0, 5);
    tx.send(0, 3.25);
    CHECK(rx.recv(0).get() == 3.25);
}

TEST_CASE("messages on one channel stay FIFO") {
    InprocCluster cluster(2);
    Channel<int> tx(cluster.transport(0), 1, 0);
    Channel<int> rx(cluster.transport(1), 0, 0);
    tx.send(1, 111);
    tx.send(2, 222);
    CHECK(rx.recv(1).get() == 111);
    CHECK(rx.recv(2).get() == 222);
}

TEST_CASE("recv issued before send goes pending, then ready") {
    InprocCluster cluster(2);
    Channel<int> rx(cluster.transport(1), 0, 0);
    Future<int> f = rx.recv(4);
    CHECK_FALSE(f.is_ready());
    Channel<int>(cluster.transport(0), 1, 0).send(4, 40);
    CHECK(f.get() == 40);
}

TEST_CASE("a step mismatch is a protocol violation") {
    InprocCluster cluster(2);
    Channel<int> tx(cluster.transport(0), 1, 0);
    Channel<int> rx(cluster.transport(1), 0, 0);
    tx.send(7, 1);
    CHECK_THROWS_AS(rx.recv(6).get(), ProtocolError);
}

TEST_CASE("recv on a closed empty channel errors instead of hanging") {
    InprocCluster cluster(2);
    Channel<int> tx(cluster.transport(0), 1, 0);
    Channel<int> rx(cluster.transport(1), 0, 0);
    tx.send(0, 10);
    cluster.close_rank(0);
    // the queued message is still drainable, the next recv fails
    CHECK(rx.recv(0).get() == 10);
    CHECK_THROWS_AS(rx.recv(1).get(), TransportError);
}

TEST_CASE("close fails receives that are already pending") {
    InprocCluster cluster(2);
    Channel<int> rx(cluster.transport(1), 0, 0);
    Future<int> f = rx.recv(0);
    cluster.close_rank(0);
    CHECK_THROWS_AS(f.get(), TransportError);
}

TEST_CASE("1000 random doubles arrive in order in-process") {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> dist(-1e6, 1e6);
    std::vector<double> sent(1000);
    for (double& v : sent) v = dist(rng);

    std::vector<double> got(sent.size());
    run_cluster_inproc(2, [&](Transport& tr) {
        Channel<double> ch(tr, 1 - tr.id().rank, 3);
        if (tr.id().rank == 0) {
            for (std::size_t i = 0; i < sent.size(); ++i) ch.send(i, sent[i]);
        } else {
            for (std::size_t i = 0; i < sent.size(); ++i)
                got[i] = ch.recv(i).get();
        }
    });
    CHECK(got == sent);
}

TEST_CASE("a locality failure propagates out of the cluster run") {
    CHECK_THROWS_AS(run_cluster_inproc(
                        2,
                        [](Transport& tr) {
                            if (tr.id().rank == 1)
                                throw std::runtime_error("locality died");
                        }),
                    std::runtime_error);
}

TEST_CASE("tcp loopback behaves like the in-process transport") {
    const std::vector<double> inproc =
        run_echo_script(200, 77, run_cluster_inproc);
    const std::vector<double> tcp =
        run_echo_script(200, 77, run_cluster_tcp_loopback);
    CHECK(inproc == tcp);  // identical received sequences, bit for bit
}

TEST_CASE("tcp transports carry payloads across three localities") {
    std::vector<double> sums(3, 0.0);
    run_cluster_tcp_loopback(3, [&](Transport& tr) {
        const int rank = tr.id().rank;
        const int right = (rank + 1) % 3;
        const int left = (rank + 2) % 3;
        Channel<double> out(tr, right, 0);
        Channel<double> in(tr, left, 0);
        double token = rank;
        for (int step = 0; step < 10; ++step) {
            out.send(step, token);
            token = in.recv(step).get() + 1.0;
        }
        sums[rank] = token;
    });
    // every rank forwarded ten tokens around the ring
    CHECK(sums[0] + sums[1] + sums[2] > 0.0);
    for (double s : sums) CHECK(s >= 10.0);
}
