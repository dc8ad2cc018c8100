// sbench: task-parallel stencil benchmark suite
//
// Subcommands: stream | stencil1d | stencil2d | roofline | verify | report.
// Every benchmark emits gnuplot-ready .dat series plus JSON-lines run
// records under --out-dir (or $BENCH_OUT_DIR).

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>

#include "sbench/membench.hpp"
#include "sbench/records.hpp"
#include "sbench/roofline.hpp"
#include "sbench/stencil1d.hpp"
#include "sbench/stencil2d.hpp"
#include "sbench/verify.hpp"

namespace {

using namespace sbench;

struct OutputPaths {
    std::string out_dir = ".";

    std::string dat(const std::string& name) const {
        return out_dir + "/" + name;
    }
    std::string records() const { return out_dir + "/records.jsonl"; }

    void ensure_exists() const {
        std::filesystem::create_directories(out_dir);
    }
};

std::string fmt_checksum(double checksum) {
    std::ostringstream os;
    os.precision(15);
    os << checksum;
    return os.str();
}

// ---------------------------------------------------------------------------
// stream
// ---------------------------------------------------------------------------

struct StreamCli {
    StreamConfig cfg;
    std::vector<std::size_t> sweep = {1};
};

int cmd_stream(const StreamCli& cli, const OutputPaths& out) {
    StreamConfig cfg = cli.cfg;
    cfg.workers_sweep = cli.sweep;
    const std::vector<BandwidthPoint> points = stream_copy(cfg);

    out.ensure_exists();
    DatWriter dat(out.dat("stream.dat"), /*append=*/false);
    for (const BandwidthPoint& p : points) {
        const double mbps = double(p.bytes_moved) / p.best_seconds / 1e6;
        dat.point(double(p.workers), mbps);

        RunRecord rec;
        rec.benchmark = "stream";
        rec.config = {{"elements", std::to_string(cfg.elements)},
                      {"runs", std::to_string(cfg.runs)},
                      {"workers", std::to_string(p.workers)}};
        rec.timestamp = utc_timestamp_now();
        rec.wall_seconds = p.best_seconds;
        rec.metric_name = "gbps";
        rec.metric_value = p.gbps;
        rec.work_units = p.bytes_moved;
        rec.checksum = p.checksum;
        rec.runs = cfg.runs;
        rec.best_of = "min-time";
        append_record(out.records(), rec);

        std::cout << "stream: workers=" << p.workers << "  " << p.gbps
                  << " GB/s  (best of " << cfg.runs << ", "
                  << p.best_seconds << " s/pass)\n";
    }
    return 0;
}

// ---------------------------------------------------------------------------
// stencil1d
// ---------------------------------------------------------------------------

struct Stencil1DCli {
    std::uint64_t points = 1000000;
    int steps = 100;
    int localities = 1;
    std::size_t workers = 1;
    std::size_t nlp = 4;
    std::string mode = "strong";
    std::string transport = "inproc";
    int runs = 3;
    std::vector<int> localities_sweep;  // inproc convenience
    std::string locality;               // tcp: "rank/L"
    std::string peers;                  // tcp: host:port,host:port,...
    double alpha = 1.0, dt = 1.0, dx = 2.0;
};

Stencil1DConfig make_1d_config(const Stencil1DCli& cli, int localities) {
    Stencil1DConfig cfg;
    cfg.total_points = cli.mode == "weak"
                           ? cli.points * std::uint64_t(localities)
                           : cli.points;
    cfg.steps = cli.steps;
    cfg.nlp = cli.nlp;
    cfg.params = {cli.alpha, cli.dt, cli.dx};
    return cfg;
}

void report_1d(const Stencil1DCli& cli, int localities, double best_seconds,
               int best_run, double checksum, DatWriter& dat,
               const OutputPaths& out) {
    dat.point(double(localities), best_seconds);

    RunRecord rec;
    rec.benchmark = "stencil1d";
    rec.config = {{"points", std::to_string(cli.points)},
                  {"steps", std::to_string(cli.steps)},
                  {"localities", std::to_string(localities)},
                  {"workers", std::to_string(cli.workers)},
                  {"nlp", std::to_string(cli.nlp)},
                  {"mode", cli.mode},
                  {"transport", cli.transport}};
    rec.timestamp = utc_timestamp_now();
    rec.wall_seconds = best_seconds;
    rec.metric_name = "seconds";
    rec.metric_value = best_seconds;
    rec.work_units = make_1d_config(cli, localities).total_points *
                     std::uint64_t(cli.steps);
    rec.checksum = checksum;
    rec.run_index = best_run;
    rec.runs = cli.runs;
    rec.best_of = "min-time";
    append_record(out.records(), rec);

    std::cout << "stencil1d: L=" << localities << "  " << best_seconds
              << " s (best of " << cli.runs
              << ")  checksum=" << fmt_checksum(checksum) << "\n";
}

int cmd_stencil1d(const Stencil1DCli& cli, const OutputPaths& out) {
    out.ensure_exists();
    const std::string dat_name = "stencil1d_" + cli.mode + ".dat";

    if (cli.transport == "tcp") {
        // one locality per process
        int rank = 0, world = 0;
        if (std::sscanf(cli.locality.c_str(), "%d/%d", &rank, &world) != 2)
            throw ConfigError("--locality must be <rank>/<total>");
        std::vector<std::string> peers;
        std::stringstream ss(cli.peers);
        for (std::string addr; std::getline(ss, addr, ',');)
            peers.push_back(addr);
        if (int(peers.size()) != world)
            throw ConfigError("--peers must list all localities in rank "
                              "order (own entry included)");

        const auto [host, port] = [&] {
            auto pos = peers[rank].rfind(':');
            return std::make_pair(peers[rank].substr(0, pos),
                                  std::uint16_t(std::stoi(
                                      peers[rank].substr(pos + 1))));
        }();
        TcpTransport tr(LocalityId{rank, world}, tcp_listen(host, port),
                        peers);
        Executor ex(cli.workers);
        const Stencil1DConfig cfg = make_1d_config(cli, world);

        double best = 0.0;
        int best_run = 0;
        double checksum = 0.0;
        for (int r = 0; r < cli.runs; ++r) {
            const LocalityResult res = solve_1d_locality(tr, ex, cfg);
            if (r == 0 || res.seconds < best) {
                best = res.seconds;
                best_run = r;
            }
            if (res.global_checksum) checksum = *res.global_checksum;
        }
        if (rank == 0) {
            DatWriter dat(out.dat(dat_name), /*append=*/true);
            report_1d(cli, world, best, best_run, checksum, dat, out);
        }
        return 0;
    }

    std::vector<int> sweep = cli.localities_sweep;
    if (sweep.empty()) sweep = {cli.localities};
    DatWriter dat(out.dat(dat_name), /*append=*/sweep.size() == 1);
    for (int localities : sweep) {
        const Stencil1DConfig cfg = make_1d_config(cli, localities);
        double best = 0.0;
        int best_run = 0;
        double checksum = 0.0;
        for (int r = 0; r < cli.runs; ++r) {
            const LocalityResult res =
                run_1d_inproc(cfg, localities, cli.workers);
            if (r == 0 || res.seconds < best) {
                best = res.seconds;
                best_run = r;
            }
            checksum = res.global_checksum.value_or(checksum);
        }
        report_1d(cli, localities, best, best_run, checksum, dat, out);
    }
    return 0;
}

// ---------------------------------------------------------------------------
// stencil2d
// ---------------------------------------------------------------------------

struct Stencil2DCli {
    Run2DConfig cfg;
    std::string precision = "f64";
    std::string kernel = "scalar";
    std::vector<std::size_t> workers_sweep;
};

int cmd_stencil2d(const Stencil2DCli& cli, const OutputPaths& out) {
    Run2DConfig cfg = cli.cfg;
    cfg.precision = cli.precision == "f32" ? Precision::f32 : Precision::f64;
    cfg.kernel =
        cli.kernel == "packed" ? Kernel2D::packed : Kernel2D::scalar;

    out.ensure_exists();
    const std::string dat_name =
        "stencil2d_" + cli.kernel + "_" + cli.precision + ".dat";
    std::vector<std::size_t> sweep = cli.workers_sweep;
    if (sweep.empty()) sweep = {cfg.workers};
    DatWriter dat(out.dat(dat_name), /*append=*/sweep.size() == 1);

    for (std::size_t workers : sweep) {
        cfg.workers = workers;
        const Run2DResult res = run_2d(cfg);

        // milli-GLUP scale: plots divide by 1000 back to GLUP/s
        dat.point(double(workers), res.best.glups * 1000.0);

        RunRecord rec;
        rec.benchmark = "stencil2d";
        rec.config = {{"width", std::to_string(cfg.width)},
                      {"height", std::to_string(cfg.height)},
                      {"steps", std::to_string(cfg.steps)},
                      {"workers", std::to_string(workers)},
                      {"precision", cli.precision},
                      {"kernel", cli.kernel},
                      {"lanes", std::to_string(cfg.lanes)}};
        rec.timestamp = utc_timestamp_now();
        rec.wall_seconds = res.best.seconds;
        rec.metric_name = "glups";
        rec.metric_value = res.best.glups;
        rec.work_units = res.best.updates;
        rec.checksum = res.checksum;
        rec.run_index = res.best_run;
        rec.runs = cfg.runs;
        rec.best_of = "max-glups";
        append_record(out.records(), rec);

        std::cout << "stencil2d: workers=" << workers << "  "
                  << res.best.glups << " GLUP/s (best of " << cfg.runs
                  << ")  checksum=" << fmt_checksum(res.checksum) << "\n";
    }
    return 0;
}

// ---------------------------------------------------------------------------
// roofline
// ---------------------------------------------------------------------------

struct RooflineCli {
    std::string bw_dat;
    std::string precision = "f64";
    int transfers = 3;
    std::string out_name = "expected_peak.dat";
    std::string profiles_path;  // optional: validate a profile table
    bool check_profiles = false;
};

int cmd_roofline(const RooflineCli& cli, const OutputPaths& out) {
    if (cli.check_profiles) {
        const std::vector<HardwareProfile> profiles =
            cli.profiles_path.empty() ? table1_profiles()
                                      : load_profiles(cli.profiles_path);
        bool all_ok = true;
        for (const HardwareProfile& p : profiles) {
            const bool ok = p.peak_consistent();
            all_ok = all_ok && ok;
            std::cout << p.name << ": " << p.clock_ghz << " GHz x " << p.cores
                      << " cores x " << p.dp_flops_per_cycle
                      << " FLOP/cycle = " << p.derived_peak_gflops()
                      << " GFLOP/s, published " << p.peak_gflops
                      << (ok ? "  [consistent]" : "  [DISCREPANCY]") << "\n";
        }
        // a flagged row is documentation, not an error
        return 0;
    }

    if (cli.bw_dat.empty())
        throw ConfigError("roofline needs --bw-dat (or --check-profiles)");
    std::ifstream in(cli.bw_dat);
    if (!in)
        throw ConfigError("cannot open bandwidth series '" + cli.bw_dat + "'");
    std::vector<BandwidthPoint> points;
    double workers = 0, mbps = 0;
    while (in >> workers >> mbps) {
        BandwidthPoint p;
        p.workers = std::size_t(workers);
        p.gbps = mbps / 1000.0;
        points.push_back(p);
    }
    if (points.empty())
        throw ConfigError("no '<workers> <mbps>' lines in " + cli.bw_dat);

    const int bytes_per_scalar = cli.precision == "f32" ? 4 : 8;
    const auto curves = expected_peak_curves(points, bytes_per_scalar);

    out.ensure_exists();
    DatWriter dat(out.dat(cli.out_name), /*append=*/false);
    for (const ExpectedPeakPoint& p : curves) {
        const double glups = cli.transfers == 2 ? p.max_glups : p.min_glups;
        dat.point(double(p.workers), glups);
        std::cout << "roofline: workers=" << p.workers << "  expected "
                  << glups << " GLUP/s (" << cli.transfers
                  << " transfers/update, "
                  << (cli.precision == "f32" ? "float" : "double") << ")\n";
    }
    return 0;
}

// ---------------------------------------------------------------------------
// verify / report
// ---------------------------------------------------------------------------

int cmd_verify(std::uint64_t seed, bool quick) {
    VerifyOptions opt;
    opt.seed = seed;
    opt.quick = quick;
    const std::vector<CheckResult> results = verify_all(opt);
    for (const CheckResult& r : results)
        std::cout << (r.pass ? "[PASS] " : "[FAIL] ") << r.name << ": "
                  << r.detail << "\n";
    return all_passed(results) ? 0 : 1;
}

int cmd_report(const std::string& records_path) {
    const std::vector<RunRecord> recs = load_records(records_path);
    if (recs.empty()) {
        std::cout << "no records in " << records_path << "\n";
        return 0;
    }

    // best value per (benchmark, full config) and scaling series
    std::map<std::string, const RunRecord*> best;
    for (const RunRecord& r : recs) {
        std::string key = r.benchmark;
        for (const auto& [k, v] : r.config) key += " " + k + "=" + v;
        auto it = best.find(key);
        const bool better =
            it == best.end() ||
            (r.metric_name == "seconds"
                 ? r.metric_value < it->second->metric_value
                 : r.metric_value > it->second->metric_value);
        if (better) best[key] = &r;
    }
    std::cout << recs.size() << " records, " << best.size()
              << " distinct configs\n\n";
    for (const auto& [key, rec] : best)
        std::cout << rec->metric_value << " " << rec->metric_name << "  ["
                  << key << "]\n";

    // speedup against the smallest sweep value per series
    for (const char* axis : {"workers", "localities"}) {
        std::map<std::string, std::map<int, double>> series;
        for (const auto& [key, rec] : best) {
            auto it = rec->config.find(axis);
            if (it == rec->config.end()) continue;
            std::string skey = rec->benchmark;
            for (const auto& [k, v] : rec->config)
                if (k != axis) skey += " " + k + "=" + v;
            series[skey][std::stoi(it->second)] = rec->metric_value;
        }
        for (const auto& [skey, pts] : series) {
            if (pts.size() < 2) continue;
            std::cout << "\nscaling over " << axis << "  [" << skey << "]\n";
            const auto& [x0, y0] = *pts.begin();
            for (const auto& [x, y] : pts) {
                // time metrics scale down, throughput metrics scale up
                const double speedup = y0 == 0 ? 0 : (y < y0 ? y0 / y : y / y0);
                std::cout << "  " << axis << "=" << x << "  speedup vs " << x0
                          << ": " << speedup << "\n";
            }
        }
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"task-parallel stencil benchmark suite"};
    app.require_subcommand(1);

    OutputPaths out;
    if (const char* env = std::getenv("BENCH_OUT_DIR")) out.out_dir = env;
    app.add_option("--out-dir", out.out_dir,
                   "directory for .dat series and records.jsonl")
        ->envname("BENCH_OUT_DIR");

    StreamCli stream;
    CLI::App* stream_cmd =
        app.add_subcommand("stream", "STREAM COPY bandwidth probe");
    stream_cmd->set_config("--config");
    stream_cmd->add_option("--elements", stream.cfg.elements,
                           "doubles per array");
    stream_cmd->add_option("--runs", stream.cfg.runs, "timed passes");
    stream_cmd->add_option("--workers-sweep", stream.sweep, "core counts")
        ->delimiter(',');

    Stencil1DCli s1;
    CLI::App* s1_cmd = app.add_subcommand(
        "stencil1d", "distributed 1D heat equation solver");
    s1_cmd->set_config("--config");
    s1_cmd->add_option("--points", s1.points,
                       "stencil points (per node in weak mode)");
    s1_cmd->add_option("--steps", s1.steps, "time steps");
    s1_cmd->add_option("--localities", s1.localities, "locality count");
    s1_cmd->add_option("--workers", s1.workers, "workers per locality");
    s1_cmd->add_option("--nlp", s1.nlp, "partitions per locality");
    s1_cmd->add_option("--mode", s1.mode, "strong|weak")
        ->check(CLI::IsMember({"strong", "weak"}));
    s1_cmd->add_option("--transport", s1.transport, "inproc|tcp")
        ->check(CLI::IsMember({"inproc", "tcp"}));
    s1_cmd->add_option("--runs", s1.runs, "repetitions (min time reported)");
    s1_cmd->add_option("--localities-sweep", s1.localities_sweep,
                       "run several locality counts (inproc)")
        ->delimiter(',');
    s1_cmd->add_option("--locality", s1.locality,
                       "tcp mode: this process's <rank>/<total>");
    s1_cmd->add_option("--peers", s1.peers,
                       "tcp mode: host:port for every rank, comma separated");
    s1_cmd->add_option("--alpha", s1.alpha, "diffusion constant");
    s1_cmd->add_option("--dt", s1.dt, "time step size");
    s1_cmd->add_option("--dx", s1.dx, "cell spacing");

    Stencil2DCli s2;
    CLI::App* s2_cmd =
        app.add_subcommand("stencil2d", "shared-memory 2D Jacobi solver");
    s2_cmd->set_config("--config");
    s2_cmd->add_option("--width", s2.cfg.width, "grid width");
    s2_cmd->add_option("--height", s2.cfg.height, "grid height");
    s2_cmd->add_option("--steps", s2.cfg.steps, "time steps");
    s2_cmd->add_option("--workers", s2.cfg.workers, "worker count");
    s2_cmd->add_option("--precision", s2.precision, "f32|f64")
        ->check(CLI::IsMember({"f32", "f64"}));
    s2_cmd->add_option("--kernel", s2.kernel, "scalar|packed")
        ->check(CLI::IsMember({"scalar", "packed"}));
    s2_cmd->add_option("--lanes", s2.cfg.lanes, "pack lanes (packed kernel)");
    s2_cmd->add_option("--runs", s2.cfg.runs,
                       "repetitions (max GLUP/s reported)");
    s2_cmd->add_option("--workers-sweep", s2.workers_sweep,
                       "run several worker counts")
        ->delimiter(',');

    RooflineCli roofline;
    CLI::App* roof_cmd = app.add_subcommand(
        "roofline", "expected-peak curves from a bandwidth series");
    roof_cmd->set_config("--config");
    roof_cmd->add_option("--bw-dat", roofline.bw_dat,
                         "stream .dat series (workers mbps)");
    roof_cmd->add_option("--precision", roofline.precision, "f32|f64")
        ->check(CLI::IsMember({"f32", "f64"}));
    roof_cmd->add_option("--transfers", roofline.transfers,
                         "memory transfers per update")
        ->check(CLI::IsMember({2, 3}));
    roof_cmd->add_option("--out", roofline.out_name, "output .dat name");
    roof_cmd->add_flag("--check-profiles", roofline.check_profiles,
                       "print hardware profile consistency and exit");
    roof_cmd->add_option("--profiles", roofline.profiles_path,
                         "profile table to check instead of the built-in");

    std::uint64_t verify_seed = 42;
    bool verify_quick = false;
    CLI::App* verify_cmd =
        app.add_subcommand("verify", "run the oracle suite");
    verify_cmd->add_option("--seed", verify_seed, "rng seed");
    verify_cmd->add_flag("--quick", verify_quick, "smaller problem sizes");

    std::string report_records;
    CLI::App* report_cmd =
        app.add_subcommand("report", "summarize recorded runs");
    report_cmd->add_option("--records", report_records,
                           "records file (default <out-dir>/records.jsonl)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (stream_cmd->parsed()) return cmd_stream(stream, out);
        if (s1_cmd->parsed()) return cmd_stencil1d(s1, out);
        if (s2_cmd->parsed()) return cmd_stencil2d(s2, out);
        if (roof_cmd->parsed()) return cmd_roofline(roofline, out);
        if (verify_cmd->parsed()) return cmd_verify(verify_seed, verify_quick);
        if (report_cmd->parsed())
            return cmd_report(report_records.empty() ? out.records()
                                                     : report_records);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
