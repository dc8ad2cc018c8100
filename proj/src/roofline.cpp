#include "sbench/roofline.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "sbench/errors.hpp"

namespace sbench {

double attainable(const RooflineInputs& in) {
    if (!(in.cp_lups > 0.0) || !(in.ai_lup_per_byte > 0.0) ||
        !(in.bw_bytes_per_s > 0.0))
        throw ConfigError("roofline inputs must be strictly positive");
    return std::min(in.cp_lups, in.ai_lup_per_byte * in.bw_bytes_per_s);
}

bool HardwareProfile::peak_consistent(double rel_tol) const {
    return std::abs(derived_peak_gflops() - peak_gflops) <=
           rel_tol * peak_gflops;
}

namespace {

// Table values as published; the ThunderX2 row does not factor as
// clock*cores*flops/cycle and peak_consistent() flags it.
constexpr const char* kTable1 =
    "# name               clock_ghz  cores  dp_flops_per_cycle  peak_gflops\n"
    "xeon-e5-2660v3       2.6        20     16                  832\n"
    "kunpeng-916          2.4        64     4                   614\n"
    "thunderx2            2.4        32     8                   1228\n"
    "a64fx                2.2        48     32                  3379\n";

}  // namespace

std::vector<HardwareProfile> parse_profiles(std::istream& in) {
    std::vector<HardwareProfile> profiles;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto first = line.find_first_not_of(" \t");
        if (first == std::string::npos || line[first] == '#') continue;
        std::istringstream fields(line);
        HardwareProfile p;
        if (!(fields >> p.name >> p.clock_ghz >> p.cores >>
              p.dp_flops_per_cycle >> p.peak_gflops))
            throw ConfigError("bad profile record on line " +
                              std::to_string(lineno) + ": '" + line + "'");
        if (p.clock_ghz <= 0 || p.cores <= 0 || p.dp_flops_per_cycle <= 0 ||
            p.peak_gflops <= 0)
            throw ConfigError("profile '" + p.name +
                              "' has non-positive fields");
        profiles.push_back(std::move(p));
    }
    return profiles;
}

std::vector<HardwareProfile> load_profiles(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open profile table '" + path + "'");
    return parse_profiles(in);
}

std::vector<HardwareProfile> table1_profiles() {
    std::istringstream in(kTable1);
    return parse_profiles(in);
}

std::vector<ExpectedPeakPoint> expected_peak_curves(
    std::span<const BandwidthPoint> bw_points, int bytes_per_scalar) {
    if (bw_points.empty())
        throw ConfigError("expected-peak curves need a bandwidth sweep");
    const StencilAiSpec min_spec{bytes_per_scalar, 3};
    const StencilAiSpec max_spec{bytes_per_scalar, 2};
    std::vector<ExpectedPeakPoint> curve;
    curve.reserve(bw_points.size());
    for (const BandwidthPoint& bp : bw_points) {
        ExpectedPeakPoint p;
        p.workers = bp.workers;
        p.min_glups = double(bp.gbps) / min_spec.bytes_per_lup();
        p.max_glups = double(bp.gbps) / max_spec.bytes_per_lup();
        curve.push_back(p);
    }
    return curve;
}

}  // namespace sbench
