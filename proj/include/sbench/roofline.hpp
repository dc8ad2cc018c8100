#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "sbench/membench.hpp"

namespace sbench {

// ---------------------------------------------------------------------------
// Attainable performance: min(CP, AI * BW)
// ---------------------------------------------------------------------------

struct RooflineInputs {
    double cp_lups = 0.0;          // compute ceiling in LUP/s
    double ai_lup_per_byte = 0.0;  // arithmetic intensity
    double bw_bytes_per_s = 0.0;   // measured memory bandwidth
};

double attainable(const RooflineInputs& in);

// ---------------------------------------------------------------------------
// Stencil arithmetic intensity
// ---------------------------------------------------------------------------

/// Bytes of main-memory traffic per lattice site update: one stream of
/// `bytes_per_scalar` per memory transfer. Three transfers when the cache
/// holds three rows (read row, read adjacent row, write), two when implicit
/// cache blocking drops one of the reads.
struct StencilAiSpec {
    int bytes_per_scalar = 8;  // 4 = float, 8 = double
    int transfers_per_lup = 3;

    int bytes_per_lup() const { return bytes_per_scalar * transfers_per_lup; }
    double ai() const { return 1.0 / double(bytes_per_lup()); }
};

/// Jacobi cost per update: three adds and one multiply.
inline constexpr int kFlopsPerLup = 4;

// ---------------------------------------------------------------------------
// Hardware profiles
// ---------------------------------------------------------------------------

struct HardwareProfile {
    std::string name;
    double clock_ghz = 0.0;
    int cores = 0;  // per node
    int dp_flops_per_cycle = 0;
    double peak_gflops = 0.0;  // as published

    double derived_peak_gflops() const {
        return clock_ghz * cores * dp_flops_per_cycle;
    }
    /// Published peak within 1% of clock*cores*flops/cycle; a false return
    /// flags a transcription discrepancy rather than aborting.
    bool peak_consistent(double rel_tol = 0.01) const;
};

/// The four reference nodes the suite was calibrated against. Data, not
/// code: parsed from the same table shipped in data/hardware_profiles.cfg.
std::vector<HardwareProfile> table1_profiles();

/// Profile table format: whitespace-separated columns
///   name clock_ghz cores dp_flops_per_cycle peak_gflops
/// with '#' comment lines.
std::vector<HardwareProfile> parse_profiles(std::istream& in);
std::vector<HardwareProfile> load_profiles(const std::string& path);

// ---------------------------------------------------------------------------
// Expected-peak curves
// ---------------------------------------------------------------------------

/// Memory-roof prediction per measured bandwidth point: the min curve
/// assumes three transfers per update, the max curve two (their ratio is
/// exactly 3/2, the cache-blocking headroom).
struct ExpectedPeakPoint {
    std::size_t workers = 0;
    double min_glups = 0.0;  // transfers = 3
    double max_glups = 0.0;  // transfers = 2
};

std::vector<ExpectedPeakPoint> expected_peak_curves(
    std::span<const BandwidthPoint> bw_points, int bytes_per_scalar);

}  // namespace sbench
