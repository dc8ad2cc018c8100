#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace sbench {

struct CheckResult {
    std::string name;
    bool pass = false;
    std::string detail;
};

struct VerifyOptions {
    std::uint64_t seed = 42;
    bool quick = false;  // smaller desk sizes for fast pre-run checks
    /// Test hook: flips one halo lane between packed sweeps so the
    /// equivalence oracle can be shown to catch layout corruption.
    bool corrupt_shuffle = false;
};

/// Oracle suite: serial-oracle and partition-invariance checks for the 1D
/// solver, packed/scalar equivalence and worker invariance for the 2D
/// solver, layout and halo oracles, roofline and throughput-formula units.
/// Deterministic under a fixed seed.
std::vector<CheckResult> verify_all(const VerifyOptions& opt = {});

bool all_passed(const std::vector<CheckResult>& results);

}  // namespace sbench
