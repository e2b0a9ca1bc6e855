// sphkep/verify.hpp
//
// Self-check battery: every module's invariants exercised on deterministic
// pseudo-random data, reported as a flat list of named checks. The CLI turns
// this into the `verify` subcommand; tests and the acceptance harness call
// it directly. Output contains no timing or other nondeterministic data, so
// identical (thorough, seed) inputs produce identical results.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace sphkep {

struct CheckResult {
    std::string suite;
    std::string name;
    bool pass{false};
    std::string detail;  // measured values, deterministic formatting
};

/// Run every suite (projection, flat Kepler, spherical Kepler, dynamics,
/// probe). `thorough` raises the sample counts roughly 3x; the default sizes
/// keep the full battery interactive. Checks never throw: an unexpected
/// exception is itself a failed check.
[[nodiscard]] std::vector<CheckResult> run_verification(bool thorough = false,
                                                        std::uint64_t seed = 0);

/// True when every check passed.
[[nodiscard]] bool all_passed(const std::vector<CheckResult>& results);

} // namespace sphkep
