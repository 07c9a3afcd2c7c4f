#pragma once

// Command-line front door. Exit codes: 0 success/PASS, 1 input error, 2 solver did not converge,
// 3 FAIL verdict, 4 numerical failure.

#include <cstdint>
#include <iosfwd>

#include "acx/config.hpp"

namespace acx {

enum ExitCode : int { kExitOk = 0, kExitInput = 1, kExitNoConvergence = 2, kExitFail = 3, kExitNumerical = 4 };

inline constexpr const char* kSchema = "acx/1";
inline constexpr std::uint64_t kDefaultSeed = 1;

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// The deterministic part of an equivalence-suite run. Keys: "agreement", "triangle", "regularization".
Json equivalence_suite(const Json& config, std::uint64_t seed, bool& pass);

}  // namespace acx
