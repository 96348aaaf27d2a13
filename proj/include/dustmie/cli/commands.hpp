#pragma once

#include <cstddef>
#include <iosfwd>

#include "dustmie/cli/config.hpp"
#include "dustmie/cli/sweep_table.hpp"

namespace dustmie::cli {

/// Q_ext over an x or frequency sweep, one column per Ne or radius group.
SweepTable cmd_qext(const RunConfig& config, std::size_t jobs = 1);

/// p(r, h) and, when N0 is set, N_d(r, h) per altitude group.
SweepTable cmd_spectrum(const RunConfig& config, std::size_t jobs = 1);

/// k_dust over an altitude or frequency sweep per Ne group. Without N0 the
/// values are per unit N0 (m^-3).
SweepTable cmd_attenuation(const RunConfig& config, std::size_t jobs = 1);

/// Single-shot link budget, or mean/std of the total over run.trials
/// shadowing draws seeded with seed, seed + 1, ...
SweepTable cmd_pathloss(const RunConfig& config, std::size_t jobs = 1);

SweepTable run_command(const RunConfig& config, std::size_t jobs = 1);

/// Full command line. Returns the process exit code: 0 success, 2 usage or
/// configuration error, 3 numerical failure.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace dustmie::cli
