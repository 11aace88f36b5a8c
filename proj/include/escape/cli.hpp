#pragma once

#include "escape/engine.hpp"
#include "escape/verdict.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace escape {

std::string tool_version();

/// Cascade as a JSON array of objects with keys level, eps_n, sigma_n, ell,
/// p, r, rho, theta, phi, tau, rho_prime, c_n, delta_n (null where undefined).
template <class Real>
std::string cascade_json(const Cascade<Real>& cascade, int indent = 2);

template <class Real>
std::string cascade_table(const Cascade<Real>& cascade);

/// config (canonical form), cascade_echo, tool_version, config_digest.
template <class Real>
std::string manifest_json(const GameConfig& config, const Cascade<Real>& cascade, const RunStats& stats);

std::string verdicts_json(const std::vector<Verdict>& verdicts, int indent = 2);
std::string verdicts_table(const std::vector<Verdict>& verdicts);

/// Runs every checker that applies to the trace file against the config's
/// cascade, streaming the file twice (spacing, then checks).
std::vector<Verdict> verify_trace_file(const std::string& trace_path, const GameConfig& config);

/// Simulates every *.json in `dir` (name order) on `threads` workers and
/// returns the merged result document. Output does not depend on `threads`.
std::string run_sweep(const std::string& dir, unsigned threads, bool* all_pass = nullptr);

/// Worker count for sweep: ESCAPE_SIM_THREADS if set, else hardware concurrency.
unsigned default_sweep_threads();

/// Subcommands params, simulate, verify, plot, sweep. Returns the exit
/// status: 0 success, 1 validation or check failure, 2 usage error.
int cli_dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace escape
