#pragma once

#include <filesystem>
#include <iosfwd>

#include "kolmodamp/config.hpp"
#include "kolmodamp/io.hpp"

namespace kolmodamp::harness {

// CLI exit codes (also returned by the C API as kd_status values).
enum ExitCode : int {
    exit_ok = 0,
    exit_error = 1,               // unexpected failure
    exit_insufficient_horizon = 2,
    exit_verdict_failed = 3,
    exit_config_error = 4,
    exit_solver_error = 5,        // CFL violation / non-finite state
    exit_verify_mismatch = 6,
    exit_insufficient_sweep = 7,
};

struct RunOutcome {
    int exit_code = exit_ok;
    bool insufficient_horizon = false;
    std::string error;
    DiagnosticsReport report;
    ForceNumbers numbers;
    std::filesystem::path run_dir;
};

/* Executes one experiment into out_dir (created; must not already contain
   files). Produces config.kv, ledger.ndjson + ledger.csv, optional
   snapshots/ and checkpoints/, report.kv, verdicts.tsv and manifest.json.
   Solver errors keep whatever output exists (last checkpoint retained)
   and are reported through the exit code. */
RunOutcome run_experiment(const ExperimentConfig& cfg, const std::filesystem::path& out_dir);

// As run_experiment, but starts from a checkpoint written by a compatible
// config; the emitted ledger covers the remaining steps only.
RunOutcome resume_experiment(const ExperimentConfig& cfg, const std::filesystem::path& checkpoint,
                             const std::filesystem::path& out_dir);

struct SweepOutcome {
    int exit_code = exit_ok;
    std::string error;
    SweepVerdicts verdicts;
    std::vector<std::string> point_errors;
};

/* Runs one experiment per sweep ell value into out_dir/point_NN_ell_V/.
   Points whose directory already holds a complete run for the identical
   point config are reused without re-simulation, so re-invoking the sweep
   on a finished directory only re-aggregates. Aggregation proceeds when
   at least 4 points survive. */
SweepOutcome sweep_experiment(const ExperimentConfig& cfg, const std::filesystem::path& out_dir);

// Recomputes digests, diagnostics and verdicts of a finished run
// directory and compares against the stored artifacts. Nonzero on any
// mismatch or failed verdict; findings go to log.
int verify_run_dir(const std::filesystem::path& run_dir, std::ostream& log);

// Prints the stored report and verdicts; exit code aggregates verdicts.
int report_run_dir(const std::filesystem::path& run_dir, std::ostream& log);

// Flat key = value record helpers (report.kv files).
std::string serialize_kv(const std::vector<std::pair<std::string, std::string>>& entries);
std::map<std::string, std::string> parse_kv(const std::string& text);

} // namespace kolmodamp::harness
