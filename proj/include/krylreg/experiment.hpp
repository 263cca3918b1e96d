// Experiment harness: expands a config grid (problems x epsilons x seeds),
// computes the requested method traces in a work pool, and writes the output
// tree. summary.csv is byte-deterministic for a fixed config; wall-clock
// measurements live in timings.csv so the deterministic outputs stay clean.
//
// Files written into output_dir:
//   trace_{problem}_{method}_{eps}_{seed}.csv   per-step error curves
//   summary.csv   one row per (cell, method): k_star, best_error, k0
//   timings.csv   wall_time_ms for the same rows
//   audit_{problem}_{eps}_{seed}.csv, sharpness.csv   when audits = true
//   plot_{problem}_{eps}_{seed}.svg   rendered by plot_traces from traces

#pragma once

#include <cstdint>
#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "krylreg/config.hpp"
#include "krylreg/solvers.hpp"

namespace krylreg {

struct SummaryRow {
    std::string problem;  // canonical token
    Index n = 0;
    double epsilon = 0.0;
    std::uint64_t seed = 0;
    std::string method;  // method name, or "failed" for a broken cell
    Index k_star = 0;
    double best_error = 0.0;
    Index k0 = -1;  // TSVD transition index when TSVD ran in the cell
    double wall_time_ms = 0.0;
};

// File-name builders shared by the writers, the plot reader, and the tests.
// epsilon is rendered with %g; canonical problem tokens contain no '_', so
// names parse unambiguously from the right.
std::string trace_filename(const std::string& token, Method method,
                           double epsilon, std::uint64_t seed);
std::string audit_filename(const std::string& token, double epsilon,
                           std::uint64_t seed);
std::string plot_filename(const std::string& token, const std::string& epsilon,
                          const std::string& seed);

// Runs the grid and writes traces + summary.csv + timings.csv (and the audit
// outputs when cfg.audits). Returns 0, or 1 when any cell failed; failed
// cells appear in summary.csv with method = "failed" and the run continues.
int run_experiment(const ExperimentConfig& cfg, std::ostream& log);

// Runs only the diagnostics: per-cell inequality audit tables plus the
// randomized-sketch sharpness study (methods list is ignored). Returns 0, or
// 1 when a cell fails or any audit pass rate drops below 0.999.
int run_audit(const ExperimentConfig& cfg, std::ostream& log);

// Re-renders SVG plots from the trace CSVs in dir, one per (problem,
// epsilon, seed) group. Returns 0, 1 when traces are missing or corrupt,
// 2 when dir is not a directory.
int plot_traces(const std::filesystem::path& dir, std::ostream& log);

}  // namespace krylreg
