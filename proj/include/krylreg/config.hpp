// Experiment configuration: a line-oriented key = value text format.
//
//   # grid over two problems, one noise level, three seeds
//   problems   = shaw(1000), picard(200, severe, 2.0, 0.5)
//   epsilons   = 1e-3
//   seeds      = 0, 1, 2
//   kmax       = 60
//   methods    = lsqr, cgme, lsmr, mcgme, tsvd
//   audits     = false
//   output_dir = out
//
// '#' starts a comment, blank lines are skipped, lists are comma-separated.
// problems, epsilons, seeds, kmax, methods, and output_dir are mandatory;
// audits defaults to false. Unknown keys, malformed tokens, and empty
// mandatory lists are errors carrying the offending line and field.

#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "krylreg/problems.hpp"
#include "krylreg/solvers.hpp"

namespace krylreg {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// One entry of the problems list, either a classic 1D generator or a
// synthetic-spectrum instance. token is the canonical text form; it names
// trace files and summary rows.
struct ProblemToken {
    std::string token;
    bool picard = false;
    std::string classic;  // generator name when !picard
    Index n = 0;
    SpectrumSpec spec;  // filled when picard
};

struct ExperimentConfig {
    std::vector<ProblemToken> problems;
    std::vector<double> epsilons;
    std::vector<std::uint64_t> seeds;
    Index kmax = 0;
    std::vector<Method> methods;
    bool audits = false;
    std::filesystem::path output_dir;
};

// Builds the instance a token describes.
ProblemInstance instantiate(const ProblemToken& prob, double epsilon,
                            std::uint64_t seed);

// Parses configuration text; throws ConfigError with line/field diagnostics.
ExperimentConfig parse_config_text(const std::string& text);

// Reads and parses a config file; unreadable path is a ConfigError too.
ExperimentConfig load_config(const std::filesystem::path& path);

}  // namespace krylreg
