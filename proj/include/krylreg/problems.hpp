// Ill-posed test problems: six classical 1D integral-equation discretizations
// plus a synthetic generator with a prescribed singular spectrum and Picard
// coefficients, and Gaussian noise injection at an exact relative level.
//
// The classical kernels use midpoint quadrature. Formulas are frozen; golden
// singular-value snapshots in the test suite guard them against drift.
//
// Adopted defaults (the discretizations leave these free):
//   gravity depth d = 0.375, heat conductivity kappa = 1.

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "krylreg/dense_core.hpp"

namespace krylreg {

struct GeneratedProblem {
    Matrix A;       // m x n, m >= n
    Vector x_true;  // the problem's standard exact solution
};

// name in {shaw, gravity, baart, phillips, heat, deriv2}; n >= 8.
// Throws std::invalid_argument on an unknown name or undersized n.
GeneratedProblem gen_classic(const std::string& name, Index n);

struct SpectrumSpec {
    enum class Kind { Severe, Moderate, Mild };
    Kind kind = Kind::Severe;
    double param = 2.0;  // rho for Severe (>1), alpha otherwise
    Index n = 0;
    double beta = 1.0;  // Picard exponent, > 0

    // sigma_j, 1-based: rho^{-j} (Severe) or j^{-alpha} (Moderate/Mild).
    Vector sigma() const;
    void validate() const;  // throws std::invalid_argument
};

struct PicardProblem {
    Matrix A;  // m x n = U * diag(sigma) * V^T, U and V Haar orthogonal
    Vector x_true;
    Matrix U;      // m x n (leading columns of the Haar factor)
    Vector sigma;  // the prescribed spectrum
    Matrix V;      // n x n
};

// Synthetic problem with |u_i^T b_true| = sigma_i^{1+beta} by construction
// (x_true = sum sigma_i^beta v_i). Deterministic in seed; m >= spec.n.
PicardProblem gen_picard(const SpectrumSpec& spec, Index m, std::uint64_t seed);

struct NoisyRhs {
    Vector b;  // b_true + e
    Vector e;  // Gaussian draw rescaled so ||e|| / ||b_true|| == epsilon
};

NoisyRhs add_noise(const Vector& b_true, double epsilon, std::uint64_t seed);

// A generated problem with its noisy right-hand side, as consumed by the
// solvers and the experiment harness.
struct ProblemInstance {
    std::string name;  // generator token, e.g. "shaw(200)"
    Matrix A;
    Vector x_true;
    Vector b_true;
    Vector e;
    Vector b;
    double epsilon = 0.0;
    std::uint64_t seed = 0;
};

ProblemInstance make_instance(const std::string& name, const GeneratedProblem& p,
                              double epsilon, std::uint64_t seed);

// Text export for cross-checking against external tools: one header line
// "rows cols", then entries row-major, one row per line, full precision.
void write_matrix_text(const std::filesystem::path& path, const Matrix& A);
Matrix read_matrix_text(const std::filesystem::path& path);

}  // namespace krylreg
