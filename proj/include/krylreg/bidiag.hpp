// Lanczos (Golub-Kahan) bidiagonalization with full reorthogonalization:
// A Q_k = P_{k+1} B_k with B_k lower bidiagonal, plus one trailing half-step
// so alpha_{k+1} and q_{k+1} are available without a second factorization.
//
// The factorization keeps every basis vector (desk scale); all the spectral
// diagnostics in this library are built from these bases.

#pragma once

#include "krylreg/dense_core.hpp"

namespace krylreg {

struct BidiagFactorization {
    Matrix P;      // m x (k+1), orthonormal, P.col(0) = b / ||b||
    Matrix Q;      // n x k, orthonormal
    Vector alpha;  // alpha_1..alpha_k, positive
    Vector beta;   // beta_1..beta_{k+1}; beta_1 = ||b||
    Index k = 0;
    bool terminated = false;   // a recurrence coefficient fell below tolerance
    Index first_breakdown = 0; // first step whose alpha or beta dipped; 0 if none

    // Lookahead from the trailing half-step. At k = n this is the zero
    // extension (alpha_{n+1} = 0, q_{n+1} = 0); after a beta-side termination
    // there is no usable lookahead and has_next is false.
    bool has_next = false;
    double alpha_next = 0.0;
    Vector q_next;

    double norm_A = 0.0;  // spectral norm used for the breakdown threshold

    // Projected matrices at any step j <= k.
    Matrix Bk(Index j) const;         // (j+1) x j lower bidiagonal
    Matrix Bbar(Index j) const;       // j x j, the first j rows
    Matrix Bbar_next(Index j) const;  // (j+1) x (j+1) = (Bk(j), alpha_{j+1} e_{j+1})

    // alpha_{j+1} as used by Bbar_next: stored coefficient for j < k,
    // the lookahead for j = k.
    double alpha_after(Index j) const;

    // q_{i+1} as a column (0-based i <= k; i = k is the lookahead column).
    Vector q_col(Index i) const;
};

// Runs min(kmax, breakdown) steps. reorth = true reorthogonalizes every new
// basis vector against all previous ones, classical Gram-Schmidt with one
// refinement pass, on both bases. stop_on_breakdown = false runs through a
// coefficient dip (the audits need full factorizations); the dip is still
// recorded in first_breakdown. norm_A, when positive, skips the internal
// spectral-norm computation.
//
// Throws std::invalid_argument for kmax < 1, kmax > n, or ||b|| = 0.
BidiagFactorization bidiagonalize(const Matrix& A, const Vector& b, Index kmax,
                                  bool reorth = true,
                                  bool stop_on_breakdown = true,
                                  double norm_A = 0.0);

struct ProjectedMatrices {
    Matrix Bk;           // (k+1) x k
    Matrix Bbar_k;       // k x k
    Matrix Bbar_kplus1;  // (k+1) x (k+1), empty unless has_next
    bool has_next = false;
};

ProjectedMatrices projected(const BidiagFactorization& fact);

// Relative breakdown threshold: a coefficient below this times ||A|| ends the
// recurrence.
inline constexpr double kBreakdownTol = 1e-14;

}  // namespace krylreg
