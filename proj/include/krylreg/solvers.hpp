// Projected regularization solvers on the Golub-Kahan bases, plus the dense
// TSVD reference. Every solver records its full iterate history; the harness
// and the diagnostics replay the error curves from these traces.
//
// The per-step residual column means something different per method:
//   lsqr   ||b - A x_k||            nonincreasing in k
//   cgme   ||x_ls - x_k||           distance to the unregularized least-squares
//                                   solution; nonincreasing, unlike the data
//                                   residual of the same iterates
//   lsmr   ||A^T (b - A x_k)||      nonincreasing in k
//   mcgme  ||b - A x_k||            no monotonicity guarantee
//   tsvd   ||b - A x_k||

#pragma once

#include <string>
#include <vector>

#include "krylreg/bidiag.hpp"
#include "krylreg/problems.hpp"

namespace krylreg {

enum class Method { Lsqr, Cgme, Lsmr, Mcgme, Tsvd };

std::string method_name(Method m);
Method parse_method(const std::string& name);  // throws on unknown names
std::string residual_description(Method m);    // for trace file headers

struct SolverTrace {
    Method method = Method::Lsqr;
    std::vector<Vector> iterates;     // x_1 .. x_K
    std::vector<double> rel_errors;   // ||x_k - x_true|| / ||x_true||
    std::vector<double> residuals;    // see the table above
    std::vector<double> data_residuals;  // cgme only: ||b - A x_k||
    Index k_star = 0;                 // 1-based; smallest argmin of rel_errors
    double best_error = 0.0;
    bool truncated = false;           // history ends before the requested kmax
};

// Shared factorization for running several methods on one instance. Depth
// kmax is clamped to n; breakdown stops the recurrence early.
BidiagFactorization solver_factorization(const ProblemInstance& inst,
                                         Index kmax);

SolverTrace lsqr_trace(const ProblemInstance& inst,
                       const BidiagFactorization& fact);
SolverTrace cgme_trace(const ProblemInstance& inst,
                       const BidiagFactorization& fact);
SolverTrace lsmr_trace(const ProblemInstance& inst,
                       const BidiagFactorization& fact);
SolverTrace mcgme_trace(const ProblemInstance& inst,
                        const BidiagFactorization& fact);
SolverTrace tsvd_trace(const ProblemInstance& inst, Index kmax);

// One-shot entry points: factorize internally (TSVD skips that).
SolverTrace lsqr_trace(const ProblemInstance& inst, Index kmax);
SolverTrace cgme_trace(const ProblemInstance& inst, Index kmax);
SolverTrace lsmr_trace(const ProblemInstance& inst, Index kmax);
SolverTrace mcgme_trace(const ProblemInstance& inst, Index kmax);
SolverTrace run_method(Method m, const ProblemInstance& inst, Index kmax);

// SVD-expansion filter factors of the step-k iterate:
//   f_i = 1 - prod_j (theta_j^2 - sigma_i^2) / theta_j^2
// where theta are the Ritz values of the step (singular values of the
// rectangular bidiagonal block for lsqr, of its square part for cgme) and
// sigma is the spectrum the expansion is written in. Only meaningful while
// the products stay conditioned (small k); the identity tests quantify this.
struct FilterVector {
    Vector f;
    Method method = Method::Lsqr;
    Index k = 0;
};

FilterVector filter_factors(const BidiagFactorization& fact,
                            const Vector& sigma, Method method, Index k);

}  // namespace krylreg
