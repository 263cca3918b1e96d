// Dense kernels shared by every other component: SVD, spectral norm,
// minimum-norm least squares, compact QR. All routines are pure functions of
// their inputs and safe to call concurrently.
//
// Tolerances throughout the library are relative to the spectral norm of the
// matrix at hand; nothing here accepts an absolute tolerance.

#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <utility>

namespace krylreg {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

// Thrown when an iterative LAPACK kernel does not converge within its
// internal sweep cap. The message names the routine and the cap.
class SvdFailure : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Economy-size factors A = U * diag(S) * V^T with S nonincreasing.
struct SvdFactors {
    Matrix U;       // m x r
    Vector S;       // r = min(m, n), sorted nonincreasing, nonnegative
    Matrix V;       // n x r
    bool economy = true;
};

struct QrCompact {
    Matrix Q;  // m x n, orthonormal columns
    Matrix R;  // n x n, upper triangular
};

// Full (economy) SVD via Golub-Reinsch. Throws SvdFailure on non-convergence,
// std::invalid_argument on non-finite or empty input.
SvdFactors svd(const Matrix& A);

// Singular values only; same contract, noticeably cheaper.
Vector singular_values(const Matrix& A);

// Largest singular value. Agrees with the Euclidean norm for single-column
// input and returns 0 for the zero matrix.
double spectral_norm(const Matrix& A);

// Minimum-norm least-squares solution of min ||Ax - b||. Singular values at
// or below max(m, n) * eps * sigma_1 are treated as zero, so the result stays
// bounded on numerically rank-deficient systems.
Vector lstsq(const Matrix& A, const Vector& b);

// Thin QR of a matrix with rows >= cols. Column signs are not normalized.
QrCompact qr_compact(const Matrix& A);

// Relative rank cutoff used by lstsq and the solvers' truncation steps.
double rank_cutoff(Index rows, Index cols, double sigma_max);

}  // namespace krylreg
