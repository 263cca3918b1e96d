#include "krylreg/dense_core.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace krylreg {

namespace {

void require_finite(const Matrix& A, const char* who) {
    if (A.rows() < 1 || A.cols() < 1)
        throw std::invalid_argument(std::string(who) + ": empty matrix");
    if (!A.allFinite())
        throw std::invalid_argument(std::string(who) + ": non-finite entry");
}

[[noreturn]] void throw_nonconvergence(const char* routine, int info) {
    // dgesvd/dgelsd iterate the implicit bidiagonal QR; LAPACK caps it at 30
    // sweeps per superdiagonal before giving up.
    throw SvdFailure(std::string(routine) +
                     " did not converge within the 30-sweep bidiagonal QR cap"
                     " (info=" + std::to_string(info) + ")");
}

}  // namespace

double rank_cutoff(Index rows, Index cols, double sigma_max) {
    return static_cast<double>(std::max(rows, cols)) *
           std::numeric_limits<double>::epsilon() * sigma_max;
}

SvdFactors svd(const Matrix& A) {
    require_finite(A, "svd");
    const lapack_int m = static_cast<lapack_int>(A.rows());
    const lapack_int n = static_cast<lapack_int>(A.cols());
    const lapack_int r = std::min(m, n);
    Matrix work = A;  // dgesvd destroys its input
    SvdFactors f;
    f.U.resize(m, r);
    f.S.resize(r);
    Matrix VT(r, n);
    Vector superb(std::max<lapack_int>(1, r - 1));
    int info = LAPACKE_dgesvd(LAPACK_COL_MAJOR, 'S', 'S', m, n, work.data(), m,
                              f.S.data(), f.U.data(), m, VT.data(), r,
                              superb.data());
    if (info < 0)
        throw std::invalid_argument("svd: illegal argument to dgesvd");
    if (info > 0) throw_nonconvergence("dgesvd", info);
    f.V = VT.transpose();
    return f;
}

Vector singular_values(const Matrix& A) {
    require_finite(A, "singular_values");
    const lapack_int m = static_cast<lapack_int>(A.rows());
    const lapack_int n = static_cast<lapack_int>(A.cols());
    const lapack_int r = std::min(m, n);
    Matrix work = A;
    Vector s(r);
    Vector superb(std::max<lapack_int>(1, r - 1));
    int info = LAPACKE_dgesvd(LAPACK_COL_MAJOR, 'N', 'N', m, n, work.data(), m,
                              s.data(), nullptr, m, nullptr, 1, superb.data());
    if (info < 0)
        throw std::invalid_argument("singular_values: illegal argument");
    if (info > 0) throw_nonconvergence("dgesvd", info);
    return s;
}

double spectral_norm(const Matrix& A) {
    if (A.rows() < 1 || A.cols() < 1) return 0.0;
    if (A.isZero(0.0)) return 0.0;
    return singular_values(A)[0];
}

Vector lstsq(const Matrix& A, const Vector& b) {
    require_finite(A, "lstsq");
    if (b.size() != A.rows())
        throw std::invalid_argument("lstsq: rhs length mismatch");
    if (!b.allFinite())
        throw std::invalid_argument("lstsq: non-finite rhs entry");
    const lapack_int m = static_cast<lapack_int>(A.rows());
    const lapack_int n = static_cast<lapack_int>(A.cols());
    Matrix work = A;
    // dgelsd wants the rhs buffer sized for the solution as well.
    Vector rhs = Vector::Zero(std::max(m, n));
    rhs.head(m) = b;
    Vector s(std::min(m, n));
    lapack_int rank = 0;
    // rcond expresses the cutoff relative to the largest singular value,
    // matching rank_cutoff(): sigma_i <= max(m,n)*eps*sigma_1 is rank-deficient.
    const double rcond = static_cast<double>(std::max(m, n)) *
                         std::numeric_limits<double>::epsilon();
    int info = LAPACKE_dgelsd(LAPACK_COL_MAJOR, m, n, 1, work.data(), m,
                              rhs.data(), std::max(m, n), s.data(), rcond,
                              &rank);
    if (info < 0) throw std::invalid_argument("lstsq: illegal argument");
    if (info > 0) throw_nonconvergence("dgelsd", info);
    return rhs.head(n);
}

QrCompact qr_compact(const Matrix& A) {
    require_finite(A, "qr_compact");
    if (A.rows() < A.cols())
        throw std::invalid_argument("qr_compact: needs rows >= cols");
    Eigen::HouseholderQR<Matrix> qr(A);
    QrCompact out;
    out.Q = qr.householderQ() * Matrix::Identity(A.rows(), A.cols());
    out.R = qr.matrixQR()
                .topRows(A.cols())
                .triangularView<Eigen::Upper>();
    return out;
}

}  // namespace krylreg
