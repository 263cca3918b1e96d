#include "krylreg/bidiag.hpp"

namespace krylreg {

namespace {

// Two classical Gram-Schmidt passes of v against the first cols columns of B.
void reorthogonalize(const Matrix& B, Index cols, Vector& v) {
    if (cols < 1) return;
    auto basis = B.leftCols(cols);
    for (int pass = 0; pass < 2; ++pass) v.noalias() -= basis * (basis.transpose() * v);
}

}  // namespace

Matrix BidiagFactorization::Bk(Index j) const {
    Matrix B = Matrix::Zero(j + 1, j);
    for (Index i = 0; i < j; ++i) {
        B(i, i) = alpha[i];
        B(i + 1, i) = beta[i + 1];
    }
    return B;
}

Matrix BidiagFactorization::Bbar(Index j) const {
    Matrix B = Matrix::Zero(j, j);
    for (Index i = 0; i < j; ++i) {
        B(i, i) = alpha[i];
        if (i + 1 < j) B(i + 1, i) = beta[i + 1];
    }
    return B;
}

double BidiagFactorization::alpha_after(Index j) const {
    if (j < k) return alpha[j];
    if (j == k && has_next) return alpha_next;
    throw std::logic_error("alpha_after: step beyond the factorization");
}

Matrix BidiagFactorization::Bbar_next(Index j) const {
    Matrix B = Matrix::Zero(j + 1, j + 1);
    B.topLeftCorner(j + 1, j) = Bk(j);
    B(j, j) = alpha_after(j);
    return B;
}

Vector BidiagFactorization::q_col(Index i) const {
    if (i < k) return Q.col(i);
    if (i == k && has_next) return q_next;
    throw std::logic_error("q_col: column beyond the factorization");
}

BidiagFactorization bidiagonalize(const Matrix& A, const Vector& b, Index kmax,
                                  bool reorth, bool stop_on_breakdown,
                                  double norm_A) {
    const Index m = A.rows();
    const Index n = A.cols();
    if (kmax < 1) throw std::invalid_argument("bidiagonalize: kmax < 1");
    if (kmax > n) throw std::invalid_argument("bidiagonalize: kmax > cols(A)");
    const double beta1 = b.norm();
    if (beta1 == 0.0) throw std::invalid_argument("bidiagonalize: zero b");

    BidiagFactorization f;
    f.norm_A = norm_A > 0.0 ? norm_A : spectral_norm(A);
    const double tol = kBreakdownTol * f.norm_A;

    f.P.resize(m, kmax + 1);
    f.Q.resize(n, kmax);
    f.alpha.resize(kmax);
    f.beta.resize(kmax + 1);
    f.beta[0] = beta1;
    f.P.col(0) = b / beta1;

    Index done = 0;
    bool beta_side_stop = false;
    for (Index j = 0; j < kmax; ++j) {
        Vector r = A.transpose() * f.P.col(j);
        if (j > 0) r.noalias() -= f.beta[j] * f.Q.col(j - 1);
        if (reorth) reorthogonalize(f.Q, j, r);
        const double a = r.norm();
        const bool a_small = a < tol;
        if (a_small && f.first_breakdown == 0) f.first_breakdown = j + 1;
        if (a == 0.0 || (a_small && stop_on_breakdown)) {
            // Keep j completed columns; the tiny direction becomes the
            // lookahead so Bbar_{k+1} still assembles.
            f.terminated = true;
            f.has_next = true;
            f.alpha_next = a;
            f.q_next = a > 0.0 ? Vector(r / a) : Vector(Vector::Zero(n));
            done = j;
            break;
        }
        f.alpha[j] = a;
        f.Q.col(j) = r / a;

        Vector z = A * f.Q.col(j) - a * f.P.col(j);
        if (reorth) reorthogonalize(f.P, j + 1, z);
        double bb = z.norm();
        // A square matrix cannot support an (n+2)-th orthonormal direction in
        // the left basis; the final beta is zero in exact arithmetic.
        if (m == n && j + 1 == n) bb = 0.0;
        const bool b_small = bb < tol;
        if (b_small && f.first_breakdown == 0) f.first_breakdown = j + 1;
        f.beta[j + 1] = bb;
        if (bb == 0.0 || (b_small && stop_on_breakdown)) {
            f.P.col(j + 1).setZero();
            f.terminated = bb < tol;
            beta_side_stop = bb != 0.0;
            done = j + 1;
            break;
        }
        f.P.col(j + 1) = z / bb;
        done = j + 1;
    }

    f.k = done;
    f.P.conservativeResize(m, done + 1);
    f.Q.conservativeResize(n, done);
    f.alpha.conservativeResize(done);
    f.beta.conservativeResize(done + 1);

    if (f.has_next) return f;  // alpha-side termination filled the lookahead

    if (beta_side_stop) {
        f.has_next = false;  // p_{k+1} is not a usable direction
        return f;
    }
    if (done == n) {
        // Space exhausted: zero extension.
        f.has_next = true;
        f.alpha_next = 0.0;
        f.q_next = Vector::Zero(n);
        return f;
    }
    // Trailing half-step for alpha_{k+1}, q_{k+1}.
    Vector r = A.transpose() * f.P.col(done);
    r.noalias() -= f.beta[done] * f.Q.col(done - 1);
    if (reorth) reorthogonalize(f.Q, done, r);
    const double a = r.norm();
    f.has_next = true;
    f.alpha_next = a;
    f.q_next = a > 0.0 ? Vector(r / a) : Vector(Vector::Zero(n));
    return f;
}

ProjectedMatrices projected(const BidiagFactorization& fact) {
    ProjectedMatrices out;
    out.Bk = fact.Bk(fact.k);
    out.Bbar_k = fact.Bbar(fact.k);
    out.has_next = fact.has_next;
    if (fact.has_next) out.Bbar_kplus1 = fact.Bbar_next(fact.k);
    return out;
}

}  // namespace krylreg
