#include "krylreg/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace krylreg {

namespace {

void finalize_trace(SolverTrace& t) {
    if (t.rel_errors.empty()) {
        t.k_star = 0;
        t.best_error = std::numeric_limits<double>::quiet_NaN();
        return;
    }
    std::size_t best = 0;
    for (std::size_t i = 1; i < t.rel_errors.size(); ++i)
        if (t.rel_errors[i] < t.rel_errors[best]) best = i;
    t.k_star = static_cast<Index>(best) + 1;
    t.best_error = t.rel_errors[best];
}

void push_iterate(SolverTrace& t, const ProblemInstance& inst, Vector x,
                  double residual) {
    t.rel_errors.push_back((x - inst.x_true).norm() / inst.x_true.norm());
    t.residuals.push_back(residual);
    t.iterates.push_back(std::move(x));
}

// Depth usable by methods that need the trailing alpha_{k+1}: without a
// lookahead the last completed step cannot be consumed.
Index depth_with_next(const BidiagFactorization& f) {
    return f.has_next ? f.k : f.k - 1;
}

}  // namespace

std::string method_name(Method m) {
    switch (m) {
        case Method::Lsqr: return "lsqr";
        case Method::Cgme: return "cgme";
        case Method::Lsmr: return "lsmr";
        case Method::Mcgme: return "mcgme";
        case Method::Tsvd: return "tsvd";
    }
    throw std::logic_error("method_name: bad enum");
}

Method parse_method(const std::string& name) {
    if (name == "lsqr") return Method::Lsqr;
    if (name == "cgme") return Method::Cgme;
    if (name == "lsmr") return Method::Lsmr;
    if (name == "mcgme") return Method::Mcgme;
    if (name == "tsvd") return Method::Tsvd;
    throw std::invalid_argument("unknown method name: " + name);
}

std::string residual_description(Method m) {
    switch (m) {
        case Method::Lsqr: return "residual = ||b - A x_k||";
        case Method::Cgme:
            return "residual = ||x_ls - x_k||, distance to the unregularized "
                   "least-squares solution";
        case Method::Lsmr: return "residual = ||A^T (b - A x_k)||";
        case Method::Mcgme: return "residual = ||b - A x_k||";
        case Method::Tsvd: return "residual = ||b - A x_k||";
    }
    throw std::logic_error("residual_description: bad enum");
}

BidiagFactorization solver_factorization(const ProblemInstance& inst,
                                         Index kmax) {
    const Index depth = std::min(kmax, inst.A.cols());
    return bidiagonalize(inst.A, inst.b, depth);
}

SolverTrace lsqr_trace(const ProblemInstance& inst,
                       const BidiagFactorization& f) {
    SolverTrace t;
    t.method = Method::Lsqr;
    for (Index k = 1; k <= f.k; ++k) {
        Vector rhs = Vector::Zero(k + 1);
        rhs[0] = f.beta[0];
        Vector y = lstsq(f.Bk(k), rhs);
        Vector x = f.Q.leftCols(k) * y;
        const double res = (inst.b - inst.A * x).norm();
        push_iterate(t, inst, std::move(x), res);
    }
    t.truncated = f.terminated;
    finalize_trace(t);
    return t;
}

SolverTrace cgme_trace(const ProblemInstance& inst,
                       const BidiagFactorization& f) {
    SolverTrace t;
    t.method = Method::Cgme;
    const Vector x_ls = lstsq(inst.A, inst.b);
    const double guard = kBreakdownTol * f.norm_A;
    // Forward substitution on the square bidiagonal block has the prefix
    // property: y_k extends y_{k-1} by one entry.
    Vector x = Vector::Zero(inst.A.cols());
    double y_prev = 0.0;
    for (Index k = 1; k <= f.k; ++k) {
        if (f.alpha[k - 1] < guard) {
            t.truncated = true;
            break;
        }
        const double y_k = k == 1 ? f.beta[0] / f.alpha[0]
                                  : -f.beta[k - 1] * y_prev / f.alpha[k - 1];
        x += y_k * f.Q.col(k - 1);
        y_prev = y_k;
        push_iterate(t, inst, x, (x_ls - x).norm());
        t.data_residuals.push_back((inst.b - inst.A * x).norm());
    }
    if (f.terminated) t.truncated = true;
    finalize_trace(t);
    return t;
}

SolverTrace lsmr_trace(const ProblemInstance& inst,
                       const BidiagFactorization& f) {
    SolverTrace t;
    t.method = Method::Lsmr;
    const Index depth = depth_with_next(f);
    for (Index k = 1; k <= depth; ++k) {
        Matrix Bk = f.Bk(k);
        Matrix M = Matrix::Zero(k + 1, k);
        M.topRows(k) = Bk.transpose() * Bk;
        M(k, k - 1) = f.alpha_after(k) * f.beta[k];
        Vector rhs = Vector::Zero(k + 1);
        rhs[0] = f.alpha[0] * f.beta[0];
        Vector y = lstsq(M, rhs);
        Vector x = f.Q.leftCols(k) * y;
        const double res = (inst.A.transpose() * (inst.b - inst.A * x)).norm();
        push_iterate(t, inst, std::move(x), res);
    }
    t.truncated = f.terminated || depth < f.k;
    finalize_trace(t);
    return t;
}

SolverTrace mcgme_trace(const ProblemInstance& inst,
                        const BidiagFactorization& f) {
    SolverTrace t;
    t.method = Method::Mcgme;
    const Index depth = depth_with_next(f);
    for (Index k = 1; k <= depth; ++k) {
        // x_k applies the pseudo-inverse of the nearest rank-k neighbor of
        // Bbar_{k+1}: expand beta_1 e_1 in its top k singular triplets.
        SvdFactors sv = svd(f.Bbar_next(k));
        const double cutoff = rank_cutoff(k + 1, k + 1, sv.S[0]);
        Vector y = Vector::Zero(k + 1);
        for (Index i = 0; i < k; ++i) {
            if (sv.S[i] <= cutoff) break;
            y += (f.beta[0] * sv.U(0, i) / sv.S[i]) * sv.V.col(i);
        }
        Vector x = f.Q.leftCols(k) * y.head(k) + y[k] * f.q_col(k);
        const double res = (inst.b - inst.A * x).norm();
        push_iterate(t, inst, std::move(x), res);
    }
    t.truncated = f.terminated || depth < f.k;
    finalize_trace(t);
    return t;
}

SolverTrace tsvd_trace(const ProblemInstance& inst, Index kmax) {
    const Index r = std::min(inst.A.rows(), inst.A.cols());
    if (kmax < 1) throw std::invalid_argument("tsvd_trace: kmax < 1");
    const Index depth = std::min(kmax, r);
    SolverTrace t;
    t.method = Method::Tsvd;
    SvdFactors sv = svd(inst.A);
    const double cutoff = rank_cutoff(inst.A.rows(), inst.A.cols(), sv.S[0]);
    Vector x = Vector::Zero(inst.A.cols());
    for (Index k = 1; k <= depth; ++k) {
        if (sv.S[k - 1] <= cutoff) {
            t.truncated = true;  // expansion terms past numerical rank
            break;
        }
        x += (sv.U.col(k - 1).dot(inst.b) / sv.S[k - 1]) * sv.V.col(k - 1);
        push_iterate(t, inst, x, (inst.b - inst.A * x).norm());
    }
    finalize_trace(t);
    return t;
}

SolverTrace lsqr_trace(const ProblemInstance& inst, Index kmax) {
    return lsqr_trace(inst, solver_factorization(inst, kmax));
}

SolverTrace cgme_trace(const ProblemInstance& inst, Index kmax) {
    return cgme_trace(inst, solver_factorization(inst, kmax));
}

SolverTrace lsmr_trace(const ProblemInstance& inst, Index kmax) {
    return lsmr_trace(inst, solver_factorization(inst, kmax));
}

SolverTrace mcgme_trace(const ProblemInstance& inst, Index kmax) {
    return mcgme_trace(inst, solver_factorization(inst, kmax));
}

SolverTrace run_method(Method m, const ProblemInstance& inst, Index kmax) {
    if (m == Method::Tsvd) return tsvd_trace(inst, kmax);
    BidiagFactorization f = solver_factorization(inst, kmax);
    switch (m) {
        case Method::Lsqr: return lsqr_trace(inst, f);
        case Method::Cgme: return cgme_trace(inst, f);
        case Method::Lsmr: return lsmr_trace(inst, f);
        case Method::Mcgme: return mcgme_trace(inst, f);
        default: break;
    }
    throw std::logic_error("run_method: bad enum");
}

FilterVector filter_factors(const BidiagFactorization& fact,
                            const Vector& sigma, Method method, Index k) {
    if (method != Method::Lsqr && method != Method::Cgme)
        throw std::invalid_argument(
            "filter_factors: only lsqr and cgme have filter expansions");
    if (k < 1 || k > fact.k)
        throw std::invalid_argument("filter_factors: k outside the trace");
    Vector theta = singular_values(method == Method::Lsqr ? fact.Bk(k)
                                                          : fact.Bbar(k));
    if (theta[k - 1] == 0.0)
        throw std::domain_error("filter_factors: zero Ritz value");
    FilterVector out;
    out.method = method;
    out.k = k;
    out.f.resize(sigma.size());
    for (Index i = 0; i < sigma.size(); ++i) {
        double prod = 1.0;
        for (Index j = 0; j < k; ++j) {
            const double t2 = theta[j] * theta[j];
            prod *= (t2 - sigma[i] * sigma[i]) / t2;
        }
        out.f[i] = 1.0 - prod;
    }
    return out;
}

}  // namespace krylreg
