#include "krylreg/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

#include "krylreg/solvers.hpp"

namespace krylreg {

namespace {

void require_full(const BidiagFactorization& f, const Matrix& A) {
    if (f.k != A.cols())
        throw std::invalid_argument(
            "spectral diagnostics need a full-depth factorization");
}

// Trailing block G_k: diagonal alpha_{k+1}..alpha_n, subdiagonal
// beta_{k+2}..beta_{n+1}; (n-k+1) x (n-k).
Matrix trailing_block(const BidiagFactorization& f, Index k) {
    const Index r = f.k - k;
    Matrix G = Matrix::Zero(r + 1, r);
    for (Index j = 0; j < r; ++j) {
        G(j, j) = f.alpha[k + j];
        G(j + 1, j) = f.beta[k + 1 + j];
    }
    return G;
}

double gamma_lsqr_block(const BidiagFactorization& f, Index k) {
    return spectral_norm(trailing_block(f, k));
}

double gamma_cgme_block(const BidiagFactorization& f, Index k) {
    const Index r = f.k - k;
    Matrix C = Matrix::Zero(r + 1, r + 1);
    C(0, 0) = f.beta[k];
    C.rightCols(r) = trailing_block(f, k);
    return spectral_norm(C);
}

double lsmr_err_block(const BidiagFactorization& f, Index k) {
    const Index r = f.k - k;
    Matrix G = trailing_block(f, k);
    Matrix F = Matrix::Zero(r + 1, r);
    if (r > 0) F(0, 0) = f.alpha[k] * f.beta[k];
    F.bottomRows(r).noalias() = G.transpose() * G;
    return spectral_norm(F);
}

double gamma_lsqr_direct(const Matrix& A, const BidiagFactorization& f,
                         Index k) {
    Matrix D = A;
    D.noalias() -=
        f.P.leftCols(k + 1) * (f.Bk(k) * f.Q.leftCols(k).transpose());
    return spectral_norm(D);
}

double gamma_cgme_direct(const Matrix& A, const BidiagFactorization& f,
                         Index k) {
    Matrix D = A;
    D.noalias() -=
        f.P.leftCols(k) * (f.Bbar(k) * f.Q.leftCols(k).transpose());
    return spectral_norm(D);
}

double lsmr_err_direct(const Matrix& AtA, const BidiagFactorization& f,
                       Index k) {
    Matrix T = AtA * f.Q.leftCols(k);
    Matrix S = f.Q.leftCols(k + 1).transpose() * T;
    Matrix D = AtA;
    D.noalias() -= f.Q.leftCols(k + 1) * (S * f.Q.leftCols(k).transpose());
    return spectral_norm(D);
}

double lsqr_normal_err_direct(const Matrix& AtA, const BidiagFactorization& f,
                              Index k) {
    Matrix T = AtA * f.Q.leftCols(k);
    Matrix S = f.Q.leftCols(k).transpose() * T;
    Matrix D = AtA;
    D.noalias() -= f.Q.leftCols(k) * (S * f.Q.leftCols(k).transpose());
    return spectral_norm(D);
}

// The shifted normal-equations block whose singular values are the squared
// tilde Ritz values: (k+1) x k.
Matrix tilde_block(const BidiagFactorization& f, Index k) {
    Matrix Bk = f.Bk(k);
    Matrix M = Matrix::Zero(k + 1, k);
    M.topRows(k).noalias() = Bk.transpose() * Bk;
    M(k, k - 1) = f.alpha_after(k) * f.beta[k];
    return M;
}

}  // namespace

GammaReport gamma_report(const Matrix& A, const BidiagFactorization& fact,
                         Index k) {
    require_full(fact, A);
    if (k < 1 || k >= fact.k)
        throw std::invalid_argument("gamma_report: k outside 1..n-1");
    GammaReport g;
    g.k = k;
    g.gamma_lsqr_via_Gk = gamma_lsqr_block(fact, k);
    g.gamma_cgme_via_Gk = gamma_cgme_block(fact, k);
    g.lsmr_err_via_Fk = lsmr_err_block(fact, k);
    g.gamma_lsqr = gamma_lsqr_direct(A, fact, k);
    g.gamma_cgme = gamma_cgme_direct(A, fact, k);
    Matrix AtA = A.transpose() * A;
    g.lsmr_err = lsmr_err_direct(AtA, fact, k);
    g.lsqr_normal_err = lsqr_normal_err_direct(AtA, fact, k);
    return g;
}

RitzLadder ritz_ladder(const BidiagFactorization& fact, Index k) {
    if (k < 1 || k > fact.k)
        throw std::invalid_argument("ritz_ladder: k outside the factorization");
    RitzLadder r;
    r.k = k;
    r.theta = singular_values(fact.Bk(k));
    r.theta_bar = singular_values(fact.Bbar(k));
    r.theta_bar_next = singular_values(fact.Bbar_next(k));
    r.theta_tilde_sq = singular_values(tilde_block(fact, k));
    return r;
}

double AuditReport::pass_rate() const {
    return total > 0 ? static_cast<double>(passed) / total : 1.0;
}

double AuditReport::pass_rate_above_floor() const {
    return total_above_floor > 0
               ? static_cast<double>(passed_above_floor) / total_above_floor
               : 1.0;
}

Index audit_depth(const BidiagFactorization& f) {
    const Index cap =
        f.first_breakdown > 0 ? f.first_breakdown - 1 : f.k - 1;
    return std::min(cap, f.k - 1);
}

AuditReport audit_inequalities(const Matrix& A,
                               const BidiagFactorization& fact,
                               const Vector& sigma, Index kmax) {
    require_full(fact, A);
    const Index n = fact.k;
    const double s1 = sigma[0];
    const double sl1 = 1e-10 * s1;          // strictness slack, sigma scale
    const double sl2 = 1e-10 * s1 * s1;     // squared scale
    const double eq1 = 1e-8 * s1;           // route-equivalence tolerance
    const double eq2 = 1e-8 * s1 * s1;
    const double floor1 = 1e-12 * s1;       // strict-subset participation
    const double floor2 = 1e-12 * s1 * s1;

    AuditReport rep;
    rep.depth = std::min(kmax, audit_depth(fact));
    const Matrix AtA = A.transpose() * A;

    auto push = [&rep](const char* name, Index k, Index i, double lhs,
                       double rhs, double slack, bool equivalence,
                       double floor_quantity, double floor_level,
                       bool counted = true) {
        AuditRow row;
        row.name = name;
        row.k = k;
        row.i = i;
        row.lhs = lhs;
        row.rhs = rhs;
        row.slack = slack;
        row.holds = equivalence ? std::abs(lhs - rhs) <= slack
                                : lhs <= rhs + slack;
        row.above_floor = floor_quantity >= floor_level;
        row.counted = counted;
        if (counted) {
            ++rep.total;
            rep.passed += row.holds;
            if (row.above_floor) {
                ++rep.total_above_floor;
                rep.passed_above_floor += row.holds;
            }
        }
        rep.rows.push_back(std::move(row));
    };

    double gl_prev = s1;       // gamma_0^{lsqr} = ||A||
    double gc_prev = 0.0;
    double ne_prev = 0.0;
    for (Index k = 1; k <= rep.depth; ++k) {
        const double gl = gamma_lsqr_block(fact, k);
        const double gc = gamma_cgme_block(fact, k);
        const double ne = lsmr_err_block(fact, k);
        const double gld = gamma_lsqr_direct(A, fact, k);
        const double gcd = gamma_cgme_direct(A, fact, k);
        const double ned = lsmr_err_direct(AtA, fact, k);
        const double lqd = lsqr_normal_err_direct(AtA, fact, k);

        push("gamma_lsqr_routes_agree", k, 0, gl, gld, eq1, true, gl, floor1);
        push("gamma_cgme_routes_agree", k, 0, gc, gcd, eq1, true, gc, floor1);
        push("normal_err_lsmr_routes_agree", k, 0, ne, ned, eq2, true, ne,
             floor2);
        push("gamma_order_chain", k, 1, gl, gc, sl1, false, gl, floor1);
        push("gamma_order_chain", k, 2, gc, gl_prev, sl1, false, gl, floor1);
        if (k >= 2) {
            push("gamma_lsqr_decreasing", k, 0, gl, gl_prev, sl1, false, gl,
                 floor1);
            push("gamma_cgme_decreasing", k, 0, gc, gc_prev, sl1, false, gl,
                 floor1);
            push("normal_err_decreasing", k, 0, ne, ne_prev, sl2, false, ne,
                 floor2);
        }
        push("sigma_below_gamma", k, 0, sigma[k], gl, sl1, false,
             std::min(sigma[k], gl), floor1);
        push("alpha_below_gamma", k, 0, fact.alpha[k], gl, sl1, false, gl,
             floor1);
        if (k + 1 <= n - 1)
            push("beta_below_gamma", k, 0, fact.beta[k + 1], gl, sl1, false,
                 gl, floor1);
        push("normal_err_order", k, 0, ne, lqd, sl2, false, ne, floor2);
        push("normal_err_sandwich_lower", k, 0, gl * gl, ne, sl2, false, ne,
             floor2);
        push("normal_err_sandwich_upper", k, 0, ne,
             std::sqrt(1.0 + (gl_prev / gl) * (gl_prev / gl)) * gl * gl, sl2,
             false, ne, floor2);
        push("near_best_split", k, 0, gl, 0.5 * (sigma[k - 1] + sigma[k]),
             sl1, false, gl, floor1, /*counted=*/false);

        RitzLadder lad = ritz_ladder(fact, k);
        const Vector& th = lad.theta;
        const Vector& thb = lad.theta_bar;
        const Vector& thb1 = lad.theta_bar_next;
        for (Index i = 0; i < k; ++i) {
            push("ritz_interlace_upper", k, i + 1, thb[i], th[i], sl1, false,
                 thb[i], floor1);
            if (i + 1 < k)
                push("ritz_interlace_lower", k, i + 1, th[i + 1], thb[i], sl1,
                     false, th[i + 1], floor1);
            push("ritz_chain_upper", k, i + 1, th[i], thb1[i], sl1, false,
                 th[i], floor1);
            push("ritz_chain_lower", k, i + 1, thb1[i + 1], th[i], sl1, false,
                 thb1[i + 1], floor1);
            push("ritz_below_sigma", k, i + 1, th[i], sigma[i], sl1, false,
                 th[i], floor1);
        }
        // A square-matrix bound; for rectangular input the bottom Ritz value
        // can sink below sigma_min, so the row is informational there.
        push("ritz_bottom_above_sigma_min", k, 0, sigma[sigma.size() - 1],
             thb[k - 1], sl1, false, thb[k - 1], floor1,
             /*counted=*/A.rows() == A.cols());
        const Vector& tts = lad.theta_tilde_sq;
        for (Index i = 0; i < k; ++i) {
            push("ritz_tilde_interlace_lower", k, i + 1, th[i] * th[i],
                 tts[i], sl2, false, tts[i], floor2);
            push("ritz_tilde_interlace_upper", k, i + 1, tts[i],
                 sigma[i] * sigma[i], sl2, false, tts[i], floor2);
            push("ritz_tilde_sq_gap", k, i + 1, tts[i],
                 th[i] * th[i] + gl * gl_prev, sl2, false, tts[i], floor2);
        }

        if (k <= n - 2) {
            // Nearest rank-k neighbor of the extended block, projected back.
            SvdFactors sv = svd(fact.Bbar_next(k));
            Matrix Cbar = sv.U.leftCols(k) * sv.S.head(k).asDiagonal() *
                          sv.V.leftCols(k).transpose();
            Matrix D = A;
            D.noalias() -= fact.P.leftCols(k + 1) *
                           (Cbar * fact.Q.leftCols(k + 1).transpose());
            const double trunc_err = spectral_norm(D);
            const double gc1 = gamma_cgme_block(fact, k + 1);
            push("trunc_bound_sigma", k, 0, trunc_err, sigma[k] + gc1, sl1,
                 false, trunc_err, floor1);
            push("trunc_bound_ritz", k, 0, trunc_err, thb1[k] + gc1, sl1,
                 false, trunc_err, floor1);
        }

        gl_prev = gl;
        gc_prev = gc;
        ne_prev = ne;
    }
    return rep;
}

void write_audit_csv(std::ostream& os, const AuditReport& report) {
    os << "name,k,i,lhs,rhs,slack,holds\n";
    char buf[160];
    for (const AuditRow& r : report.rows) {
        std::snprintf(buf, sizeof buf, ",%lld,%lld,%.17g,%.17g,%.17g,%d\n",
                      static_cast<long long>(r.k), static_cast<long long>(r.i),
                      r.lhs, r.rhs, r.slack, r.holds ? 1 : 0);
        os << r.name << buf;
    }
}

Index transition_point(const ProblemInstance& prob) {
    const Index r = std::min(prob.A.rows(), prob.A.cols());
    return tsvd_trace(prob, r).k_star;
}

}  // namespace krylreg
