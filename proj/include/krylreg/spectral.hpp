// Diagnostics on a full-depth bidiagonalization: the trailing-block accuracy
// measures gamma_k for each solver family, Ritz-value ladders, and a numeric
// audit of every inequality these quantities are expected to satisfy.
//
// Everything here wants a factorization run all the way to k = n with
// reorthogonalization and stop_on_breakdown = false: the trailing blocks
// G_k, F_k are assembled from the recurrence coefficients past k. The audit
// restricts itself to steps before the first coefficient dip, where those
// coefficients are trustworthy.

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "krylreg/bidiag.hpp"
#include "krylreg/problems.hpp"

namespace krylreg {

// Rank-k approximation errors at one step, by two routes each where two
// exist: the dense difference norm, and the norm of the trailing coefficient
// block (suffix _via_Gk / _via_Fk).
struct GammaReport {
    Index k = 0;
    double gamma_lsqr = 0.0;         // ||A - P_{k+1} B_k Q_k^T||
    double gamma_lsqr_via_Gk = 0.0;  // ||G_k||
    double gamma_cgme = 0.0;         // ||A - P_k Bbar_k Q_k^T||
    double gamma_cgme_via_Gk = 0.0;  // ||(beta_{k+1} e_1, G_k)||
    double lsmr_err = 0.0;           // ||A^TA - Q_{k+1}Q_{k+1}^T A^TA Q_k Q_k^T||
    double lsmr_err_via_Fk = 0.0;    // ||F_k||
    double lsqr_normal_err = 0.0;    // ||A^TA - Q_k Q_k^T A^TA Q_k Q_k^T||
};

GammaReport gamma_report(const Matrix& A, const BidiagFactorization& fact_full,
                         Index k);

// Singular values of the four projected matrices at step k, all descending.
struct RitzLadder {
    Index k = 0;
    Vector theta;           // of the (k+1) x k block
    Vector theta_bar;       // of the k x k block
    Vector theta_bar_next;  // of the (k+1) x (k+1) block, k+1 values
    Vector theta_tilde_sq;  // of (B_k^T B_k ; alpha_{k+1} beta_{k+1} e_k^T)
};

RitzLadder ritz_ladder(const BidiagFactorization& fact, Index k);

// One evaluated inequality (or route equivalence, or classification).
// Inequalities hold iff lhs <= rhs + slack; route equivalences iff
// |lhs - rhs| <= slack. above_floor marks rows whose compared quantities sit
// above 1e-12 * sigma_1 (squared scale where applicable): the subset where
// strictness is numerically meaningful. counted = false rows are
// informational classifications excluded from pass rates.
struct AuditRow {
    std::string name;
    Index k = 0;
    Index i = 0;  // 1-based position for per-index checks, 0 for scalar ones
    double lhs = 0.0;
    double rhs = 0.0;
    double slack = 0.0;
    bool holds = false;
    bool above_floor = true;
    bool counted = true;
};

struct AuditReport {
    std::vector<AuditRow> rows;
    Index depth = 0;  // checks cover k = 1..depth
    long total = 0;
    long passed = 0;
    long total_above_floor = 0;
    long passed_above_floor = 0;

    double pass_rate() const;              // over counted rows
    double pass_rate_above_floor() const;  // over counted rows above the floor
};

// Last step whose coefficients all sit above the breakdown threshold,
// capped at n-1. The audit never looks past it.
Index audit_depth(const BidiagFactorization& fact_full);

// Evaluates the whole battery at k = 1..min(kmax, audit_depth). sigma must
// be the descending singular values of A.
AuditReport audit_inequalities(const Matrix& A,
                               const BidiagFactorization& fact_full,
                               const Vector& sigma, Index kmax);

// CSV with columns name,k,i,lhs,rhs,slack,holds.
void write_audit_csv(std::ostream& os, const AuditReport& report);

// Index of the best TSVD truncation: where regularization stops helping.
Index transition_point(const ProblemInstance& prob);

}  // namespace krylreg
