// Randomized truncated SVD by range sketching, with two a posteriori error
// bounds per draw: the classical estimate sigma_{k+1}(A) + ||(I - PP^T)A||
// and a sharper variant that replaces sigma_{k+1}(A) with the sketch's own
// (k+1)-th singular value, which interlacing keeps at or below it.
//
// RangeLeft sketches the column space (Y = A*Omega, B = P^T A); RangeRight
// runs the mirror through A^T, with the projector acting on the row space.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "krylreg/dense_core.hpp"
#include "krylreg/problems.hpp"

namespace krylreg {

enum class SketchVariant { RangeLeft, RangeRight };

struct SketchResult {
    SketchVariant variant = SketchVariant::RangeLeft;
    Index k = 0;
    Index p = 0;         // oversampling columns beyond k
    Matrix P;            // orthonormal basis, m x (k+p) or n x (k+p)
    Vector sigma_tilde;  // k+p singular values of the sketched block
    Matrix A_k;          // rank-k approximation in A's shape
    double err = 0.0;             // ||A - A_k||
    double projector_norm = 0.0;  // ||(I - PP^T)A||, mirrored for RangeRight
    double halko_bound = 0.0;     // sigma_{k+1}(A) + projector_norm
    double new_bound = 0.0;       // sigma_tilde[k]  + projector_norm
};

// Draws a Gaussian test matrix from the seeded stream, orthonormalizes the
// sample, reduces, truncates at rank k, and evaluates both bounds densely.
// Requires k >= 1, p >= 0, k + p <= min(m, n). A degenerate draw is re-drawn
// once, then reported as an error.
SketchResult sketch(const Matrix& A, Index k, Index p, SketchVariant variant,
                    std::uint64_t seed);

// The same reduction against a caller-supplied orthonormal basis: the bounds
// hold for any such P, sampled or not. p is inferred as P.cols() - k.
SketchResult sketch_with_basis(const Matrix& A, Index k, const Matrix& P,
                               SketchVariant variant);

// One (spectrum, trial) cell of the bound-sharpness study.
struct SharpnessRow {
    std::string spectrum;  // label like "severe(2)"
    Index trial = 0;
    Index k = 0;
    Index p = 0;
    double err = 0.0;
    double new_bound = 0.0;
    double halko_bound = 0.0;
    double projector_norm = 0.0;
    bool indicator = false;  // projector_norm < sigma_{k+1}: the regime where
                             // truncation visibly costs accuracy
    double gap_ratio = 1.0;  // halko_bound / new_bound, >= 1 when sharper
};

// Per-spectrum aggregate over the trials.
struct SharpnessSummary {
    std::string spectrum;
    Index trials = 0;
    double median_gap_ratio = 1.0;
    double median_err = 0.0;
    double median_new_bound = 0.0;
    double median_halko_bound = 0.0;
    double indicator_fraction = 0.0;
};

struct SharpnessStudy {
    std::vector<SharpnessRow> rows;         // every (spectrum, trial) cell
    std::vector<SharpnessSummary> medians;  // one per spectrum, input order
};

// Square instance of each spectrum, problem and test matrix redrawn per
// trial on derived seeds. Row-by-row gap_ratio >= 1 is the headline check.
SharpnessStudy sharpness_study(const std::vector<SpectrumSpec>& spectra,
                               Index k, Index p, Index trials,
                               std::uint64_t seed);

// CSV with columns
// spectrum,trial,k,p,err,new_bound,halko_bound,projector_norm,indicator.
void write_sharpness_csv(std::ostream& os, const SharpnessStudy& study);

}  // namespace krylreg
