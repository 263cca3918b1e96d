#include "krylreg/sketch.hpp"

#include <algorithm>
#include <cstdio>
#include <ostream>
#include <stdexcept>

#include "krylreg/rng.hpp"

namespace krylreg {

namespace {

double median_of(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    if (n == 0) return 0.0;
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::string spectrum_label(const SpectrumSpec& spec) {
    const char* kind = spec.kind == SpectrumSpec::Kind::Severe ? "severe"
                       : spec.kind == SpectrumSpec::Kind::Moderate
                           ? "moderate"
                           : "mild";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%s(%g)", kind, spec.param);
    return buf;
}

}  // namespace

SketchResult sketch_with_basis(const Matrix& A, Index k, const Matrix& P,
                               SketchVariant variant) {
    const Index m = A.rows();
    const Index n = A.cols();
    const Index side = variant == SketchVariant::RangeLeft ? m : n;
    if (k < 1) throw std::invalid_argument("sketch: k must be at least 1");
    if (P.rows() != side)
        throw std::invalid_argument(
            "sketch: basis rows do not match the sketched side");
    const Index l = P.cols();
    if (l < k || l > std::min(m, n))
        throw std::invalid_argument("sketch: need k <= k+p <= min(m, n)");
    const double ortho =
        (P.transpose() * P - Matrix::Identity(l, l)).cwiseAbs().maxCoeff();
    if (ortho > 1e-8)
        throw std::invalid_argument("sketch: basis is not orthonormal");

    SketchResult r;
    r.variant = variant;
    r.k = k;
    r.p = l - k;
    r.P = P;
    const bool left = variant == SketchVariant::RangeLeft;
    Matrix B = left ? Matrix(P.transpose() * A) : Matrix(A * P);
    SvdFactors sv = svd(B);
    r.sigma_tilde = sv.S;
    Matrix Bk = sv.U.leftCols(k) * sv.S.head(k).asDiagonal() *
                sv.V.leftCols(k).transpose();
    r.A_k = left ? Matrix(P * Bk) : Matrix(Bk * P.transpose());
    r.err = spectral_norm(A - r.A_k);
    // The residual of the orthogonal projection; B reuses would square its
    // conditioning, so form it directly.
    Matrix R = left ? Matrix(A - P * (P.transpose() * A))
                    : Matrix(A - (A * P) * P.transpose());
    r.projector_norm = spectral_norm(R);
    Vector s = singular_values(A);
    const double sigma_k1 = k < s.size() ? s[k] : 0.0;
    const double tilde_k1 = k < l ? r.sigma_tilde[k] : 0.0;
    r.halko_bound = sigma_k1 + r.projector_norm;
    r.new_bound = tilde_k1 + r.projector_norm;
    return r;
}

SketchResult sketch(const Matrix& A, Index k, Index p, SketchVariant variant,
                    std::uint64_t seed) {
    const Index m = A.rows();
    const Index n = A.cols();
    if (k < 1) throw std::invalid_argument("sketch: k must be at least 1");
    if (p < 0) throw std::invalid_argument("sketch: p must be nonnegative");
    if (k + p > std::min(m, n))
        throw std::invalid_argument("sketch: k + p exceeds min(m, n)");
    const Index l = k + p;
    const bool left = variant == SketchVariant::RangeLeft;
    Rng rng(seed);
    for (int attempt = 0; attempt < 2; ++attempt) {
        Matrix Om = rng.gaussian_matrix(left ? n : m, l);
        // A full-rank draw is almost sure; the retry is for the pathological
        // stream, not for rank-deficient A (which is fine: QR still yields an
        // orthonormal basis and every bound holds for any such basis).
        Vector so = singular_values(Om);
        if (so[so.size() - 1] <= 1e-12 * so[0]) continue;
        Matrix Y = left ? Matrix(A * Om) : Matrix(A.transpose() * Om);
        QrCompact qr = qr_compact(Y);
        return sketch_with_basis(A, k, qr.Q, variant);
    }
    throw std::runtime_error("sketch: degenerate Gaussian draw after retry");
}

SharpnessStudy sharpness_study(const std::vector<SpectrumSpec>& spectra,
                               Index k, Index p, Index trials,
                               std::uint64_t seed) {
    if (spectra.empty())
        throw std::invalid_argument("sharpness_study: no spectra");
    if (trials < 1)
        throw std::invalid_argument("sharpness_study: trials must be positive");
    for (const SpectrumSpec& spec : spectra) spec.validate();

    SharpnessStudy study;
    for (std::size_t si = 0; si < spectra.size(); ++si) {
        const SpectrumSpec& spec = spectra[si];
        const std::string label = spectrum_label(spec);
        std::vector<double> gaps, errs, news, halkos;
        Index hits = 0;
        // Two derived seeds per trial: one for the problem draw, one for the
        // test matrix, offset per spectrum so cells never share a stream.
        const std::uint64_t base =
            seed + 0x9E3779B9ull * static_cast<std::uint64_t>(si + 1);
        for (Index t = 0; t < trials; ++t) {
            PicardProblem prob = gen_picard(
                spec, spec.n, base + 2 * static_cast<std::uint64_t>(t));
            SketchResult r =
                sketch(prob.A, k, p, SketchVariant::RangeLeft,
                       base + 2 * static_cast<std::uint64_t>(t) + 1);
            SharpnessRow row;
            row.spectrum = label;
            row.trial = t;
            row.k = k;
            row.p = p;
            row.err = r.err;
            row.new_bound = r.new_bound;
            row.halko_bound = r.halko_bound;
            row.projector_norm = r.projector_norm;
            const double sigma_k1 = r.halko_bound - r.projector_norm;
            row.indicator = r.projector_norm < sigma_k1;
            row.gap_ratio = r.halko_bound / r.new_bound;
            hits += row.indicator;
            gaps.push_back(row.gap_ratio);
            errs.push_back(row.err);
            news.push_back(row.new_bound);
            halkos.push_back(row.halko_bound);
            study.rows.push_back(std::move(row));
        }
        SharpnessSummary sum;
        sum.spectrum = label;
        sum.trials = trials;
        sum.median_gap_ratio = median_of(gaps);
        sum.median_err = median_of(errs);
        sum.median_new_bound = median_of(news);
        sum.median_halko_bound = median_of(halkos);
        sum.indicator_fraction =
            static_cast<double>(hits) / static_cast<double>(trials);
        study.medians.push_back(std::move(sum));
    }
    return study;
}

void write_sharpness_csv(std::ostream& os, const SharpnessStudy& study) {
    os << "spectrum,trial,k,p,err,new_bound,halko_bound,projector_norm,"
          "indicator\n";
    char buf[200];
    for (const SharpnessRow& r : study.rows) {
        std::snprintf(buf, sizeof buf, ",%lld,%lld,%lld,%.17g,%.17g,%.17g,%.17g,%d\n",
                      static_cast<long long>(r.trial),
                      static_cast<long long>(r.k), static_cast<long long>(r.p),
                      r.err, r.new_bound, r.halko_bound, r.projector_norm,
                      r.indicator ? 1 : 0);
        os << r.spectrum << buf;
    }
}

}  // namespace krylreg
