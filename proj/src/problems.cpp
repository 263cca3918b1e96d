#include "krylreg/problems.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

#include "krylreg/rng.hpp"

namespace krylreg {

namespace {

constexpr double kPi = std::numbers::pi;

// Midpoint nodes of [lo, hi] with n cells.
Vector midpoints(double lo, double hi, Index n) {
    const double h = (hi - lo) / static_cast<double>(n);
    Vector s(n);
    for (Index i = 0; i < n; ++i)
        s[i] = lo + (static_cast<double>(i) + 0.5) * h;
    return s;
}

GeneratedProblem make_shaw(Index n) {
    const double h = kPi / static_cast<double>(n);
    Vector s = midpoints(-kPi / 2, kPi / 2, n);
    GeneratedProblem p;
    p.A.resize(n, n);
    for (Index i = 0; i < n; ++i) {
        for (Index j = 0; j < n; ++j) {
            const double u = kPi * (std::sin(s[i]) + std::sin(s[j]));
            // sinc^2 with its removable singularity at u = 0; the grid is
            // symmetric, so u = 0 occurs exactly on the anti-diagonal.
            const double sinc2 =
                std::abs(u) < 1e-300 ? 1.0 : std::pow(std::sin(u) / u, 2);
            const double c = std::cos(s[i]) + std::cos(s[j]);
            p.A(i, j) = h * c * c * sinc2;
        }
    }
    p.x_true.resize(n);
    for (Index i = 0; i < n; ++i) {
        const double t = s[i];
        p.x_true[i] = 2.0 * std::exp(-6.0 * (t - 0.8) * (t - 0.8)) +
                      std::exp(-2.0 * (t + 0.5) * (t + 0.5));
    }
    return p;
}

GeneratedProblem make_gravity(Index n) {
    const double d = 0.375;  // adopted depth, see header note
    const double h = 1.0 / static_cast<double>(n);
    Vector s = midpoints(0.0, 1.0, n);
    GeneratedProblem p;
    p.A.resize(n, n);
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < n; ++j) {
            const double dt = s[i] - s[j];
            p.A(i, j) = h * d / std::pow(d * d + dt * dt, 1.5);
        }
    p.x_true.resize(n);
    for (Index i = 0; i < n; ++i)
        p.x_true[i] =
            std::sin(kPi * s[i]) + 0.5 * std::sin(2.0 * kPi * s[i]);
    return p;
}

GeneratedProblem make_baart(Index n) {
    const double ht = kPi / static_cast<double>(n);
    Vector s = midpoints(0.0, kPi / 2, n);
    Vector t = midpoints(0.0, kPi, n);
    GeneratedProblem p;
    p.A.resize(n, n);
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < n; ++j)
            p.A(i, j) = ht * std::exp(s[i] * std::cos(t[j]));
    p.x_true.resize(n);
    for (Index j = 0; j < n; ++j) p.x_true[j] = std::sin(t[j]);
    return p;
}

GeneratedProblem make_phillips(Index n) {
    const double h = 12.0 / static_cast<double>(n);
    Vector s = midpoints(-6.0, 6.0, n);
    auto phi = [](double u) {
        return std::abs(u) < 3.0 ? 1.0 + std::cos(kPi * u / 3.0) : 0.0;
    };
    GeneratedProblem p;
    p.A.resize(n, n);
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < n; ++j) p.A(i, j) = h * phi(s[i] - s[j]);
    p.x_true.resize(n);
    for (Index i = 0; i < n; ++i) p.x_true[i] = phi(s[i]);
    return p;
}

GeneratedProblem make_heat(Index n) {
    const double kappa = 1.0;
    const double h = 1.0 / static_cast<double>(n);
    GeneratedProblem p;
    p.A = Matrix::Zero(n, n);
    // Volterra kernel k(s - t) evaluated at u = (i - j + 1/2) h; lower
    // triangular by causality.
    for (Index i = 1; i <= n; ++i)
        for (Index j = 1; j <= i; ++j) {
            const double u = (static_cast<double>(i - j) + 0.5) * h;
            p.A(i - 1, j - 1) = h * std::pow(u, -1.5) /
                                (2.0 * kappa * std::sqrt(kPi)) *
                                std::exp(-1.0 / (4.0 * kappa * kappa * u));
        }
    Vector t = midpoints(0.0, 1.0, n);
    p.x_true.resize(n);
    for (Index i = 0; i < n; ++i)
        p.x_true[i] = 25.0 * t[i] * t[i] * (1.0 - t[i]) * (1.0 - t[i]);
    return p;
}

GeneratedProblem make_deriv2(Index n) {
    const double h = 1.0 / static_cast<double>(n);
    Vector s = midpoints(0.0, 1.0, n);
    GeneratedProblem p;
    p.A.resize(n, n);
    // Green's function of the second derivative with zero boundary values.
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < n; ++j)
            p.A(i, j) = h * (s[i] < s[j] ? s[i] * (s[j] - 1.0)
                                         : s[j] * (s[i] - 1.0));
    p.x_true = s;
    return p;
}

}  // namespace

GeneratedProblem gen_classic(const std::string& name, Index n) {
    if (n < 8)
        throw std::invalid_argument("gen_classic: n must be at least 8");
    if (name == "shaw") return make_shaw(n);
    if (name == "gravity") return make_gravity(n);
    if (name == "baart") return make_baart(n);
    if (name == "phillips") return make_phillips(n);
    if (name == "heat") return make_heat(n);
    if (name == "deriv2") return make_deriv2(n);
    throw std::invalid_argument("gen_classic: unknown problem '" + name + "'");
}

Vector SpectrumSpec::sigma() const {
    Vector s(n);
    for (Index j = 1; j <= n; ++j) {
        s[j - 1] = kind == Kind::Severe
                       ? std::pow(param, -static_cast<double>(j))
                       : std::pow(static_cast<double>(j), -param);
    }
    return s;
}

void SpectrumSpec::validate() const {
    if (n < 1) throw std::invalid_argument("SpectrumSpec: n must be positive");
    if (beta <= 0.0)
        throw std::invalid_argument("SpectrumSpec: beta must be positive");
    switch (kind) {
        case Kind::Severe:
            if (param <= 1.0)
                throw std::invalid_argument("SpectrumSpec: rho must exceed 1");
            break;
        case Kind::Moderate:
            if (param <= 1.0)
                throw std::invalid_argument(
                    "SpectrumSpec: moderate alpha must exceed 1");
            break;
        case Kind::Mild:
            if (param <= 0.5 || param > 1.0)
                throw std::invalid_argument(
                    "SpectrumSpec: mild alpha must lie in (1/2, 1]");
            break;
    }
}

PicardProblem gen_picard(const SpectrumSpec& spec, Index m, std::uint64_t seed) {
    spec.validate();
    if (m < spec.n)
        throw std::invalid_argument("gen_picard: m must be at least spec.n");
    Rng rng(seed);
    PicardProblem p;
    p.sigma = spec.sigma();
    // Haar bases via sign-fixed QR; the m x n case takes the leading columns
    // of an m x m draw's QR, which is Haar on the Stiefel manifold.
    QrCompact qu = qr_compact(rng.gaussian_matrix(m, spec.n));
    for (Index j = 0; j < spec.n; ++j)
        if (qu.R(j, j) < 0.0) qu.Q.col(j) = -qu.Q.col(j);
    p.U = qu.Q;
    p.V = rng.haar_orthogonal(spec.n);
    p.A = p.U * p.sigma.asDiagonal() * p.V.transpose();
    Vector coef(spec.n);
    for (Index i = 0; i < spec.n; ++i) coef[i] = std::pow(p.sigma[i], spec.beta);
    p.x_true = p.V * coef;
    return p;
}

NoisyRhs add_noise(const Vector& b_true, double epsilon, std::uint64_t seed) {
    if (epsilon <= 0.0)
        throw std::invalid_argument("add_noise: epsilon must be positive");
    const double nb = b_true.norm();
    if (nb == 0.0) throw std::invalid_argument("add_noise: zero b_true");
    // Separate stream offset keeps noise independent of generator draws that
    // used the same user-facing seed.
    Rng rng(seed + 0x9e3779b97f4a7c15ull);
    NoisyRhs out;
    out.e = rng.gaussian_vector(b_true.size());
    out.e *= epsilon * nb / out.e.norm();
    out.b = b_true + out.e;
    return out;
}

ProblemInstance make_instance(const std::string& name,
                              const GeneratedProblem& p, double epsilon,
                              std::uint64_t seed) {
    ProblemInstance inst;
    inst.name = name;
    inst.A = p.A;
    inst.x_true = p.x_true;
    inst.b_true = p.A * p.x_true;
    NoisyRhs rhs = add_noise(inst.b_true, epsilon, seed);
    inst.e = rhs.e;
    inst.b = rhs.b;
    inst.epsilon = epsilon;
    inst.seed = seed;
    return inst;
}

void write_matrix_text(const std::filesystem::path& path, const Matrix& A) {
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("write_matrix_text: cannot open " +
                                 path.string());
    out << A.rows() << ' ' << A.cols() << '\n';
    char buf[32];
    for (Index i = 0; i < A.rows(); ++i) {
        for (Index j = 0; j < A.cols(); ++j) {
            std::snprintf(buf, sizeof buf, "%.17g", A(i, j));
            out << buf << (j + 1 < A.cols() ? " " : "");
        }
        out << '\n';
    }
}

Matrix read_matrix_text(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("read_matrix_text: cannot open " +
                                 path.string());
    Index rows = 0, cols = 0;
    in >> rows >> cols;
    if (!in || rows < 1 || cols < 1)
        throw std::runtime_error("read_matrix_text: bad header in " +
                                 path.string());
    Matrix A(rows, cols);
    for (Index i = 0; i < rows; ++i)
        for (Index j = 0; j < cols; ++j)
            if (!(in >> A(i, j)))
                throw std::runtime_error("read_matrix_text: truncated data in " +
                                         path.string());
    return A;
}

}  // namespace krylreg
