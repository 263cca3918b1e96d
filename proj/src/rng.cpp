#include "krylreg/rng.hpp"

#include <cmath>
#include <numbers>

namespace krylreg {

double Rng::gaussian() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    // u1 in (0, 1] keeps the log finite.
    const double u1 = 1.0 - uniform();
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
}

Vector Rng::gaussian_vector(Index n) {
    Vector v(n);
    for (Index i = 0; i < n; ++i) v[i] = gaussian();
    return v;
}

Matrix Rng::gaussian_matrix(Index rows, Index cols) {
    Matrix m(rows, cols);
    // Column-major fill order is part of the determinism contract.
    for (Index j = 0; j < cols; ++j)
        for (Index i = 0; i < rows; ++i) m(i, j) = gaussian();
    return m;
}

Matrix Rng::haar_orthogonal(Index n) {
    QrCompact qr = qr_compact(gaussian_matrix(n, n));
    for (Index j = 0; j < n; ++j)
        if (qr.R(j, j) < 0.0) qr.Q.col(j) = -qr.Q.col(j);
    return qr.Q;
}

}  // namespace krylreg
