// Deterministic random streams. Every stochastic quantity in the library is
// drawn through this class so that a (seed, call sequence) pair produces the
// same bytes on every platform. std::mt19937_64 is specified exactly by the
// standard; the Gaussian transform is done by hand because the distribution
// adapters in <random> are implementation-defined.

#pragma once

#include <cstdint>
#include <random>

#include "krylreg/dense_core.hpp"

namespace krylreg {

class Rng {
  public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    // Uniform on [0, 1), 53-bit resolution.
    double uniform() {
        return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    }

    // Standard normal via the trigonometric Box-Muller transform. One spare
    // deviate is cached per stream, never across streams.
    double gaussian();

    Vector gaussian_vector(Index n);
    Matrix gaussian_matrix(Index rows, Index cols);

    // Haar-distributed orthogonal matrix: QR of a Gaussian matrix with column
    // signs fixed so the triangular factor has a positive diagonal.
    Matrix haar_orthogonal(Index n);

  private:
    std::mt19937_64 gen_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace krylreg
