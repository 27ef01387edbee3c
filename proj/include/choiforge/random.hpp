#pragma once

// Seeded random matrices. Every generator takes an explicit engine or seed;
// there is no global RNG state.

#include <cstdint>
#include <random>

#include "choiforge/linalg.hpp"

namespace choiforge {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer; derives independent stream seeds from (root, index).
inline std::uint64_t derive_seed(std::uint64_t root, std::uint64_t index) {
    std::uint64_t z = root + 0x9E3779B97F4A7C15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Independent standard complex Gaussian entries (real and imaginary parts N(0, 1/2)).
inline ComplexMatrix random_gaussian_matrix(std::size_t rows, std::size_t cols, Rng& rng) {
    std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
    ComplexMatrix m(rows, cols);
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j) {
            const double re = normal(rng);
            const double im = normal(rng);
            m(i, j) = cplx(re, im);
        }
    return m;
}

/// Orthonormalizes the columns of m in place (modified Gram-Schmidt, two passes).
/// Requires m.rows() >= m.cols() and full column rank.
inline ComplexMatrix orthonormalize_columns(ComplexMatrix m) {
    if (m.rows() < m.cols()) {
        throw Error(ErrorKind::invalid_argument, "orthonormalize_columns: more columns than rows in " + m.shape());
    }
    for (std::size_t c = 0; c < m.cols(); ++c) {
        for (int pass = 0; pass < 2; ++pass) {
            for (std::size_t prev = 0; prev < c; ++prev) {
                cplx proj = 0.0;
                for (std::size_t r = 0; r < m.rows(); ++r) proj += std::conj(m(r, prev)) * m(r, c);
                for (std::size_t r = 0; r < m.rows(); ++r) m(r, c) -= proj * m(r, prev);
            }
        }
        double norm = 0.0;
        for (std::size_t r = 0; r < m.rows(); ++r) norm += std::norm(m(r, c));
        norm = std::sqrt(norm);
        if (norm < 1e-12) {
            throw Error(ErrorKind::invalid_argument, "orthonormalize_columns: rank-deficient input");
        }
        for (std::size_t r = 0; r < m.rows(); ++r) m(r, c) /= norm;
    }
    return m;
}

/// Haar-distributed unitary (QR of a Ginibre matrix with positive R diagonal).
inline ComplexMatrix random_unitary(std::size_t n, Rng& rng) {
    return orthonormalize_columns(random_gaussian_matrix(n, n, rng));
}

/// rows x cols isometry (V^dagger V = I), rows >= cols.
inline ComplexMatrix random_isometry(std::size_t rows, std::size_t cols, Rng& rng) {
    return orthonormalize_columns(random_gaussian_matrix(rows, cols, rng));
}

/// Random density matrix G G^dagger / Tr(G G^dagger) with G an n x rank Ginibre matrix.
inline ComplexMatrix random_density_matrix(std::size_t n, Rng& rng, std::size_t rank = 0) {
    const auto g = random_gaussian_matrix(n, rank == 0 ? n : rank, rng);
    auto rho = multiply(g, adjoint(g));
    rho *= 1.0 / rho.trace().real();
    return rho;
}

inline ComplexMatrix random_hermitian(std::size_t n, Rng& rng) {
    const auto g = random_gaussian_matrix(n, n, rng);
    return hermitian_part(g);
}

/// Random unit column vector of length n.
inline ComplexMatrix random_unit_vector(std::size_t n, Rng& rng) {
    auto v = random_gaussian_matrix(n, 1, rng);
    v *= 1.0 / frobenius_norm(v);
    return v;
}

/// Positive unit-norm coefficient vector with every entry >= floor (rejection sampling).
/// Requires floor * sqrt(n) < 1.
inline std::vector<double> random_schmidt_coefficients(std::size_t n, double floor, Rng& rng) {
    if (!(floor >= 0.0) || floor * std::sqrt(static_cast<double>(n)) >= 1.0) {
        throw Error(ErrorKind::invalid_argument, "random_schmidt_coefficients: floor too large for dimension");
    }
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (;;) {
        std::vector<double> a(n);
        double norm2 = 0.0;
        for (auto& x : a) {
            x = u(rng);
            norm2 += x * x;
        }
        const double norm = std::sqrt(norm2);
        bool ok = norm > 0.0;
        for (auto& x : a) {
            x /= norm;
            ok = ok && x >= floor;
        }
        if (ok) return a;
    }
}

}  // namespace choiforge
