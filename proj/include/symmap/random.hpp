#pragma once

// Seeded sampling of Haar-random vectors, projectors and separable states.

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "symmap/linalg.hpp"

namespace symmap {

using Rng = std::mt19937_64;

inline constexpr std::uint64_t default_seed = 42;

/// Uniform unit vector in C^d (normalized complex Gaussian).
inline std::vector<Complex> haar_vector(std::size_t d, Rng& rng) {
    std::normal_distribution<double> g;
    std::vector<Complex> v(d);
    double norm = 0.0;
    for (auto& c : v) {
        c = {g(rng), g(rng)};
        norm += std::norm(c);
    }
    norm = std::sqrt(norm);
    for (auto& c : v) c /= norm;
    return v;
}

inline ComplexMatrix projector(const std::vector<Complex>& v) { return ComplexMatrix::outer(v, v); }

inline ComplexMatrix haar_projector(std::size_t d, Rng& rng) { return projector(haar_vector(d, rng)); }

inline ComplexMatrix random_product_state(std::size_t dA, std::size_t dB, Rng& rng) {
    return kron(haar_projector(dA, rng), haar_projector(dB, rng));
}

/// Convex mixture of `terms` random product states with Dirichlet(1) weights.
inline ComplexMatrix random_separable_state(std::size_t dA, std::size_t dB, std::size_t terms, Rng& rng) {
    std::exponential_distribution<double> ex(1.0);
    std::vector<double> w(terms);
    double total = 0.0;
    for (auto& x : w) total += (x = ex(rng));
    ComplexMatrix rho(dA * dB, dA * dB);
    for (std::size_t i = 0; i < terms; ++i) rho.add_scaled(w[i] / total, random_product_state(dA, dB, rng));
    return rho;
}

/// Schmidt vector drawn as the moduli of a Haar vector in C^d (uniform on the
/// positive orthant of the unit sphere); unsorted.
inline std::vector<double> random_schmidt_vector(std::size_t d, Rng& rng) {
    const auto v = haar_vector(d, rng);
    std::vector<double> a(d);
    for (std::size_t i = 0; i < d; ++i) a[i] = std::abs(v[i]);
    return a;
}

inline ComplexMatrix random_unitary(std::size_t d, Rng& rng) {
    // Gram-Schmidt on Gaussian columns.
    std::vector<std::vector<Complex>> cols;
    for (std::size_t c = 0; c < d; ++c) {
        auto v = haar_vector(d, rng);
        for (const auto& u : cols) {
            Complex p{};
            for (std::size_t i = 0; i < d; ++i) p += std::conj(u[i]) * v[i];
            for (std::size_t i = 0; i < d; ++i) v[i] -= p * u[i];
        }
        double n = 0.0;
        for (const auto& x : v) n += std::norm(x);
        n = std::sqrt(n);
        for (auto& x : v) x /= n;
        cols.push_back(std::move(v));
    }
    ComplexMatrix u(d, d);
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) u(i, j) = cols[j][i];
    return u;
}

} // namespace symmap
