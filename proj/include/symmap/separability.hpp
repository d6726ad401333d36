#pragma once

// Separability tests with (I (x) Phi_z), plus closed-form spectra for the
// 4x4 family of state18 and for Schmidt-form pure states.

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <span>
#include <vector>

#include "symmap/maps.hpp"

namespace symmap {

class BipartiteDensityMatrix {
public:
    BipartiteDensityMatrix(std::size_t dA, std::size_t dB, ComplexMatrix m,
                           const Tolerances& tol = default_tolerances())
        : dA_(dA), dB_(dB), m_(std::move(m)) {
        require_bipartite(m_, dA_, dB_, "density matrix");
        if (hermitian_defect(m_) > tol.hermitian) throw ContractError("density matrix: not Hermitian");
        if (std::abs(m_.trace() - 1.0) > tol.trace) throw ContractError("density matrix: trace != 1");
        const double lo = min_eigenvalue(m_, tol);
        if (lo < -tol.psd) throw ContractError("density matrix: min eigenvalue " + std::to_string(lo));
    }

    /// Equal local dimensions inferred from the size.
    static BipartiteDensityMatrix square(ComplexMatrix m, const Tolerances& tol = default_tolerances()) {
        const auto d = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(m.rows()))));
        if (d * d != m.rows()) throw DimensionError("density matrix: size is not a square d*d");
        return {d, d, std::move(m), tol};
    }

    std::size_t dA() const noexcept { return dA_; }
    std::size_t dB() const noexcept { return dB_; }
    const ComplexMatrix& matrix() const noexcept { return m_; }

private:
    std::size_t dA_, dB_;
    ComplexMatrix m_;
};

/// (I_dA (x) Phi_z) applied blockwise.
inline ComplexMatrix apply_extended_map(const MapSpec& spec, const ComplexMatrix& rho, std::size_t dA) {
    const std::size_t d = spec.dim();
    require_bipartite(rho, dA, d, "apply_extended_map");
    ComplexMatrix out(dA * d, dA * d);
    ComplexMatrix block(d, d);
    for (std::size_t I = 0; I < dA; ++I)
        for (std::size_t J = 0; J < dA; ++J) {
            for (std::size_t i = 0; i < d; ++i)
                for (std::size_t j = 0; j < d; ++j) block(i, j) = rho(I * d + i, J * d + j);
            const auto y = spec.phi_z(block);
            for (std::size_t i = 0; i < d; ++i)
                for (std::size_t j = 0; j < d; ++j) out(I * d + i, J * d + j) = y(i, j);
        }
    return out;
}

inline ComplexMatrix apply_extended_map(const MapSpec& spec, const BipartiteDensityMatrix& rho) {
    if (rho.dB() != spec.dim()) throw DimensionError("apply_extended_map: dB differs from map dimension");
    return apply_extended_map(spec, rho.matrix(), rho.dA());
}

struct DetectionReport {
    double min_eigenvalue = 0.0;
    double threshold = 0.0; // verdict cut: entangled iff min_eigenvalue < -threshold
    bool entangled = false;
    std::vector<double> spectrum;
    json spec;
};

inline DetectionReport detect(const MapSpec& spec, const BipartiteDensityMatrix& rho,
                              const Tolerances& tol = default_tolerances()) {
    const auto out = apply_extended_map(spec, rho);
    DetectionReport r;
    r.spectrum = eigenvalues_hermitian(out, tol);
    r.min_eigenvalue = r.spectrum.front();
    r.threshold = tol.verdict * (1.0 + out.max_abs());
    r.entangled = r.min_eigenvalue < -r.threshold;
    r.spec = spec.to_json();
    return r;
}

inline json detection_report_to_json(const DetectionReport& r) {
    return {{"min_eigenvalue", r.min_eigenvalue}, {"threshold", r.threshold}, {"entangled", r.entangled},
            {"spectrum", r.spectrum},             {"spec", r.spec}};
}

using Q4 = std::array<double, 4>;

inline void validate_q4(const Q4& q) {
    for (double v : q)
        if (!std::isfinite(v) || v < 0.0) throw ContractError("state18: q must be non-negative");
    if (std::abs(q[0] + q[1] + q[2] + q[3] - 1.0) > 1e-12) throw ContractError("state18: q must sum to 1");
}

/// q = (q1, (1-q1)/3, (1-q1)/3, (1-q1)/3)
inline Q4 q4_uniform_rest(double q1) {
    const double r = (1.0 - q1) / 3.0;
    return {q1, r, r, r};
}

/// The 4 (x) 4 state18: diagonal (1/4)(q1,q4,q3,q2, q2,q1,q4,q3, q3,q2,q1,q4, q4,q3,q2,q1)
/// plus q1/4 between every pair of positions 1, 6, 11, 16 (1-based).
inline BipartiteDensityMatrix build_state_18(const Q4& q) {
    validate_q4(q);
    const auto [q1, q2, q3, q4] = q;
    const std::array<double, 16> diag{q1, q4, q3, q2, q2, q1, q4, q3, q3, q2, q1, q4, q4, q3, q2, q1};
    ComplexMatrix m(16, 16);
    for (std::size_t i = 0; i < 16; ++i) m(i, i) = diag[i] / 4.0;
    constexpr std::array<std::size_t, 4> ent{0, 5, 10, 15};
    for (auto i : ent)
        for (auto j : ent)
            if (i != j) m(i, j) = q1 / 4.0;
    return {4, 4, std::move(m)};
}

/// Closed-form spectrum of (I (x) Phi_z)(rho_18) for the (5,4) Gell-Mann spec with L = 5, O = I.
inline std::vector<double> appendix_c_oracle(const Q4& q, double z) {
    validate_q4(q);
    if (!(z >= -1.0 && z <= 1.0)) throw ContractError("appendix_c_oracle: z outside [-1,1]");
    const auto [q1, q2, q3, q4] = q;
    auto entry = [&](double w1, double w4, double w3, double w2) {
        return -z * (w1 * q1 + w4 * q4 + w3 * q3 + w2 * q2 + 1.0) + 1.0 / 8.0 + 5.0 / 4.0 * z;
    };
    constexpr double hi = 3.0 / 8.0;
    constexpr double lo = 5.0 / 24.0;
    const double A = entry(hi, lo, lo, lo);
    const double B = entry(lo, hi, lo, lo);
    const double C = entry(lo, lo, hi, lo);
    const double D = entry(lo, lo, lo, hi);
    std::vector<double> ev{(A - q1 * z / 2.0) / 2.0};
    for (int i = 0; i < 3; ++i) ev.push_back((A + q1 * z / 6.0) / 2.0);
    for (double v : {B, C, D})
        for (int i = 0; i < 4; ++i) ev.push_back(v / 2.0);
    std::sort(ev.begin(), ev.end());
    return ev;
}

/// The state18 detection threshold 1/16 + 3/(16 z).
inline double appendix_c_threshold(double z) { return 1.0 / 16.0 + 3.0 / (16.0 * z); }

/// Smallest q1 at which state18 with q2 = q3 = q4 is flagged, by bisection
/// on the sign of the minimum output eigenvalue.
inline double state18_threshold(const MapSpec& spec, double abs_tol = 1e-12,
                                const Tolerances& tol = default_tolerances()) {
    auto negative = [&](double q1) { return detect(spec, build_state_18(q4_uniform_rest(q1)), tol).min_eigenvalue < 0.0; };
    double lo = 0.0, hi = 1.0;
    if (negative(lo) || !negative(hi))
        throw CertificationError("state18_threshold: no sign change on [0,1] at z = " + std::to_string(spec.z()));
    while (hi - lo > abs_tol) {
        const double mid = 0.5 * (lo + hi);
        (negative(mid) ? hi : lo) = mid;
    }
    return 0.5 * (lo + hi);
}

inline void validate_schmidt(std::span<const double> alpha) {
    if (alpha.empty()) throw ContractError("schmidt vector: empty");
    double s = 0.0;
    for (double a : alpha) {
        if (!std::isfinite(a) || a < 0.0) throw ContractError("schmidt vector: entries must be non-negative");
        s += a * a;
    }
    if (std::abs(s - 1.0) > 1e-12) throw ContractError("schmidt vector: squares must sum to 1");
}

/// |psi><psi| with |psi> = sum_i alpha_i |ii>.
inline BipartiteDensityMatrix schmidt_pure_state(std::span<const double> alpha) {
    validate_schmidt(alpha);
    const std::size_t d = alpha.size();
    std::vector<Complex> psi(d * d);
    for (std::size_t i = 0; i < d; ++i) psi[i * d + i] = alpha[i];
    return {d, d, ComplexMatrix::outer(psi, psi)};
}

/// Closed-form spectrum of (I (x) Phi_z)|psi><psi| for the L = N = d+1, M = d
/// Gell-Mann spec: (d-1+z) alpha_i^2 / (d(d-1)) with multiplicity d-1 each, and
/// the eigenvalues of P with P_ii = (1-z) alpha_i^2 / d, P_ij = -z alpha_i alpha_j / (d-1).
inline std::vector<double> schmidt_block_oracle(std::span<const double> alpha, double z,
                                                const Tolerances& tol = default_tolerances()) {
    validate_schmidt(alpha);
    const std::size_t d = alpha.size();
    const double dd = static_cast<double>(d);
    std::vector<double> ev;
    ev.reserve(d * d);
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t m = 0; m + 1 < d; ++m) ev.push_back((dd - 1 + z) * alpha[i] * alpha[i] / (dd * (dd - 1)));
    ComplexMatrix P(d, d);
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j)
            P(i, j) = i == j ? (1 - z) * alpha[i] * alpha[i] / dd : -z * alpha[i] * alpha[j] / (dd - 1);
    for (double v : eigenvalues_hermitian(P, tol)) ev.push_back(v);
    std::sort(ev.begin(), ev.end());
    return ev;
}

} // namespace symmap
