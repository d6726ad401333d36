#pragma once

// Concurrence of pure states and trace-norm lower bounds for mixed states
// from the M = d, L = N = d+1 map with identity rotations.

#include <cmath>
#include <optional>
#include <span>
#include <vector>

#include "symmap/separability.hpp"

namespace symmap {

class SchmidtVector {
public:
    explicit SchmidtVector(std::vector<double> alpha) : alpha_(std::move(alpha)) { validate_schmidt(alpha_); }

    std::size_t dim() const noexcept { return alpha_.size(); }
    std::span<const double> values() const noexcept { return alpha_; }
    double operator[](std::size_t i) const { return alpha_.at(i); }

    /// 2 sum_{i<j} alpha_i alpha_j
    double pair_sum() const {
        double s = 0.0;
        for (std::size_t i = 0; i < alpha_.size(); ++i)
            for (std::size_t j = i + 1; j < alpha_.size(); ++j) s += alpha_[i] * alpha_[j];
        return 2.0 * s;
    }

private:
    std::vector<double> alpha_;
};

/// 2 sqrt(sum_{i<j} alpha_i^2 alpha_j^2)
inline double concurrence_pure(const SchmidtVector& a) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.dim(); ++i)
        for (std::size_t j = i + 1; j < a.dim(); ++j) s += a[i] * a[i] * a[j] * a[j];
    return 2.0 * std::sqrt(s);
}

inline double bound_prefactor(std::size_t d) {
    const double dd = static_cast<double>(d);
    return std::sqrt(2.0 / (dd * (dd - 1)));
}

struct BoundReport {
    double bound_value = 0.0; // raw_bound, or 0 when raw_bound is within the verdict tolerance of 0 or below
    double raw_bound = 0.0;   // sqrt(2/(d(d-1))) (trace_norm - 1)
    double trace_norm = 0.0;
    std::optional<double> comparison_value;
    json spec;
};

inline json bound_report_to_json(const BoundReport& r) {
    json j{{"bound", r.bound_value}, {"raw_bound", r.raw_bound}, {"trace_norm", r.trace_norm}, {"spec", r.spec}};
    j["comparison"] = r.comparison_value ? json(*r.comparison_value) : json(nullptr);
    return j;
}

inline double clamp_bound(double raw, const Tolerances& tol = default_tolerances()) {
    return raw > tol.verdict ? raw : 0.0;
}

/// The fixed (d+1, d) Gell-Mann POVM at t_opt; specs at any z are derived from it.
class Theorem2Bound {
public:
    explicit Theorem2Bound(std::size_t d, const Tolerances& tol = default_tolerances())
        : tol_(tol), povm_(make_povm(d, tol)) {}

    std::size_t dim() const noexcept { return povm_.dim(); }

    MapSpec spec(double z) const {
        return {povm_, RotationSet::uniform(Rotation::identity(povm_.outcomes()), povm_.group_count()),
                povm_.group_count(), z, tol_};
    }

    /// ||(I (x) Phi_z)(rho)||_1 - 1
    double f(const ComplexMatrix& rho, std::size_t dA, double z) const {
        return trace_norm_hermitian(apply_extended_map(spec(z), rho, dA), tol_) - 1.0;
    }

    BoundReport bound(const BipartiteDensityMatrix& rho, double z) const {
        if (rho.dA() != rho.dB()) throw DimensionError("lower_bound_theorem2: needs dA = dB");
        if (rho.dB() != dim()) throw DimensionError("lower_bound_theorem2: state dimension differs from spec");
        const auto s = spec(z);
        BoundReport r;
        r.trace_norm = trace_norm_hermitian(apply_extended_map(s, rho), tol_);
        r.raw_bound = bound_prefactor(dim()) * (r.trace_norm - 1.0);
        r.bound_value = clamp_bound(r.raw_bound, tol_);
        r.spec = s.to_json();
        return r;
    }

private:
    static SymmetricPovm make_povm(std::size_t d, const Tolerances& tol) {
        const auto basis = mum_gellmann_basis(d);
        return build_povm(basis, find_t_opt(basis, tol).t, tol);
    }

    Tolerances tol_;
    SymmetricPovm povm_;
};

inline BoundReport lower_bound_theorem2(const BipartiteDensityMatrix& rho, double z,
                                        const Tolerances& tol = default_tolerances()) {
    if (rho.dA() != rho.dB()) throw DimensionError("lower_bound_theorem2: needs dA = dB");
    return Theorem2Bound(rho.dA(), tol).bound(rho, z);
}

/// Bound for state18 with q2 = q3 = q4: (1/(2 sqrt6)) (g + |g|), g = (2/3) q1 z - z/24 - 1/8.
inline double example1_closed_form(double q1, double z) {
    if (!(q1 >= 0.0 && q1 <= 1.0)) throw ContractError("example1_closed_form: q1 outside [0,1]");
    if (!(z >= -1.0 && z <= 1.0)) throw ContractError("example1_closed_form: z outside [-1,1]");
    const double g = 2.0 / 3.0 * q1 * z - z / 24.0 - 1.0 / 8.0;
    return (g + std::abs(g)) / (2.0 * std::sqrt(6.0));
}

/// Comparison bound (1/(4 sqrt6)) (q1 - q4 + |q1 - q4|).
inline double baseline_bound_ref30(double q1, double q4) {
    if (!std::isfinite(q1) || !std::isfinite(q4) || q1 < 0 || q4 < 0 || q1 > 1 || q4 > 1)
        throw ContractError("baseline bound: q outside [0,1]");
    return (q1 - q4 + std::abs(q1 - q4)) / (4.0 * std::sqrt(6.0));
}

struct PureStateCheck {
    double f = 0.0;
    double pair_sum = 0.0; // 2 sum_{i<j} alpha_i alpha_j
    bool holds = false;    // f <= pair_sum + tol
};

inline PureStateCheck pure_state_f_check(const Theorem2Bound& t2, const SchmidtVector& a, double z,
                                         const Tolerances& tol = default_tolerances()) {
    if (a.dim() != t2.dim()) throw DimensionError("pure_state_f_check: dimension mismatch");
    const auto psi = schmidt_pure_state(a.values());
    PureStateCheck r;
    r.f = t2.f(psi.matrix(), a.dim(), z);
    r.pair_sum = a.pair_sum();
    r.holds = r.f <= r.pair_sum + tol.verdict;
    return r;
}

inline PureStateCheck pure_state_f_check(const SchmidtVector& a, double z, const Tolerances& tol = default_tolerances()) {
    return pure_state_f_check(Theorem2Bound(a.dim(), tol), a, z, tol);
}

} // namespace symmap
