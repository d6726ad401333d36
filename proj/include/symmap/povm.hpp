#pragma once

// (N,M)-POVMs E_{alpha,k} = I/M + t H_{alpha,k} built from a Hermitian
// operator basis, and certification of their overlap identities.

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "symmap/bases.hpp"

namespace symmap {

/// [alpha-1][k-1] -> operator
using OperatorTable = std::vector<std::vector<ComplexMatrix>>;

/// A POVM element failed the PSD check.
class PovmPsdError : public CertificationError {
public:
    PovmPsdError(std::size_t alpha, std::size_t k, double min_eig)
        : CertificationError("povm: E(" + std::to_string(alpha) + "," + std::to_string(k) +
                             ") not PSD, min eigenvalue " + std::to_string(min_eig)),
          alpha_(alpha), k_(k), min_eig_(min_eig) {}
    std::size_t alpha() const noexcept { return alpha_; }
    std::size_t k() const noexcept { return k_; }
    double min_eigenvalue() const noexcept { return min_eig_; }

private:
    std::size_t alpha_, k_;
    double min_eig_;
};

/// x = d/M^2 + t^2 (M-1)(sqrt M + 1)^2
inline double x_from_t(std::size_t d, std::size_t M, double t) {
    const double sM = std::sqrt(static_cast<double>(M));
    return static_cast<double>(d) / static_cast<double>(M * M) + t * t * static_cast<double>(M - 1) * (sM + 1) * (sM + 1);
}

/// H_{alpha,k} = G_alpha - sqrtM (sqrtM + 1) G_{alpha,k} for k < M, and (sqrtM + 1) G_alpha for k = M,
/// with G_alpha the sum of the group.
inline OperatorTable build_h_operators(const HermitianOperatorBasis& basis, const Tolerances& tol = default_tolerances()) {
    const auto report = validate_basis(basis, tol);
    if (!report.passed)
        throw ContractError("build_h_operators: basis '" + basis.id() + "' fails validation (gram defect " +
                            std::to_string(report.gram_defect) + ")");
    const std::size_t M = basis.outcomes();
    const double sM = std::sqrt(static_cast<double>(M));
    OperatorTable H;
    H.reserve(basis.group_count());
    for (const auto& group : basis.groups()) {
        if (group.size() != M - 1) throw DimensionError("build_h_operators: group size mismatch");
        ComplexMatrix g_alpha(basis.dim(), basis.dim());
        for (const auto& g : group) g_alpha += g;
        std::vector<ComplexMatrix> h;
        h.reserve(M);
        for (const auto& g : group) h.push_back(ComplexMatrix(g_alpha).add_scaled(-sM * (sM + 1), g));
        h.push_back((sM + 1) * g_alpha);
        H.push_back(std::move(h));
    }
    return H;
}

class SymmetricPovm {
public:
    SymmetricPovm(std::size_t d, double t, OperatorTable ops, std::string basis_id)
        : d_(d), t_(t), ops_(std::move(ops)), basis_id_(std::move(basis_id)) {
        if (ops_.empty() || ops_.front().empty()) throw ContractError("povm: empty operator table");
        M_ = ops_.front().size();
        x_ = x_from_t(d_, M_, t_);
    }

    std::size_t dim() const noexcept { return d_; }
    std::size_t group_count() const noexcept { return ops_.size(); }
    std::size_t outcomes() const noexcept { return M_; }
    double t() const noexcept { return t_; }
    double x() const noexcept { return x_; }
    const std::string& basis_id() const noexcept { return basis_id_; }
    const OperatorTable& operators() const noexcept { return ops_; }

    const ComplexMatrix& at(std::size_t alpha, std::size_t k) const {
        if (alpha < 1 || alpha > ops_.size() || k < 1 || k > M_) throw ContractError("povm: index out of range");
        return ops_[alpha - 1][k - 1];
    }

private:
    std::size_t d_;
    std::size_t M_ = 0;
    double t_;
    double x_ = 0.0;
    OperatorTable ops_;
    std::string basis_id_;
};

namespace detail {

inline double povm_min_eigenvalue(const OperatorTable& H, std::size_t d, double t, const Tolerances& tol,
                                  std::size_t* worst_alpha = nullptr, std::size_t* worst_k = nullptr) {
    const std::size_t M = H.front().size();
    double worst = std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < H.size(); ++a)
        for (std::size_t k = 0; k < M; ++k) {
            const auto e = ComplexMatrix::identity(d) * (1.0 / static_cast<double>(M)) + t * H[a][k];
            const double m = min_eigenvalue(e, tol);
            if (m < worst) {
                worst = m;
                if (worst_alpha) *worst_alpha = a + 1;
                if (worst_k) *worst_k = k + 1;
            }
        }
    return worst;
}

} // namespace detail

inline SymmetricPovm build_povm(const HermitianOperatorBasis& basis, double t, const Tolerances& tol = default_tolerances()) {
    const auto H = build_h_operators(basis, tol);
    const std::size_t d = basis.dim();
    const std::size_t M = basis.outcomes();
    if (!(t > 0.0)) throw ContractError("build_povm: t must be > 0 (x = d/M^2 is excluded)");
    const double x = x_from_t(d, M, t);
    const double dd = static_cast<double>(d);
    const double MM = static_cast<double>(M);
    const double upper = std::min(dd * dd / (MM * MM), dd / MM);
    if (!(x > dd / (MM * MM)) || x > upper + tol.xt_relation)
        throw ContractError("build_povm: x = " + std::to_string(x) + " outside (d/M^2, min(d^2/M^2, d/M)]");

    OperatorTable E;
    E.reserve(H.size());
    for (std::size_t a = 0; a < H.size(); ++a) {
        std::vector<ComplexMatrix> group;
        for (std::size_t k = 0; k < M; ++k) {
            auto e = ComplexMatrix::identity(d) * (1.0 / MM) + t * H[a][k];
            const double m = min_eigenvalue(e, tol);
            if (m < -tol.psd) throw PovmPsdError(a + 1, k + 1, m);
            group.push_back(std::move(e));
        }
        E.push_back(std::move(group));
    }
    return {d, t, std::move(E), basis.id()};
}

struct TOptResult {
    double t = 0.0;
    double x = 0.0;
    double min_eigenvalue = 0.0; // over all E_{alpha,k} at t
    int iterations = 0;
};

/// Largest t keeping every E_{alpha,k} PSD, by bisection to tol.t_opt_abs.
inline TOptResult find_t_opt(const HermitianOperatorBasis& basis, const Tolerances& tol = default_tolerances()) {
    const auto H = build_h_operators(basis, tol);
    const std::size_t d = basis.dim();
    const std::size_t M = basis.outcomes();
    auto feasible = [&](double t) { return detail::povm_min_eigenvalue(H, d, t, tol) >= 0.0; };

    double hmax = 0.0;
    for (const auto& g : H)
        for (const auto& h : g) {
            const auto ev = eigenvalues_hermitian(h, tol);
            hmax = std::max({hmax, std::abs(ev.front()), std::abs(ev.back())});
        }
    if (hmax == 0.0) throw CertificationError("find_t_opt: all H operators vanish");

    double lo = 0.0;
    double hi = std::sqrt(static_cast<double>(d) / static_cast<double>(M)) / hmax;
    while (feasible(hi)) {
        lo = hi;
        hi *= 2.0;
    }
    if (!feasible(std::min(hi, 1e-9)))
        throw CertificationError("find_t_opt: basis '" + basis.id() + "' infeasible even for tiny t");

    TOptResult r;
    while (hi - lo > tol.t_opt_abs) {
        const double mid = 0.5 * (lo + hi);
        (feasible(mid) ? lo : hi) = mid;
        ++r.iterations;
    }
    r.t = lo;
    r.x = x_from_t(d, M, lo);
    r.min_eigenvalue = detail::povm_min_eigenvalue(H, d, lo, tol);
    return r;
}

struct SymmetryReport {
    double completeness_defect = 0.0; // max_alpha || sum_k E_{alpha,k} - I ||_max
    double min_eigenvalue = 0.0;
    double trace_defect = 0.0;        // Tr E = d/M
    double purity_defect = 0.0;       // Tr E^2 = x
    double intra_defect = 0.0;        // Tr E_k E_l = (d - Mx)/(M(M-1))
    double inter_defect = 0.0;        // Tr E_{alpha,k} E_{beta,l} = d/M^2
    double xt_defect = 0.0;           // mean measured Tr E^2 against x(t)
    bool passed = false;
    std::string failed_identity;      // first identity over tolerance, empty if none
};

inline SymmetryReport certify_symmetry(const SymmetricPovm& p, const Tolerances& tol = default_tolerances()) {
    SymmetryReport r;
    const double d = static_cast<double>(p.dim());
    const double M = static_cast<double>(p.outcomes());
    const double x = p.x();
    const double y = M > 1 ? (d - M * x) / (M * (M - 1)) : 0.0;
    const auto& E = p.operators();
    double purity_sum = 0.0;
    std::size_t purity_n = 0;
    r.min_eigenvalue = std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < E.size(); ++a) {
        ComplexMatrix sum(p.dim(), p.dim());
        for (std::size_t k = 0; k < E[a].size(); ++k) {
            sum += E[a][k];
            r.min_eigenvalue = std::min(r.min_eigenvalue, min_eigenvalue(E[a][k], tol));
            r.trace_defect = std::max(r.trace_defect, std::abs(E[a][k].trace() - d / M));
            for (std::size_t b = a; b < E.size(); ++b)
                for (std::size_t l = (b == a ? k : 0); l < E[b].size(); ++l) {
                    const Complex overlap = trace_of_product(E[a][k], E[b][l]);
                    if (a == b && k == l) {
                        r.purity_defect = std::max(r.purity_defect, std::abs(overlap - x));
                        purity_sum += overlap.real();
                        ++purity_n;
                    } else if (a == b) {
                        r.intra_defect = std::max(r.intra_defect, std::abs(overlap - y));
                    } else {
                        r.inter_defect = std::max(r.inter_defect, std::abs(overlap - d / (M * M)));
                    }
                }
        }
        r.completeness_defect = std::max(r.completeness_defect, max_abs_diff(sum, ComplexMatrix::identity(p.dim())));
    }
    r.xt_defect = std::abs(purity_sum / static_cast<double>(purity_n) - x);
    if (r.trace_defect > tol.symmetry) r.failed_identity = "trace";
    else if (r.purity_defect > tol.symmetry) r.failed_identity = "purity";
    else if (r.intra_defect > tol.symmetry) r.failed_identity = "intra";
    else if (r.inter_defect > tol.symmetry) r.failed_identity = "inter";
    r.passed = r.failed_identity.empty();
    return r;
}

/// Rank of the Gram matrix Tr(E_i E_j) over all N*M elements.
inline std::size_t povm_gram_rank(const SymmetricPovm& p, const Tolerances& tol = default_tolerances()) {
    std::vector<const ComplexMatrix*> all;
    for (const auto& g : p.operators())
        for (const auto& e : g) all.push_back(&e);
    ComplexMatrix gram(all.size(), all.size());
    for (std::size_t i = 0; i < all.size(); ++i)
        for (std::size_t j = 0; j < all.size(); ++j) gram(i, j) = hs_inner(*all[i], *all[j]);
    const auto ev = eigenvalues_hermitian(gram, tol);
    const double cut = 1e-9 * std::max(1.0, ev.back());
    return static_cast<std::size_t>(std::count_if(ev.begin(), ev.end(), [&](double l) { return l > cut; }));
}

/// Inverts E = I/M + tH to recover the basis groups: G_alpha = H_M/(sqrtM + 1) and
/// G_{alpha,k} = (G_alpha - H_k)/(sqrtM (sqrtM + 1)).
inline HermitianOperatorBasis recover_basis(const SymmetricPovm& p) {
    const std::size_t M = p.outcomes();
    const double sM = std::sqrt(static_cast<double>(M));
    const auto shift = ComplexMatrix::identity(p.dim()) * (1.0 / static_cast<double>(M));
    std::vector<std::vector<ComplexMatrix>> groups;
    for (const auto& E : p.operators()) {
        const auto g_alpha = (E[M - 1] - shift) * (1.0 / (p.t() * (sM + 1)));
        std::vector<ComplexMatrix> g;
        for (std::size_t k = 0; k + 1 < M; ++k)
            g.push_back((g_alpha - (E[k] - shift) * (1.0 / p.t())) * (1.0 / (sM * (sM + 1))));
        groups.push_back(std::move(g));
    }
    return {p.basis_id(), p.dim(), std::move(groups)};
}

inline json symmetry_report_to_json(const SymmetryReport& r) {
    return {{"completeness_defect", r.completeness_defect}, {"min_eigenvalue", r.min_eigenvalue},
            {"trace_defect", r.trace_defect},               {"purity_defect", r.purity_defect},
            {"intra_defect", r.intra_defect},               {"inter_defect", r.inter_defect},
            {"xt_defect", r.xt_defect},                     {"passed", r.passed},
            {"failed_identity", r.failed_identity}};
}

inline json povm_to_json(const SymmetricPovm& p) {
    json ops = json::array();
    for (std::size_t a = 1; a <= p.group_count(); ++a)
        for (std::size_t k = 1; k <= p.outcomes(); ++k)
            ops.push_back({{"alpha", a}, {"k", k}, {"matrix", matrix_to_json(p.at(a, k))}});
    return {{"basis", p.basis_id()}, {"d", p.dim()}, {"N", p.group_count()}, {"M", p.outcomes()},
            {"t", p.t()},            {"x", p.x()}, {"operators", std::move(ops)}};
}

} // namespace symmap
