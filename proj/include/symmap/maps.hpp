#pragma once

// The trace-preserving maps Phi_0, Phi_alpha, their signed combination Phi and
// the family Phi_z = (1-z) Phi_0 + z Phi.

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "symmap/parallel.hpp"
#include "symmap/povm.hpp"
#include "symmap/random.hpp"

namespace symmap {

/// Real M x M matrix, row-major.
struct Rotation {
    std::string id;
    std::size_t M = 0;
    std::vector<double> entries;

    double operator()(std::size_t k, std::size_t l) const { return entries[k * M + l]; }

    static Rotation identity(std::size_t M) {
        Rotation r{"identity", M, std::vector<double>(M * M, 0.0)};
        for (std::size_t i = 0; i < M; ++i) r.entries[i * M + i] = 1.0;
        return r;
    }

    /// sigma_1, the only non-identity choice for M = 2.
    static Rotation swap() { return {"swap", 2, {0.0, 1.0, 1.0, 0.0}}; }

    /// Cyclic shift e_k -> e_{k+1 mod 5}: O(0,4) = O(1,0) = O(2,1) = O(3,2) = O(4,3) = 1.
    static Rotation cycle5() {
        Rotation r{"cycle5", 5, std::vector<double>(25, 0.0)};
        for (std::size_t k = 0; k < 5; ++k) r.entries[k * 5 + (k + 4) % 5] = 1.0;
        return r;
    }

    static Rotation by_id(std::string_view id, std::size_t M) {
        if (id == "identity") return identity(M);
        if (id == "swap" && M == 2) return swap();
        if (id == "cycle5" && M == 5) return cycle5();
        throw ContractError("rotation '" + std::string(id) + "' unavailable for M=" + std::to_string(M));
    }
};

struct RotationDefects {
    double orthogonality = 0.0; // ||O^T O - I||_max
    double uniform = 0.0;       // ||O 1 - 1||_max
};

inline RotationDefects rotation_defects(const Rotation& o) {
    RotationDefects r;
    const std::size_t M = o.M;
    for (std::size_t i = 0; i < M; ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < M; ++j) {
            row += o(i, j);
            double dot = 0.0;
            for (std::size_t k = 0; k < M; ++k) dot += o(k, i) * o(k, j);
            r.orthogonality = std::max(r.orthogonality, std::abs(dot - (i == j ? 1.0 : 0.0)));
        }
        r.uniform = std::max(r.uniform, std::abs(row - 1.0));
    }
    return r;
}

inline void validate_rotation(const Rotation& o, const Tolerances& tol = default_tolerances()) {
    if (o.M == 0 || o.entries.size() != o.M * o.M) throw DimensionError("rotation '" + o.id + "': bad shape");
    for (double v : o.entries)
        if (!std::isfinite(v)) throw ContractError("rotation '" + o.id + "': non-finite entry");
    const auto r = rotation_defects(o);
    if (r.orthogonality > tol.rotation) throw ContractError("rotation '" + o.id + "': not orthogonal");
    if (r.uniform > tol.rotation) throw ContractError("rotation '" + o.id + "': does not preserve (1,...,1)");
}

class RotationSet {
public:
    RotationSet() = default;
    explicit RotationSet(std::vector<Rotation> members, const Tolerances& tol = default_tolerances())
        : members_(std::move(members)) {
        if (members_.empty()) throw ContractError("rotation set: empty");
        for (const auto& o : members_) {
            if (o.M != members_.front().M) throw DimensionError("rotation set: mixed sizes");
            validate_rotation(o, tol);
        }
    }

    static RotationSet uniform(const Rotation& o, std::size_t N) { return RotationSet(std::vector<Rotation>(N, o)); }

    std::size_t size() const noexcept { return members_.size(); }
    std::size_t M() const noexcept { return members_.empty() ? 0 : members_.front().M; }
    const Rotation& operator[](std::size_t alpha_zero_based) const { return members_.at(alpha_zero_based); }

    std::vector<std::string> ids() const {
        std::vector<std::string> out;
        for (const auto& o : members_) out.push_back(o.id);
        return out;
    }

private:
    std::vector<Rotation> members_;
};

/// Parses "identity", "cycle5", or a comma list with one id per group.
inline RotationSet parse_rotation_set(std::string_view text, std::size_t N, std::size_t M) {
    std::vector<std::string> ids;
    std::size_t start = 0;
    while (true) {
        const auto comma = text.find(',', start);
        ids.emplace_back(text.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    if (ids.size() == 1) return RotationSet::uniform(Rotation::by_id(ids.front(), M), N);
    if (ids.size() != N)
        throw ContractError("rotations: " + std::to_string(ids.size()) + " ids given for N=" + std::to_string(N));
    std::vector<Rotation> members;
    for (const auto& id : ids) members.push_back(Rotation::by_id(id, M));
    return RotationSet(std::move(members));
}

inline ComplexMatrix phi0(const ComplexMatrix& x) {
    x.require_square("phi0");
    return ComplexMatrix::identity(x.rows()) * (x.trace() / static_cast<double>(x.rows()));
}

class MapSpec {
public:
    /// Skips the z range check; for tests that probe non-positive maps.
    struct AnyZ {};

    MapSpec(SymmetricPovm povm, RotationSet rotations, std::size_t L, double z,
            const Tolerances& tol = default_tolerances())
        : MapSpec(std::move(povm), std::move(rotations), L, z, AnyZ{}, tol) {
        if (!(z >= -1.0 && z <= 1.0)) throw ContractError("map spec: z = " + std::to_string(z) + " outside [-1,1]");
    }

    MapSpec(SymmetricPovm povm, RotationSet rotations, std::size_t L, double z, AnyZ,
            const Tolerances& tol = default_tolerances())
        : povm_(std::move(povm)), rotations_(std::move(rotations)), L_(L), z_(z) {
        if (!std::isfinite(z_)) throw ContractError("map spec: z not finite");
        if (L_ > povm_.group_count()) throw ContractError("map spec: L exceeds N");
        if (rotations_.size() != povm_.group_count()) throw DimensionError("map spec: one rotation per group");
        if (rotations_.M() != povm_.outcomes()) throw DimensionError("map spec: rotation size differs from M");
        const double d = static_cast<double>(povm_.dim());
        const double M = static_cast<double>(povm_.outcomes());
        const double t = povm_.t();
        const double sM = std::sqrt(M);
        b_ = (d - 1) * M * M * t * t * (sM + 1) * (sM + 1) / d;
        const double y = (d - M * povm_.x()) / (M * (M - 1));
        b_via_y_ = (d - 1) * M * (povm_.x() - y) / d;
        if (!(b_ > 0.0)) throw ContractError("map spec: b must be > 0");
        if (std::abs(b_ - b_via_y_) > tol.xt_relation * std::max(1.0, b_))
            throw ContractError("map spec: b routes disagree");
        a_ = b_ - static_cast<double>(povm_.group_count()) + 2.0 * static_cast<double>(L_);
        build_transfer();
    }

    const SymmetricPovm& povm() const noexcept { return povm_; }
    const RotationSet& rotations() const noexcept { return rotations_; }
    std::size_t dim() const noexcept { return povm_.dim(); }
    std::size_t L() const noexcept { return L_; }
    double z() const noexcept { return z_; }
    double a() const noexcept { return a_; }
    double b() const noexcept { return b_; }
    double b_via_y() const noexcept { return b_via_y_; }
    /// d^2 x d^2 matrix with vec(Phi_z(X)) = T vec(X), vec row-major.
    const ComplexMatrix& transfer() const noexcept { return transfer_; }

    /// (M/d) sum_{k,l} O_{kl} E_{alpha,k} Tr(X E_{alpha,l}), alpha 1-based.
    ComplexMatrix phi_alpha(std::size_t alpha, const ComplexMatrix& x) const {
        require_input(x, "phi_alpha");
        if (alpha < 1 || alpha > povm_.group_count()) throw ContractError("phi_alpha: alpha out of range");
        const std::size_t M = povm_.outcomes();
        const auto& E = povm_.operators()[alpha - 1];
        const auto& O = rotations_[alpha - 1];
        std::vector<Complex> tr(M);
        for (std::size_t l = 0; l < M; ++l) tr[l] = trace_of_product(x, E[l]);
        ComplexMatrix out(dim(), dim());
        for (std::size_t k = 0; k < M; ++k) {
            Complex c{};
            for (std::size_t l = 0; l < M; ++l) c += O(k, l) * tr[l];
            if (c != Complex{}) out.add_scaled(c, E[k]);
        }
        out *= static_cast<double>(M) / static_cast<double>(dim());
        return out;
    }

    /// (1/b)[a Phi_0 + sum_{alpha>L} Phi_alpha - sum_{alpha<=L} Phi_alpha], summed directly.
    ComplexMatrix phi(const ComplexMatrix& x) const {
        require_input(x, "phi");
        ComplexMatrix out = a_ * phi0(x);
        for (std::size_t alpha = 1; alpha <= povm_.group_count(); ++alpha)
            out.add_scaled(alpha <= L_ ? -1.0 : 1.0, phi_alpha(alpha, x));
        out *= 1.0 / b_;
        return out;
    }

    /// (1-z) Phi_0 + z Phi, summed directly (transfer-matrix free).
    ComplexMatrix phi_z_direct(const ComplexMatrix& x) const {
        ComplexMatrix out = (1.0 - z_) * phi0(x);
        if (z_ != 0.0) out.add_scaled(z_, phi(x));
        return out;
    }

    /// Phi_z(X) through the transfer matrix.
    ComplexMatrix phi_z(const ComplexMatrix& x) const {
        require_input(x, "phi_z");
        const std::size_t d = dim();
        const std::size_t dd = d * d;
        const auto xs = x.entries();
        ComplexMatrix out(d, d);
        for (std::size_t r = 0; r < dd; ++r) {
            Complex s{};
            for (std::size_t c = 0; c < dd; ++c) s += transfer_(r, c) * xs[c];
            out(r / d, r % d) = s;
        }
        return out;
    }

    json to_json() const {
        return {{"basis", povm_.basis_id()}, {"d", dim()}, {"N", povm_.group_count()}, {"M", povm_.outcomes()},
                {"t", povm_.t()},            {"x", povm_.x()}, {"L", L_}, {"z", z_}, {"a", a_}, {"b", b_},
                {"rotations", rotations_.ids()}};
    }

private:
    void require_input(const ComplexMatrix& x, const char* op) const {
        if (x.rows() != dim() || x.cols() != dim())
            throw DimensionError(std::string(op) + ": input must be " + std::to_string(dim()) + "x" +
                                 std::to_string(dim()));
    }

    void build_transfer() {
        const std::size_t d = dim();
        transfer_ = ComplexMatrix(d * d, d * d);
        for (std::size_t k = 0; k < d; ++k)
            for (std::size_t l = 0; l < d; ++l) {
                const auto y = phi_z_direct(ComplexMatrix::unit(d, k, l));
                for (std::size_t i = 0; i < d; ++i)
                    for (std::size_t j = 0; j < d; ++j) transfer_(i * d + j, k * d + l) = y(i, j);
            }
    }

    SymmetricPovm povm_;
    RotationSet rotations_;
    std::size_t L_;
    double z_;
    double a_ = 0.0;
    double b_ = 0.0;
    double b_via_y_ = 0.0;
    ComplexMatrix transfer_;
};

/// Same POVM and rotations at a different z.
inline MapSpec with_z(const MapSpec& s, double z) { return {s.povm(), s.rotations(), s.L(), z}; }

/// Builds a spec on `basis` at its t_opt with identity rotations unless given.
inline MapSpec make_spec(const HermitianOperatorBasis& basis, std::size_t L, double z,
                         const std::optional<RotationSet>& rotations = std::nullopt,
                         const Tolerances& tol = default_tolerances()) {
    const auto topt = find_t_opt(basis, tol);
    auto povm = build_povm(basis, topt.t, tol);
    auto rot = rotations ? *rotations : RotationSet::uniform(Rotation::identity(basis.outcomes()), basis.group_count());
    return {std::move(povm), std::move(rot), L, z, tol};
}

struct PositivityReport {
    std::size_t samples = 0;
    std::uint64_t seed = 0;
    double max_excess = 0.0;     // max Tr[(Phi_z P)^2] - 1/(d-1)
    double min_eigenvalue = 0.0; // min over samples of lambda_min(Phi_z P)
    bool passed = false;
};

/// Sampled check of Tr[(Phi_z P)^2] <= 1/(d-1) over Haar rank-1 projectors P.
inline PositivityReport certify_positivity(const MapSpec& spec, std::size_t samples, std::uint64_t seed = default_seed,
                                           const Tolerances& tol = default_tolerances()) {
    if (samples < 1) throw ContractError("certify_positivity: samples must be >= 1");
    const std::size_t d = spec.dim();
    Rng rng(seed);
    std::vector<ComplexMatrix> inputs;
    inputs.reserve(samples);
    for (std::size_t i = 0; i < samples; ++i) inputs.push_back(haar_projector(d, rng));
    std::vector<double> excess(samples), mins(samples);
    const double bound = 1.0 / static_cast<double>(d - 1);
    parallel_for(samples, [&](std::size_t i) {
        const auto y = spec.phi_z(inputs[i]);
        excess[i] = trace_of_product(y, y).real() - bound;
        mins[i] = min_eigenvalue(y, tol);
    });
    PositivityReport r;
    r.samples = samples;
    r.seed = seed;
    r.max_excess = *std::max_element(excess.begin(), excess.end());
    r.min_eigenvalue = *std::min_element(mins.begin(), mins.end());
    r.passed = r.max_excess <= tol.positivity;
    return r;
}

inline json positivity_report_to_json(const PositivityReport& r) {
    return {{"samples", r.samples}, {"seed", r.seed}, {"max_excess", r.max_excess},
            {"min_eigenvalue", r.min_eigenvalue}, {"passed", r.passed}};
}

/// Reads {"basis", "L", "z", optional "t" (default t_opt), optional "rotations"
/// (one id, or an array with one id per group)}.
inline MapSpec spec_from_json(const json& j, const Tolerances& tol = default_tolerances()) {
    try {
        const auto basis = basis_by_id(j.at("basis").get<std::string>());
        const double t = j.contains("t") ? j.at("t").get<double>() : find_t_opt(basis, tol).t;
        auto povm = build_povm(basis, t, tol);
        std::string rot = "identity";
        if (j.contains("rotations")) {
            const auto& r = j.at("rotations");
            if (r.is_string()) {
                rot = r.get<std::string>();
            } else {
                rot.clear();
                for (const auto& id : r) rot += (rot.empty() ? "" : ",") + id.get<std::string>();
            }
        }
        auto rotations = parse_rotation_set(rot, basis.group_count(), basis.outcomes());
        return {std::move(povm), std::move(rotations), j.at("L").get<std::size_t>(), j.at("z").get<double>(), tol};
    } catch (const json::exception& e) {
        throw ContractError(std::string("map spec json: ") + e.what());
    }
}

} // namespace symmap
