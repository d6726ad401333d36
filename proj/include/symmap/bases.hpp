#pragma once

// Orthonormal Hermitian operator bases {G0 = I/sqrt(d), G_{alpha,k}} and the
// fixed (alpha, k) index tables used by the worked examples.

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "symmap/linalg.hpp"
#include "symmap/matrix_json.hpp"

namespace symmap {

/// N groups of (M-1) traceless Hermitian operators plus G0 = I/sqrt(d).
/// Indices alpha and k are 1-based everywhere in the public API.
class HermitianOperatorBasis {
public:
    HermitianOperatorBasis() = default;

    HermitianOperatorBasis(std::string id, std::size_t d, std::vector<std::vector<ComplexMatrix>> groups)
        : id_(std::move(id)), d_(d), groups_(std::move(groups)) {
        if (d_ < 2) throw ContractError("basis: dimension must be >= 2");
        if (groups_.empty() || groups_.front().empty()) throw ContractError("basis: needs at least one operator");
        for (const auto& g : groups_) {
            if (g.size() != groups_.front().size())
                throw DimensionError("basis '" + id_ + "': groups must all have the same size");
            for (const auto& op : g)
                if (op.rows() != d_ || op.cols() != d_) throw DimensionError("basis '" + id_ + "': operator size");
        }
        g0_ = ComplexMatrix::identity(d_) * (1.0 / std::sqrt(static_cast<double>(d_)));
    }

    const std::string& id() const noexcept { return id_; }
    std::size_t dim() const noexcept { return d_; }
    std::size_t group_count() const noexcept { return groups_.size(); }
    /// Operators per group (M - 1).
    std::size_t group_size() const noexcept { return groups_.front().size(); }
    /// POVM outcomes per group this basis feeds.
    std::size_t outcomes() const noexcept { return group_size() + 1; }
    std::size_t operator_count() const noexcept { return group_count() * group_size(); }
    bool informationally_complete() const noexcept { return operator_count() + 1 == d_ * d_; }

    const ComplexMatrix& g0() const noexcept { return g0_; }
    const std::vector<std::vector<ComplexMatrix>>& groups() const noexcept { return groups_; }

    const ComplexMatrix& op(std::size_t alpha, std::size_t k) const {
        if (alpha < 1 || alpha > group_count() || k < 1 || k > group_size())
            throw ContractError("basis '" + id_ + "': index (" + std::to_string(alpha) + "," + std::to_string(k) +
                                ") out of range");
        return groups_[alpha - 1][k - 1];
    }

    /// Flat order G_{1,1}, G_{1,2}, ..., G_{N,M-1} (G0 excluded).
    std::vector<ComplexMatrix> flat() const {
        std::vector<ComplexMatrix> out;
        out.reserve(operator_count());
        for (const auto& g : groups_) out.insert(out.end(), g.begin(), g.end());
        return out;
    }

    /// {G0, G_1, ..., G_n} in flat order.
    std::vector<ComplexMatrix> flat_with_g0() const {
        auto out = flat();
        out.insert(out.begin(), g0_);
        return out;
    }

    /// Same operators, regrouped into consecutive chunks of `size` in flat order.
    HermitianOperatorBasis regrouped(std::size_t size, std::string id) const {
        const auto ops = flat();
        if (size == 0 || ops.size() % size != 0)
            throw DimensionError("basis regroup: " + std::to_string(ops.size()) + " operators not divisible by " +
                                 std::to_string(size));
        std::vector<std::vector<ComplexMatrix>> g;
        for (std::size_t i = 0; i < ops.size(); i += size) g.emplace_back(ops.begin() + i, ops.begin() + i + size);
        return {std::move(id), d_, std::move(g)};
    }

    /// The first `n` groups only.
    HermitianOperatorBasis truncated(std::size_t n) const {
        if (n < 1 || n > group_count())
            throw ContractError("basis truncate: " + std::to_string(n) + " groups requested of " +
                                std::to_string(group_count()));
        if (n == group_count()) return *this;
        return {id_ + "[:" + std::to_string(n) + "]", d_, {groups_.begin(), groups_.begin() + n}};
    }

private:
    std::string id_;
    std::size_t d_ = 0;
    std::vector<std::vector<ComplexMatrix>> groups_;
    ComplexMatrix g0_;
};

struct ValidationReport {
    double hermitian_defect = 0.0;
    double trace_defect = 0.0;
    double gram_defect = 0.0; // max |Tr(G_mu G_nu) - delta_mu,nu| over {G0, G_mu}
    bool passed = false;
};

inline ValidationReport validate_basis(const HermitianOperatorBasis& b, const Tolerances& tol = default_tolerances()) {
    ValidationReport r;
    const auto ops = b.flat_with_g0();
    for (std::size_t i = 1; i < ops.size(); ++i) {
        r.hermitian_defect = std::max(r.hermitian_defect, hermitian_defect(ops[i]));
        r.trace_defect = std::max(r.trace_defect, std::abs(ops[i].trace()));
    }
    for (std::size_t i = 0; i < ops.size(); ++i)
        for (std::size_t j = i; j < ops.size(); ++j) {
            const double target = i == j ? 1.0 : 0.0;
            r.gram_defect = std::max(r.gram_defect, std::abs(hs_inner(ops[i], ops[j]) - target));
        }
    r.passed = r.hermitian_defect <= tol.basis && r.trace_defect <= tol.basis && r.gram_defect <= tol.basis;
    return r;
}

namespace gellmann {

/// (|j><k| + |k><j|)/sqrt2
inline ComplexMatrix symmetric(std::size_t d, std::size_t j, std::size_t k) {
    ComplexMatrix m(d, d);
    m(j, k) = m(k, j) = 1.0 / std::sqrt(2.0);
    return m;
}

/// (-i|j><k| + i|k><j|)/sqrt2, j < k
inline ComplexMatrix antisymmetric(std::size_t d, std::size_t j, std::size_t k) {
    ComplexMatrix m(d, d);
    m(j, k) = Complex{0.0, -1.0 / std::sqrt(2.0)};
    m(k, j) = Complex{0.0, 1.0 / std::sqrt(2.0)};
    return m;
}

/// diag(1, ..., 1, -l, 0, ..., 0)/sqrt(l(l+1)) with l leading ones, 1 <= l < d.
inline ComplexMatrix diagonal(std::size_t d, std::size_t l) {
    ComplexMatrix m(d, d);
    const double s = 1.0 / std::sqrt(static_cast<double>(l * (l + 1)));
    for (std::size_t i = 0; i < l; ++i) m(i, i) = s;
    m(l, l) = -static_cast<double>(l) * s;
    return m;
}

} // namespace gellmann

/// Generalized Gell-Mann matrices: symmetric pairs (i<j, lexicographic), then
/// antisymmetric pairs, then diagonals; returned as a single group of d^2-1.
inline HermitianOperatorBasis gellmann_basis(std::size_t d) {
    if (d < 2) throw ContractError("gellmann_basis: d must be >= 2");
    std::vector<ComplexMatrix> ops;
    ops.reserve(d * d - 1);
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = i + 1; j < d; ++j) ops.push_back(gellmann::symmetric(d, i, j));
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = i + 1; j < d; ++j) ops.push_back(gellmann::antisymmetric(d, i, j));
    for (std::size_t l = 1; l < d; ++l) ops.push_back(gellmann::diagonal(d, l));
    return {"gellmann_d" + std::to_string(d), d, {std::move(ops)}};
}

enum class NamedBasis { d4_5x4, d3_4x3, d3_2x5, d3_mub_7x2 };

inline std::string_view to_string(NamedBasis n) {
    switch (n) {
    case NamedBasis::d4_5x4: return "d4_5x4";
    case NamedBasis::d3_4x3: return "d3_4x3";
    case NamedBasis::d3_2x5: return "d3_2x5";
    case NamedBasis::d3_mub_7x2: return "d3_mub_7x2";
    }
    return "?";
}

inline NamedBasis parse_named_basis(std::string_view s) {
    for (auto n : {NamedBasis::d4_5x4, NamedBasis::d3_4x3, NamedBasis::d3_2x5, NamedBasis::d3_mub_7x2})
        if (to_string(n) == s) return n;
    throw ContractError("unknown basis '" + std::string(s) + "'");
}

/// The four MUB projector triples E_{alpha,k} in d=3 (alpha = 1..4, k = 1..3).
struct MubProjectorSet {
    std::size_t d = 3;
    std::array<std::array<ComplexMatrix, 3>, 4> projectors;

    const ComplexMatrix& at(std::size_t alpha, std::size_t k) const { return projectors.at(alpha - 1).at(k - 1); }
};

inline MubProjectorSet mub_projectors_d3() {
    const Complex w = std::polar(1.0, 2.0 * std::numbers::pi / 3.0);
    const Complex w2 = w * w;
    const Complex o = 1.0;
    auto third = [](ComplexMatrix m) { return m * (1.0 / 3.0); };
    MubProjectorSet s;
    s.projectors[0] = {ComplexMatrix::diagonal({1, 0, 0}), ComplexMatrix::diagonal({0, 1, 0}),
                       ComplexMatrix::diagonal({0, 0, 1})};
    s.projectors[1] = {third({{o, o, o}, {o, o, o}, {o, o, o}}), third({{o, w2, w}, {w, o, w2}, {w2, w, o}}),
                       third({{o, w, w2}, {w2, o, w}, {w, w2, o}})};
    s.projectors[2] = {third({{o, w2, w2}, {w, o, o}, {w, o, o}}), third({{o, w, o}, {w2, o, w2}, {o, w, o}}),
                       third({{o, o, w}, {o, o, w}, {w2, w2, o}})};
    s.projectors[3] = {third({{o, w, w}, {w2, o, o}, {w2, o, o}}), third({{o, w2, o}, {w, o, w}, {o, w2, o}}),
                       third({{o, o, w2}, {o, o, w2}, {w, w, o}})};
    return s;
}

namespace detail {

/// MUB-derived operators grouped by MUB index, with a chosen prefactor for the
/// second member of groups 2..4.
inline HermitianOperatorBasis mub_operators(double second_prefactor, std::string id) {
    const double r3 = std::sqrt(3.0);
    const Complex i{0.0, 1.0};
    const Complex u = Complex{1.0, -1.0} * (1.0 + r3);
    const Complex v{2.0 + r3, 1.0};
    const Complex uc = std::conj(u);
    const Complex vc = std::conj(v);
    const Complex z = 0.0;
    const double c1 = 1.0 / (r3 * (1.0 + r3));
    const double c2 = 1.0 / (2.0 * r3 * (1.0 + r3));
    const double cs = second_prefactor;

    std::vector<std::vector<ComplexMatrix>> g(4);
    g[0] = {c1 * ComplexMatrix::diagonal({-2.0 - r3, 1.0, 1.0 + r3}),
            c1 * ComplexMatrix::diagonal({1.0, -2.0 - r3, 1.0 + r3})};
    g[1] = {c2 * ComplexMatrix{{z, -vc, -v}, {-v, z, -vc}, {-vc, -v, z}},
            cs * ComplexMatrix{{z, i * vc, -i * v}, {-i * v, z, i * vc}, {i * vc, -i * v, z}}};
    g[2] = {c2 * ComplexMatrix{{z, uc, i * vc}, {u, z, -vc}, {-i * v, -v, z}},
            cs * ComplexMatrix{{z, u, -vc}, {uc, z, i * vc}, {-v, -i * v, z}}};
    g[3] = {c2 * ComplexMatrix{{z, u, -i * v}, {uc, z, -v}, {i * vc, -vc, z}},
            cs * ComplexMatrix{{z, uc, -v}, {u, z, -i * v}, {-vc, i * vc, z}}};
    return {std::move(id), 3, std::move(g)};
}

} // namespace detail

/// The d=3 MUB-derived operators with their printed prefactors. The printed
/// 1/(sqrt3(1+sqrt3)) on G_{2,2}, G_{3,2}, G_{4,2} gives them norm 2, so this
/// set fails validate_basis; it is kept for reporting.
inline HermitianOperatorBasis mub_basis_d3_printed() {
    return detail::mub_operators(1.0 / (std::sqrt(3.0) * (1.0 + std::sqrt(3.0))), "d3_mub_printed");
}

struct MubBasisBundle {
    MubProjectorSet projectors;
    HermitianOperatorBasis basis;           // 4 groups of 2, orthonormal
    ValidationReport printed_report;        // defects with the printed prefactors
    ValidationReport report;                // defects of `basis`
};

/// MUB projectors and the orthonormal Hermitian basis derived from them. Each
/// G_{alpha,k} lies in span{E_{alpha,k} - I/3}; G_{alpha,2} for alpha >= 2 uses
/// the 1/(2 sqrt3 (1+sqrt3)) prefactor of its partner, which restores the Gram identity.
inline MubBasisBundle mub_basis_d3(const Tolerances& tol = default_tolerances()) {
    MubBasisBundle out;
    out.projectors = mub_projectors_d3();
    out.basis = detail::mub_operators(1.0 / (2.0 * std::sqrt(3.0) * (1.0 + std::sqrt(3.0))), "d3_mub_4x3");
    out.printed_report = validate_basis(mub_basis_d3_printed(), tol);
    out.report = validate_basis(out.basis, tol);
    return out;
}

/// Named bases with the fixed (alpha, k) assignments of the worked examples.
inline HermitianOperatorBasis indexed_basis(NamedBasis name) {
    using namespace gellmann;
    switch (name) {
    case NamedBasis::d4_5x4: {
        constexpr std::size_t d = 4;
        // g31 is the (1,3) symmetric pair; the printed listing repeats g21.
        return {"d4_5x4", d,
                {{antisymmetric(d, 0, 1), antisymmetric(d, 0, 2), antisymmetric(d, 0, 3)},
                 {symmetric(d, 0, 1), antisymmetric(d, 1, 2), antisymmetric(d, 1, 3)},
                 {symmetric(d, 0, 2), symmetric(d, 1, 2), antisymmetric(d, 2, 3)},
                 {symmetric(d, 0, 3), symmetric(d, 1, 3), symmetric(d, 2, 3)},
                 {diagonal(d, 1), diagonal(d, 2), diagonal(d, 3)}}};
    }
    case NamedBasis::d3_4x3: {
        constexpr std::size_t d = 3;
        return {"d3_4x3", d,
                {{symmetric(d, 0, 1), antisymmetric(d, 0, 1)},
                 {symmetric(d, 0, 2), antisymmetric(d, 0, 2)},
                 {symmetric(d, 1, 2), antisymmetric(d, 1, 2)},
                 {diagonal(d, 1), diagonal(d, 2)}}};
    }
    case NamedBasis::d3_2x5: {
        constexpr std::size_t d = 3;
        return {"d3_2x5", d,
                {{symmetric(d, 0, 1), symmetric(d, 0, 2), antisymmetric(d, 0, 1), antisymmetric(d, 0, 2)},
                 {symmetric(d, 1, 2), antisymmetric(d, 1, 2), diagonal(d, 1), diagonal(d, 2)}}};
    }
    case NamedBasis::d3_mub_7x2: {
        // Single-operator groups in the order G_{1,2}, G_{2,1}, G_{2,2}, G_{1,1},
        // G_{3,1}, G_{3,2}, G_{4,1}, G_{4,2}.
        const auto mub = mub_basis_d3().basis;
        std::vector<std::vector<ComplexMatrix>> g;
        for (auto [a, k] : std::array<std::pair<int, int>, 8>{
                 {{1, 2}, {2, 1}, {2, 2}, {1, 1}, {3, 1}, {3, 2}, {4, 1}, {4, 2}}})
            g.push_back({mub.op(a, k)});
        return {"d3_mub_7x2", 3, std::move(g)};
    }
    }
    throw ContractError("indexed_basis: unknown name");
}

/// The (d+1, d) Gell-Mann grouping used for concurrence bounds: the fixed
/// tables for d = 3, 4 and consecutive chunks of the flat ordering otherwise.
inline HermitianOperatorBasis mum_gellmann_basis(std::size_t d) {
    if (d == 3) return indexed_basis(NamedBasis::d3_4x3);
    if (d == 4) return indexed_basis(NamedBasis::d4_5x4);
    return gellmann_basis(d).regrouped(d - 1, "mum_d" + std::to_string(d));
}

namespace detail {

inline std::size_t parse_count(std::string_view text, std::string_view id) {
    std::size_t n = 0;
    const auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), n);
    if (ec != std::errc{} || p != text.data() + text.size() || text.empty())
        throw ContractError("unknown basis '" + std::string(id) + "'");
    return n;
}

} // namespace detail

/// Looks up a basis by id: the named tables, "d3_mub_4x3", "gellmann_d<d>" or
/// "mum_d<d>", optionally suffixed "[:n]" to keep only the first n groups.
inline HermitianOperatorBasis basis_by_id(std::string_view id) {
    if (id.ends_with("]")) {
        const auto open = id.rfind("[:");
        if (open == std::string_view::npos) throw ContractError("unknown basis '" + std::string(id) + "'");
        const auto n = detail::parse_count(id.substr(open + 2, id.size() - open - 3), id);
        return basis_by_id(id.substr(0, open)).truncated(n);
    }
    if (id == "d3_mub_4x3") return mub_basis_d3().basis;
    if (id.starts_with("gellmann_d")) return gellmann_basis(detail::parse_count(id.substr(10), id));
    if (id.starts_with("mum_d")) return mum_gellmann_basis(detail::parse_count(id.substr(5), id));
    return indexed_basis(parse_named_basis(id));
}

inline json basis_to_json(const HermitianOperatorBasis& b) {
    json ops = json::array();
    for (std::size_t a = 1; a <= b.group_count(); ++a)
        for (std::size_t k = 1; k <= b.group_size(); ++k)
            ops.push_back({{"alpha", a}, {"k", k}, {"matrix", matrix_to_json(b.op(a, k))}});
    return {{"id", b.id()}, {"d", b.dim()},           {"N", b.group_count()},
            {"M", b.outcomes()}, {"g0", matrix_to_json(b.g0())}, {"operators", std::move(ops)}};
}

} // namespace symmap
