#pragma once

// Entanglement witnesses from the maps Phi_z: the Choi operator W, the
// t-independent rescaling W~ = (b/t^2) W, its normalization W~' and the
// general orthogonal-matrix family W' = I - sum Q_{mu nu} G_mu^T (x) G_nu.

#include <cmath>
#include <string>
#include <string_view>
#include <vector>

#include "symmap/separability.hpp"

namespace symmap {

enum class WitnessForm { choi_w, rescaled_wtilde, normalized_wtilde_prime, q_matrix };

inline std::string_view to_string(WitnessForm f) {
    switch (f) {
    case WitnessForm::choi_w: return "choi_W";
    case WitnessForm::rescaled_wtilde: return "rescaled_Wtilde";
    case WitnessForm::normalized_wtilde_prime: return "normalized_Wtilde_prime";
    case WitnessForm::q_matrix: return "q_matrix";
    }
    return "?";
}

struct WitnessOperator {
    ComplexMatrix matrix;
    WitnessForm form = WitnessForm::choi_w;
    json spec;

    WitnessOperator(ComplexMatrix m, WitnessForm f, json provenance, const Tolerances& tol = default_tolerances())
        : matrix(std::move(m)), form(f), spec(std::move(provenance)) {
        matrix.require_square("witness");
        if (hermitian_defect(matrix) > tol.hermitian * (1.0 + matrix.max_abs()))
            throw ContractError("witness: not Hermitian (defect " + std::to_string(hermitian_defect(matrix)) + ")");
    }
};

/// W = sum_{k,l} |k><l| (x) Phi_z(|k><l|)
inline WitnessOperator choi_witness(const MapSpec& spec) {
    const std::size_t d = spec.dim();
    const auto& T = spec.transfer();
    ComplexMatrix w(d * d, d * d);
    for (std::size_t k = 0; k < d; ++k)
        for (std::size_t l = 0; l < d; ++l)
            for (std::size_t i = 0; i < d; ++i)
                for (std::size_t j = 0; j < d; ++j) w(k * d + i, l * d + j) = T(i * d + j, k * d + l);
    return {std::move(w), WitnessForm::choi_w, spec.to_json()};
}

namespace detail {

/// sum_{k,l} O_{kl} conj(X_l) (x) X_k over one group.
inline ComplexMatrix rotated_pair_sum(const std::vector<ComplexMatrix>& X, const Rotation& O) {
    const std::size_t d = X.front().rows();
    ComplexMatrix s(d * d, d * d);
    for (std::size_t k = 0; k < X.size(); ++k)
        for (std::size_t l = 0; l < X.size(); ++l)
            if (O(k, l) != 0.0) s.add_scaled(O(k, l), kron(X[l].conj(), X[k]));
    return s;
}

inline double sign_of(std::size_t alpha, std::size_t L) { return alpha <= L ? -1.0 : 1.0; }

} // namespace detail

/// W = ((1-z) + z a/b) I/d + (1/b)[sum_{alpha>L} K_alpha - sum_{alpha<=L} K_alpha],
/// K_alpha = (M z/d) sum O_{kl} conj(E_l) (x) E_k.
inline ComplexMatrix choi_closed_form(const MapSpec& spec) {
    const std::size_t d = spec.dim();
    const double dd = static_cast<double>(d);
    const double M = static_cast<double>(spec.povm().outcomes());
    const double z = spec.z();
    ComplexMatrix w = ComplexMatrix::identity(d * d) * (((1.0 - z) + z * spec.a() / spec.b()) / dd);
    for (std::size_t alpha = 1; alpha <= spec.povm().group_count(); ++alpha) {
        const auto K = detail::rotated_pair_sum(spec.povm().operators()[alpha - 1], spec.rotations()[alpha - 1]);
        w.add_scaled(detail::sign_of(alpha, spec.L()) * M * z / (dd * spec.b()), K);
    }
    return w;
}

/// W~ = ((d-1)/d^2) M^2 (sqrtM+1)^2 I + sum_{alpha>L} J_alpha - sum_{alpha<=L} J_alpha,
/// J_alpha = (M z/d) sum O_{kl} conj(H_l) (x) H_k, with H recovered from the POVM.
inline WitnessOperator rescaled_witness(const MapSpec& spec) {
    const auto& p = spec.povm();
    const std::size_t d = p.dim();
    const double dd = static_cast<double>(d);
    const double M = static_cast<double>(p.outcomes());
    const double sM = std::sqrt(M);
    const auto shift = ComplexMatrix::identity(d) * (1.0 / M);
    ComplexMatrix w = ComplexMatrix::identity(d * d) * ((dd - 1) / (dd * dd) * M * M * (sM + 1) * (sM + 1));
    for (std::size_t alpha = 1; alpha <= p.group_count(); ++alpha) {
        std::vector<ComplexMatrix> H;
        for (const auto& e : p.operators()[alpha - 1]) H.push_back((e - shift) * (1.0 / p.t()));
        w.add_scaled(detail::sign_of(alpha, spec.L()) * M * spec.z() / dd,
                     detail::rotated_pair_sum(H, spec.rotations()[alpha - 1]));
    }
    return {std::move(w), WitnessForm::rescaled_wtilde, spec.to_json()};
}

/// W~' = d W~ / (M^2 (sqrtM+1)^2)
inline WitnessOperator normalized_witness(const MapSpec& spec) {
    auto w = rescaled_witness(spec);
    const double M = static_cast<double>(spec.povm().outcomes());
    const double sM = std::sqrt(M);
    w.matrix *= static_cast<double>(spec.dim()) / (M * M * (sM + 1) * (sM + 1));
    w.form = WitnessForm::normalized_wtilde_prime;
    return w;
}

/// Real square matrix, row-major.
struct RealMatrix {
    std::size_t n = 0;
    std::vector<double> entries;

    RealMatrix() = default;
    explicit RealMatrix(std::size_t size) : n(size), entries(size * size, 0.0) {}
    double& operator()(std::size_t i, std::size_t j) { return entries[i * n + j]; }
    double operator()(std::size_t i, std::size_t j) const { return entries[i * n + j]; }

    ComplexMatrix to_complex() const {
        ComplexMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) m(i, j) = (*this)(i, j);
        return m;
    }
};

/// Largest eigenvalue of Q^T Q (the squared operator norm).
inline double gram_norm(const RealMatrix& q, const Tolerances& tol = default_tolerances()) {
    const auto c = q.to_complex();
    return eigenvalues_hermitian(c.transpose() * c, tol).back();
}

/// Real matrix over the flat basis {G0, G_1, ...}, with Q^T Q <= I.
class QMatrix {
public:
    explicit QMatrix(RealMatrix q, const Tolerances& tol = default_tolerances()) : q_(std::move(q)) {
        for (double v : q_.entries)
            if (!std::isfinite(v)) throw ContractError("q matrix: non-finite entry");
        norm_ = symmap::gram_norm(q_, tol);
        if (norm_ > 1.0 + tol.psd) throw ContractError("q matrix: Q^T Q exceeds I (norm " + std::to_string(norm_) + ")");
    }

    std::size_t size() const noexcept { return q_.n; }
    double operator()(std::size_t i, std::size_t j) const { return q_(i, j); }
    const RealMatrix& matrix() const noexcept { return q_; }
    double gram_norm() const noexcept { return norm_; }

private:
    RealMatrix q_;
    double norm_ = 0.0;
};

/// Q_{kl} = M(O_MM - 1) + M(sqrtM+1)^2 O_kl - M(sqrtM+1)(O_Ml + O_kM), k, l < M.
inline RealMatrix q_from_rotation(const Rotation& O, const Tolerances& tol = default_tolerances()) {
    validate_rotation(O, tol);
    const std::size_t M = O.M;
    const double m = static_cast<double>(M);
    const double sM = std::sqrt(m);
    RealMatrix q(M - 1);
    for (std::size_t k = 0; k + 1 < M; ++k)
        for (std::size_t l = 0; l + 1 < M; ++l)
            q(k, l) = m * (O(M - 1, M - 1) - 1) + m * (sM + 1) * (sM + 1) * O(k, l) -
                      m * (sM + 1) * (O(M - 1, l) + O(k, M - 1));
    return q;
}

/// Block Q for a map spec over the flat basis of its POVM: Q_00 = 1 and
/// Q_{(alpha,l),(alpha,k)} = -s_alpha z Q^(alpha)_{kl} / (M (sqrtM+1)^2),
/// s_alpha = -1 for alpha <= L and +1 otherwise. `size` pads with zero rows.
inline QMatrix block_q_matrix(const MapSpec& spec, std::size_t size = 0, const Tolerances& tol = default_tolerances()) {
    const auto& p = spec.povm();
    const std::size_t M = p.outcomes();
    const double m = static_cast<double>(M);
    const double sM = std::sqrt(m);
    const std::size_t used = 1 + p.group_count() * (M - 1);
    if (size == 0) size = used;
    if (size < used) throw DimensionError("block_q_matrix: size smaller than the basis");
    RealMatrix Q(size);
    Q(0, 0) = 1.0;
    for (std::size_t alpha = 1; alpha <= p.group_count(); ++alpha) {
        const auto q = q_from_rotation(spec.rotations()[alpha - 1], tol);
        const std::size_t base = 1 + (alpha - 1) * (M - 1);
        const double s = detail::sign_of(alpha, spec.L());
        for (std::size_t k = 0; k + 1 < M; ++k)
            for (std::size_t l = 0; l + 1 < M; ++l)
                Q(base + l, base + k) = -s * spec.z() * q(k, l) / (m * (sM + 1) * (sM + 1));
    }
    return QMatrix(std::move(Q), tol);
}

/// W' = I - sum_{mu,nu} Q_{mu nu} G_mu^T (x) G_nu over {G0, G_1, ...} of `basis`.
inline WitnessOperator q_matrix_witness(const HermitianOperatorBasis& basis, const QMatrix& Q) {
    const auto G = basis.flat_with_g0();
    if (Q.size() != G.size())
        throw DimensionError("q_matrix_witness: Q is " + std::to_string(Q.size()) + " but basis has " +
                             std::to_string(G.size()) + " operators");
    const std::size_t d = basis.dim();
    ComplexMatrix w = ComplexMatrix::identity(d * d);
    for (std::size_t mu = 0; mu < G.size(); ++mu) {
        const auto gt = G[mu].transpose();
        for (std::size_t nu = 0; nu < G.size(); ++nu)
            if (Q(mu, nu) != 0.0) w.add_scaled(-Q(mu, nu), kron(gt, G[nu]));
    }
    return {std::move(w), WitnessForm::q_matrix, json{{"basis", basis.id()}, {"q_gram_norm", Q.gram_norm()}}};
}

/// Re Tr(W rho); the imaginary part must vanish.
inline double expectation(const ComplexMatrix& w, const ComplexMatrix& rho, const Tolerances& tol = default_tolerances()) {
    if (w.rows() != rho.rows() || w.cols() != rho.cols()) throw DimensionError("expectation: size mismatch");
    const Complex v = trace_of_product(w, rho);
    if (std::abs(v.imag()) > tol.hermitian * (1.0 + w.max_abs()))
        throw NumericError("expectation: imaginary part " + std::to_string(v.imag()), std::abs(v.imag()));
    return v.real();
}

inline double expectation(const WitnessOperator& w, const BipartiteDensityMatrix& rho,
                          const Tolerances& tol = default_tolerances()) {
    return expectation(w.matrix, rho.matrix(), tol);
}

struct PptResult {
    bool ppt = false;
    double min_eigenvalue = 0.0;
};

inline PptResult ppt_check(const BipartiteDensityMatrix& rho, const Tolerances& tol = default_tolerances()) {
    const double m = min_eigenvalue(partial_transpose_second(rho.matrix(), rho.dA(), rho.dB()), tol);
    return {m >= -tol.psd, m};
}

/// R(rho)_{(i,j),(k,l)} = rho_{(i,k),(j,l)}
inline ComplexMatrix realignment(const ComplexMatrix& rho, std::size_t dA, std::size_t dB) {
    require_bipartite(rho, dA, dB, "realignment");
    ComplexMatrix r(dA * dA, dB * dB);
    for (std::size_t i = 0; i < dA; ++i)
        for (std::size_t j = 0; j < dA; ++j)
            for (std::size_t k = 0; k < dB; ++k)
                for (std::size_t l = 0; l < dB; ++l) r(i * dA + j, k * dB + l) = rho(i * dB + k, j * dB + l);
    return r;
}

/// ||R(rho)||_1 from the dilation [[0, R], [R^dagger, 0]], whose spectrum is +-sigma_i.
/// Above 1 certifies entanglement; every W' with Q^T Q <= I has Tr(W' rho) >= 1 - ||R(rho)||_1.
inline double realignment_trace_norm(const BipartiteDensityMatrix& rho, const Tolerances& tol = default_tolerances()) {
    const auto r = realignment(rho.matrix(), rho.dA(), rho.dB());
    const std::size_t m = r.rows(), n = r.cols();
    ComplexMatrix h(m + n, m + n);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            h(i, m + j) = r(i, j);
            h(m + j, i) = std::conj(r(i, j));
        }
    return 0.5 * trace_norm_hermitian(h, tol);
}

struct BlockPositivityReport {
    std::size_t samples = 0;
    double min_expectation = 0.0;
    bool passed = false;
};

/// min over random product vectors a (x) b of <ab|W|ab>.
inline BlockPositivityReport block_positivity_sample(const ComplexMatrix& w, std::size_t dA, std::size_t dB,
                                                     std::size_t samples, std::uint64_t seed = default_seed,
                                                     const Tolerances& tol = default_tolerances()) {
    require_bipartite(w, dA, dB, "block_positivity_sample");
    Rng rng(seed);
    BlockPositivityReport r;
    r.samples = samples;
    r.min_expectation = std::numeric_limits<double>::infinity();
    std::vector<Complex> v(dA * dB);
    for (std::size_t s = 0; s < samples; ++s) {
        const auto a = haar_vector(dA, rng);
        const auto b = haar_vector(dB, rng);
        for (std::size_t i = 0; i < dA; ++i)
            for (std::size_t j = 0; j < dB; ++j) v[i * dB + j] = a[i] * b[j];
        Complex e{};
        for (std::size_t i = 0; i < v.size(); ++i) {
            Complex row{};
            for (std::size_t j = 0; j < v.size(); ++j) row += w(i, j) * v[j];
            e += std::conj(v[i]) * row;
        }
        r.min_expectation = std::min(r.min_expectation, e.real());
    }
    r.passed = r.min_expectation >= -tol.positivity;
    return r;
}

enum class BuiltinState { rho1, rho2, rho3 };

inline BuiltinState parse_builtin_state(std::string_view s) {
    if (s == "rho1") return BuiltinState::rho1;
    if (s == "rho2") return BuiltinState::rho2;
    if (s == "rho3") return BuiltinState::rho3;
    throw ContractError("unknown builtin state '" + std::string(s) + "'");
}

/// The 3 (x) 3 test states of the witness examples.
inline BipartiteDensityMatrix builtin_state(BuiltinState name) {
    ComplexMatrix m(9, 9);
    double scale = 1.0;
    auto sym = [&](std::size_t i, std::size_t j, Complex v) {
        m(i, j) = v;
        m(j, i) = std::conj(v);
    };
    switch (name) {
    case BuiltinState::rho1:
        scale = 27.0;
        for (std::size_t i = 0; i < 9; ++i) m(i, i) = (i % 4 == 0) ? 7.0 : 1.0;
        sym(0, 4, 6.0), sym(0, 8, 6.0), sym(4, 8, 6.0);
        break;
    case BuiltinState::rho2:
        scale = 75.0;
        for (std::size_t i = 0; i < 9; ++i) m(i, i) = (i % 4 == 0) ? 7.0 : 9.0;
        sym(0, 4, 2.0), sym(0, 8, 2.0), sym(4, 8, 2.0);
        for (auto [i, j] : {std::pair{1, 5}, {1, 6}, {2, 3}, {2, 7}, {3, 7}, {5, 6}}) sym(i, j, -4.0);
        break;
    case BuiltinState::rho3:
        scale = 81.0;
        for (std::size_t i = 0; i < 9; ++i) m(i, i) = 9.0;
        sym(0, 5, -7.0);
        sym(1, 3, {4.0, -1.0});
        sym(2, 6, {-4.0, -1.0});
        break;
    }
    m *= 1.0 / scale;
    return {3, 3, std::move(m)};
}

/// Printed example witnesses, entered verbatim as functions of z.
namespace fixtures {

/// (sqrt3+1)^2 [...], in the W~ normalization.
inline ComplexMatrix wtilde1(double z) {
    ComplexMatrix m(9, 9);
    for (std::size_t i = 0; i < 9; ++i) m(i, i) = (i % 4 == 0) ? 2 * z + 2 : -z + 2;
    m(0, 4) = m(4, 0) = -3 * z;
    m(0, 8) = m(8, 0) = 3 * z;
    m(4, 8) = m(8, 4) = 3 * z;
    const double s = std::sqrt(3.0) + 1;
    return m * (s * s);
}

/// (1/6)[...], compared in the W~' normalization.
inline ComplexMatrix wtilde2(double z) {
    const double r3 = std::sqrt(3.0);
    const Complex i1{0, 1};
    const Complex A = 0.5 * (r3 - i1), B = 0.5 * (3 * r3 - 5.0 * i1), C = -(8.0 - 2 * r3 * i1);
    const Complex D = 0.5 * (5 * r3 - i1), E = -(8 + 2 * r3) * i1, F = -0.5 * (5 * r3 + 3.0 * i1);
    const Complex G = 0.5 * (7 * r3 + 3.0 * i1), H = 0.5 * (3 * r3 + 11.0 * i1), Mc = -(7.0 - r3 * i1);
    const Complex N = -0.5 * (r3 + 3.0 * i1);
    auto c = [](Complex v) { return std::conj(v); };
    const Complex a = 4 * (1 - z), b = 2 * (2 + z);
    const Complex rows[9][9] = {
        {a, 0, 0, 4, z, A * z, 4, c(A) * z, z},
        {0, b, 0, B * z, 4, C * z, E * z, 4, F * z},
        {0, 0, b, c(C) * z, D * z, 4, G * z, -7 * z, 4},
        {4, c(B) * z, C * z, b, 0, 0, 4, c(C) * z, H * z},
        {z, 4, c(D) * z, 0, a, 0, D * z, 4, z * i1},
        {c(A) * z, c(C) * z, 4, 0, 0, b, Mc * z, N * z, 4},
        {4, c(E) * z, c(G) * z, 4, c(D) * z, c(Mc) * z, b, 0, 0},
        {A * z, 4, -7 * z, C * z, 4, c(N) * z, 0, b, 0},
        {z, c(F) * z, 4, c(H) * z, -z * i1, 4, 0, 0, a},
    };
    ComplexMatrix m(9, 9);
    for (std::size_t i = 0; i < 9; ++i)
        for (std::size_t j = 0; j < 9; ++j) m(i, j) = rows[i][j] / 6.0;
    return m;
}

/// (1/6)[...], in the W~' normalization.
inline ComplexMatrix wtilde3_prime(double z) {
    const double r5 = std::sqrt(5.0);
    const Complex i1{0, 1};
    const Complex A = 15.0 * (1.0 - i1) * (2.0 - i1 + r5);
    const Complex B = 15.0 * (1.0 - i1) * (2.0 + i1 + r5);
    const Complex C = -30 * r5 * (2 + r5);
    const Complex D = 30.0 * (1.0 - 2.0 * i1) * (2 + r5);
    auto c = [](Complex v) { return std::conj(v); };
    ComplexMatrix m = ComplexMatrix::identity(9) * 4.0;
    m(0, 4) = c(B) * z, m(0, 5) = c(C) * z, m(0, 7) = c(D) * z, m(0, 8) = c(B) * z;
    m(1, 3) = c(A) * z, m(1, 6) = -30.0 * z * i1;
    m(2, 3) = 30.0 * z * i1, m(2, 6) = -c(A) * z;
    m(3, 1) = A * z, m(3, 2) = -30.0 * z * i1;
    m(4, 0) = B * z;
    m(5, 0) = C * z;
    m(6, 1) = 30.0 * z * i1, m(6, 2) = -c(A) * z;
    m(7, 0) = D * z;
    m(8, 0) = B * z;
    return m * (1.0 / 6.0);
}

} // namespace fixtures

struct FixtureReport {
    std::string name;
    double max_abs_diff = 0.0;
    std::size_t mismatches = 0; // entries differing by more than tol
    std::size_t first_row = 0, first_col = 0;
    double fixture_hermitian_defect = 0.0;
    bool passed = false;
};

inline FixtureReport compare_fixture(std::string name, const ComplexMatrix& constructed, const ComplexMatrix& printed,
                                     double tol) {
    if (constructed.rows() != printed.rows() || constructed.cols() != printed.cols())
        throw DimensionError("compare_fixture: size mismatch");
    FixtureReport r;
    r.name = std::move(name);
    r.fixture_hermitian_defect = hermitian_defect(printed);
    for (std::size_t i = 0; i < printed.rows(); ++i)
        for (std::size_t j = 0; j < printed.cols(); ++j) {
            const double e = std::abs(constructed(i, j) - printed(i, j));
            if (e > tol && r.mismatches++ == 0) r.first_row = i, r.first_col = j;
            r.max_abs_diff = std::max(r.max_abs_diff, e);
        }
    r.passed = r.mismatches == 0;
    return r;
}

inline json fixture_report_to_json(const FixtureReport& r) {
    return {{"name", r.name},
            {"max_abs_diff", r.max_abs_diff},
            {"mismatches", r.mismatches},
            {"first_mismatch", {r.first_row + 1, r.first_col + 1}},
            {"fixture_hermitian_defect", r.fixture_hermitian_defect},
            {"passed", r.passed}};
}

} // namespace symmap
