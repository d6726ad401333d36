#include <gtest/gtest.h>

#include "symmap/povm.hpp"

using namespace symmap;

namespace {

const double r3 = std::sqrt(3.0);

/// Feasibility edge from the spectra alone: E = I/M + tH >= 0 iff t <= 1/(M |lambda_min(H)|).
double t_star_oracle(const HermitianOperatorBasis& b) {
    double t = std::numeric_limits<double>::infinity();
    for (const auto& g : build_h_operators(b))
        for (const auto& h : g) {
            const double lo = eigenvalues_hermitian(h).front();
            if (lo < 0) t = std::min(t, 1.0 / (static_cast<double>(b.outcomes()) * -lo));
        }
    return t;
}

const std::vector<NamedBasis> all_named = {NamedBasis::d4_5x4, NamedBasis::d3_4x3, NamedBasis::d3_2x5,
                                           NamedBasis::d3_mub_7x2};

} // namespace

TEST(HOperators, SumToZeroPerGroup) {
    for (auto n : all_named) {
        const auto b = indexed_basis(n);
        for (const auto& g : build_h_operators(b)) {
            ComplexMatrix s(b.dim(), b.dim());
            for (const auto& h : g) s += h;
            EXPECT_LE(s.max_abs(), 1e-12) << to_string(n);
        }
    }
}

TEST(HOperators, LastElementOfD3Table) {
    const auto b = indexed_basis(NamedBasis::d3_4x3);
    const auto H = build_h_operators(b);
    const auto expected = (r3 + 1) * (b.op(1, 1) + b.op(1, 2));
    EXPECT_LE(max_abs_diff(H[0][2], expected), 1e-14);
    const auto h11 = (b.op(1, 1) + b.op(1, 2)).add_scaled(-r3 * (r3 + 1), b.op(1, 1));
    EXPECT_LE(max_abs_diff(H[0][0], h11), 1e-14);
}

TEST(BuildPovm, RejectsBadT) {
    const auto b = indexed_basis(NamedBasis::d3_4x3);
    EXPECT_THROW(build_povm(b, 0.0), ContractError);
    EXPECT_THROW(build_povm(b, -0.1), ContractError);
    EXPECT_THROW(build_povm(b, 10.0), ContractError);
}

TEST(BuildPovm, PsdFailureIsLocated) {
    const auto b = indexed_basis(NamedBasis::d3_4x3);
    const double t = find_t_opt(b).t * 1.05;
    try {
        build_povm(b, t);
        FAIL() << "expected PovmPsdError";
    } catch (const PovmPsdError& e) {
        EXPECT_GE(e.alpha(), 1u);
        EXPECT_LE(e.alpha(), 4u);
        EXPECT_GE(e.k(), 1u);
        EXPECT_LE(e.k(), 3u);
        EXPECT_LT(e.min_eigenvalue(), 0.0);
        // the located element is indeed the failing one
        const auto H = build_h_operators(b);
        const auto E = ComplexMatrix::identity(3) * (1.0 / 3.0) + t * H[e.alpha() - 1][e.k() - 1];
        EXPECT_NEAR(min_eigenvalue(E), e.min_eigenvalue(), 1e-12);
    }
}

TEST(TOpt, CertificateAndSpectralOracle) {
    for (auto n : all_named) {
        const auto b = indexed_basis(n);
        const auto r = find_t_opt(b);
        EXPECT_GE(r.min_eigenvalue, -1e-9) << to_string(n);
        EXPECT_LE(r.min_eigenvalue, 1e-6) << to_string(n);
        const auto H = build_h_operators(b);
        EXPECT_LT(detail::povm_min_eigenvalue(H, b.dim(), 1.01 * r.t, default_tolerances()), -1e-6) << to_string(n);
        EXPECT_NEAR(r.t, t_star_oracle(b), 1e-10) << to_string(n);
        EXPECT_NEAR(r.x, x_from_t(b.dim(), b.outcomes(), r.t), 1e-15);
    }
}

TEST(TOpt, KnownValues) {
    EXPECT_NEAR(find_t_opt(indexed_basis(NamedBasis::d4_5x4)).x, 0.375, 1e-10);
    EXPECT_NEAR(find_t_opt(indexed_basis(NamedBasis::d4_5x4)).t, 0.0680413817, 1e-9);
    EXPECT_NEAR(find_t_opt(indexed_basis(NamedBasis::d3_4x3)).t, 0.1220084679, 1e-9);
    // (4,3) MUB grouping reaches rank-1 projectors
    const auto m = find_t_opt(mub_basis_d3().basis);
    EXPECT_NEAR(m.x, 1.0, 1e-10);
    EXPECT_NEAR(m.t, 0.2113248654, 1e-9);
}

TEST(Mub, PovmAtTOptEqualsProjectors) {
    const auto b = mub_basis_d3().basis;
    const auto p = build_povm(b, find_t_opt(b).t);
    const auto proj = mub_projectors_d3();
    for (std::size_t a = 1; a <= 4; ++a)
        for (std::size_t k = 1; k <= 3; ++k) EXPECT_LE(max_abs_diff(p.at(a, k), proj.at(a, k)), 1e-9) << a << k;
}

TEST(Symmetry, IdentitiesHoldOnNamedBases) {
    for (auto n : all_named) {
        const auto b = indexed_basis(n);
        for (double frac : {0.3, 1.0}) {
            const auto p = build_povm(b, frac * find_t_opt(b).t);
            const auto r = certify_symmetry(p);
            EXPECT_TRUE(r.passed) << to_string(n) << " " << r.failed_identity;
            EXPECT_LE(r.completeness_defect, 1e-12);
            EXPECT_LE(r.xt_defect, 1e-12);
            EXPECT_GE(r.min_eigenvalue, -1e-9);
            // x - t relation from the measured purity
            const double d = static_cast<double>(b.dim()), M = static_cast<double>(b.outcomes());
            const double x = trace_of_product(p.at(1, 1), p.at(1, 1)).real();
            EXPECT_NEAR(x, d / (M * M) + p.t() * p.t() * (M - 1) * std::pow(std::sqrt(M) + 1, 2), 1e-12);
        }
    }
}

TEST(Symmetry, PerturbationNamesTheBrokenIdentity) {
    const auto b = indexed_basis(NamedBasis::d3_4x3);
    const auto good = build_povm(b, find_t_opt(b).t);
    auto ops = good.operators();
    // traces and purities intact, cross-group overlaps spoiled
    ops[0][0] = ops[1][0];
    ops[0][1] = ops[1][1];
    ops[0][2] = ops[1][2];
    const auto r = certify_symmetry(SymmetricPovm(3, good.t(), ops, "broken"));
    EXPECT_FALSE(r.passed);
    EXPECT_EQ(r.failed_identity, "inter");

    auto ops2 = good.operators();
    ops2[2][1] *= 1.1;
    const auto r2 = certify_symmetry(SymmetricPovm(3, good.t(), ops2, "scaled"));
    EXPECT_FALSE(r2.passed);
    EXPECT_EQ(r2.failed_identity, "trace");
    EXPECT_GT(r2.completeness_defect, 1e-3);
}

TEST(Povm, GramRankAndRecovery) {
    for (auto n : all_named) {
        const auto b = indexed_basis(n);
        const auto p = build_povm(b, find_t_opt(b).t);
        EXPECT_EQ(povm_gram_rank(p), b.dim() * b.dim()) << to_string(n);
        const auto back = recover_basis(p);
        for (std::size_t a = 1; a <= b.group_count(); ++a)
            for (std::size_t k = 1; k < b.outcomes(); ++k)
                EXPECT_LE(max_abs_diff(back.op(a, k), b.op(a, k)), 1e-12);
    }
    const auto t = indexed_basis(NamedBasis::d3_2x5).truncated(1);
    EXPECT_EQ(povm_gram_rank(build_povm(t, find_t_opt(t).t)), 5u);
}

TEST(Povm, IndexingAndJson) {
    const auto b = indexed_basis(NamedBasis::d3_4x3);
    const auto p = build_povm(b, 0.1);
    EXPECT_THROW(p.at(0, 1), ContractError);
    EXPECT_THROW(p.at(1, 4), ContractError);
    const auto j = povm_to_json(p);
    EXPECT_EQ(j.at("operators").size(), 12u);
    EXPECT_DOUBLE_EQ(j.at("t").get<double>(), 0.1);
    EXPECT_EQ(j.at("operators")[4].at("alpha"), 2);
    EXPECT_EQ(j.at("operators")[4].at("k"), 2);
    EXPECT_EQ(max_abs_diff(matrix_from_json(j.at("operators")[4].at("matrix")), p.at(2, 2)), 0.0);
    const auto sj = symmetry_report_to_json(certify_symmetry(p));
    EXPECT_TRUE(sj.at("passed").get<bool>());
}

TEST(Povm, InvalidBasisRejected) {
    auto groups = indexed_basis(NamedBasis::d3_4x3).groups();
    groups[1][0] *= 2.0;
    EXPECT_THROW(build_h_operators({"bad", 3, groups}), ContractError);
}
