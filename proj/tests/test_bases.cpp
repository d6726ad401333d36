#include <gtest/gtest.h>

#include <set>

#include "symmap/bases.hpp"

using namespace symmap;

namespace {

const double r2 = std::sqrt(2.0);
const double r3 = std::sqrt(3.0);
const Complex I1{0, 1};

/// flat index of m in b, or -1
int find_operator(const HermitianOperatorBasis& b, const ComplexMatrix& m) {
    const auto ops = b.flat();
    for (std::size_t i = 0; i < ops.size(); ++i)
        if (max_abs_diff(ops[i], m) < 1e-15) return static_cast<int>(i);
    return -1;
}

} // namespace

TEST(GellMann, D3ListingEntrywise) {
    // g01, g10, g02, g20, g12, g21, g11, g22 of the d = 3 listing
    const ComplexMatrix g01 = ComplexMatrix{{0, 1, 0}, {1, 0, 0}, {0, 0, 0}} * (1 / r2);
    const ComplexMatrix g10 = ComplexMatrix{{0, -I1, 0}, {I1, 0, 0}, {0, 0, 0}} * (1 / r2);
    const ComplexMatrix g02 = ComplexMatrix{{0, 0, 1}, {0, 0, 0}, {1, 0, 0}} * (1 / r2);
    const ComplexMatrix g20 = ComplexMatrix{{0, 0, -I1}, {0, 0, 0}, {I1, 0, 0}} * (1 / r2);
    const ComplexMatrix g12 = ComplexMatrix{{0, 0, 0}, {0, 0, 1}, {0, 1, 0}} * (1 / r2);
    const ComplexMatrix g21 = ComplexMatrix{{0, 0, 0}, {0, 0, -I1}, {0, I1, 0}} * (1 / r2);
    const ComplexMatrix g11 = ComplexMatrix::diagonal({1, -1, 0}) * (1 / r2);
    const ComplexMatrix g22 = ComplexMatrix::diagonal({1, 1, -2}) * (1 / std::sqrt(6.0));
    const auto b = gellmann_basis(3);
    ASSERT_EQ(b.operator_count(), 8u);
    std::set<int> seen;
    for (const auto* m : {&g01, &g10, &g02, &g20, &g12, &g21, &g11, &g22}) {
        const int idx = find_operator(b, *m);
        EXPECT_GE(idx, 0);
        seen.insert(idx);
    }
    EXPECT_EQ(seen.size(), 8u);

    const auto t = indexed_basis(NamedBasis::d3_4x3);
    EXPECT_LE(max_abs_diff(t.op(1, 1), g01), 1e-15);
    EXPECT_LE(max_abs_diff(t.op(1, 2), g10), 1e-15);
    EXPECT_LE(max_abs_diff(t.op(2, 2), g20), 1e-15);
    EXPECT_LE(max_abs_diff(t.op(3, 2), g21), 1e-15);
    EXPECT_LE(max_abs_diff(t.op(4, 1), g11), 1e-15);
    EXPECT_LE(max_abs_diff(t.op(4, 2), g22), 1e-15);

    const auto e4 = indexed_basis(NamedBasis::d3_2x5);
    EXPECT_LE(max_abs_diff(e4.op(1, 2), g02), 1e-15);
    EXPECT_LE(max_abs_diff(e4.op(1, 3), g10), 1e-15);
    EXPECT_LE(max_abs_diff(e4.op(2, 1), g12), 1e-15);
    EXPECT_LE(max_abs_diff(e4.op(2, 4), g22), 1e-15);
}

TEST(GellMann, D4Listing) {
    const auto b = indexed_basis(NamedBasis::d4_5x4);
    const ComplexMatrix g33 = ComplexMatrix::diagonal({1, 1, 1, -3}) * (1 / (2 * r3));
    EXPECT_LE(max_abs_diff(b.op(5, 3), g33), 1e-15);
    // g01 antisymmetric, g10 symmetric in the d = 4 listing
    EXPECT_EQ(b.op(1, 1)(0, 1), Complex(0, -1 / r2));
    EXPECT_EQ(b.op(2, 1)(0, 1), Complex(1 / r2, 0));
    // reconstructed g31: the (1,3) symmetric pair
    ComplexMatrix g31(4, 4);
    g31(1, 3) = g31(3, 1) = 1 / r2;
    EXPECT_LE(max_abs_diff(b.op(4, 2), g31), 1e-15);
    EXPECT_EQ(b.group_count(), 5u);
    EXPECT_EQ(b.outcomes(), 4u);
}

TEST(GellMann, OrthonormalForAnyD) {
    for (std::size_t d = 2; d <= 6; ++d) {
        const auto r = validate_basis(gellmann_basis(d));
        EXPECT_TRUE(r.passed) << d;
        EXPECT_LE(r.gram_defect, 1e-12);
    }
    EXPECT_THROW(gellmann_basis(1), ContractError);
}

TEST(NamedBases, TablesAreTotalAndInjective) {
    for (auto n : {NamedBasis::d4_5x4, NamedBasis::d3_4x3, NamedBasis::d3_2x5}) {
        const auto b = indexed_basis(n);
        const auto gm = gellmann_basis(b.dim());
        std::set<int> seen;
        for (const auto& op : b.flat()) seen.insert(find_operator(gm, op));
        EXPECT_EQ(seen.size(), b.dim() * b.dim() - 1) << to_string(n);
        EXPECT_EQ(seen.count(-1), 0u) << to_string(n);
    }
}

TEST(NamedBases, AllPassValidation) {
    for (auto n : {NamedBasis::d4_5x4, NamedBasis::d3_4x3, NamedBasis::d3_2x5, NamedBasis::d3_mub_7x2}) {
        const auto b = indexed_basis(n);
        EXPECT_TRUE(validate_basis(b).passed) << to_string(n);
        EXPECT_TRUE(b.informationally_complete()) << to_string(n);
        // sum G^2 + G0^2 = (d^2/d) I / d ... proportional to I for a complete operator basis
        ComplexMatrix s = b.g0() * b.g0();
        for (const auto& g : b.flat()) s += g * g;
        EXPECT_LE(max_abs_diff(s, ComplexMatrix::identity(b.dim()) * static_cast<double>(b.dim())), 1e-9);
    }
    EXPECT_THROW(parse_named_basis("nope"), ContractError);
}

TEST(Validate, ScaledOperatorHasGramDefectThree) {
    auto groups = indexed_basis(NamedBasis::d3_4x3).groups();
    groups[0][0] *= 2.0;
    const auto r = validate_basis({"scaled", 3, groups});
    EXPECT_FALSE(r.passed);
    EXPECT_NEAR(r.gram_defect, 3.0, 1e-12);
}

TEST(Mub, ProjectorInvariants) {
    const auto p = mub_projectors_d3();
    for (std::size_t a = 1; a <= 4; ++a) {
        ComplexMatrix s(3, 3);
        for (std::size_t k = 1; k <= 3; ++k) {
            const auto& e = p.at(a, k);
            s += e;
            EXPECT_LE(max_abs_diff(e * e, e), 1e-10);
            EXPECT_NEAR(e.trace().real(), 1.0, 1e-12);
            for (std::size_t b = a + 1; b <= 4; ++b)
                for (std::size_t l = 1; l <= 3; ++l)
                    EXPECT_NEAR(trace_of_product(e, p.at(b, l)).real(), 1.0 / 3.0, 1e-10);
        }
        EXPECT_LE(max_abs_diff(s, ComplexMatrix::identity(3)), 1e-12);
    }
    ComplexMatrix ones(3, 3);
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j) ones(i, j) = 1.0 / 3.0;
    EXPECT_LE(max_abs_diff(p.at(2, 1), ones), 1e-15);
}

TEST(Mub, PrintedEntries) {
    const auto bundle = mub_basis_d3();
    const auto& b = bundle.basis;
    const double c = 1 / (r3 * (1 + r3));
    const auto& g11 = b.op(1, 1);
    EXPECT_NEAR(g11(0, 0).real(), (-2 - r3) * c, 1e-12);
    EXPECT_NEAR(g11(1, 1).real(), 1 * c, 1e-12);
    EXPECT_NEAR(g11(2, 2).real(), (1 + r3) * c, 1e-12);
    const Complex v{2 + r3, 1};
    const Complex expected = -std::conj(v) / (2 * r3 * (1 + r3));
    EXPECT_LE(std::abs(b.op(2, 1)(0, 1) - expected), 1e-12);
    // same operator through the (7,2) table, where it is group 2
    const auto t = indexed_basis(NamedBasis::d3_mub_7x2);
    EXPECT_LE(std::abs(t.op(2, 1)(0, 1) - expected), 1e-12);
}

TEST(Mub, GramAndNormalizations) {
    const auto bundle = mub_basis_d3();
    EXPECT_TRUE(bundle.report.passed);
    EXPECT_LE(bundle.report.gram_defect, 1e-10);
    // the printed prefactor on G_{2,2}, G_{3,2}, G_{4,2} doubles their norm
    EXPECT_FALSE(bundle.printed_report.passed);
    EXPECT_NEAR(bundle.printed_report.gram_defect, 3.0, 1e-9);
}

TEST(Basis, IndexingAndViews) {
    const auto b = indexed_basis(NamedBasis::d3_2x5);
    EXPECT_THROW(b.op(0, 1), ContractError);
    EXPECT_THROW(b.op(3, 1), ContractError);
    EXPECT_THROW(b.op(1, 5), ContractError);
    const auto t = b.truncated(1);
    EXPECT_EQ(t.group_count(), 1u);
    EXPECT_EQ(t.id(), "d3_2x5[:1]");
    EXPECT_FALSE(t.informationally_complete());
    EXPECT_EQ(basis_by_id("d3_2x5[:1]").operator_count(), 4u);
    EXPECT_THROW(basis_by_id("d3_2x5[:9]"), ContractError);
    EXPECT_THROW(basis_by_id("gellmann_dx"), ContractError);
    EXPECT_THROW(b.regrouped(3, "bad"), DimensionError);
    const auto r = b.regrouped(2, "pairs");
    EXPECT_EQ(r.group_count(), 4u);
    EXPECT_EQ(max_abs_diff(r.op(2, 1), b.op(1, 3)), 0.0);
    EXPECT_THROW(HermitianOperatorBasis("x", 3, {{ComplexMatrix::identity(3)}, {}}), DimensionError);
}

TEST(Basis, MumGellMannFamilies) {
    for (std::size_t d = 2; d <= 5; ++d) {
        const auto b = mum_gellmann_basis(d);
        EXPECT_EQ(b.group_count(), d + 1);
        EXPECT_EQ(b.outcomes(), d);
        EXPECT_TRUE(validate_basis(b).passed);
    }
}

TEST(Basis, JsonManifest) {
    const auto j = basis_to_json(indexed_basis(NamedBasis::d3_4x3));
    EXPECT_EQ(j.at("N"), 4);
    EXPECT_EQ(j.at("M"), 3);
    ASSERT_EQ(j.at("operators").size(), 8u);
    EXPECT_EQ(j.at("operators")[3].at("alpha"), 2);
    EXPECT_EQ(j.at("operators")[3].at("k"), 2);
    const auto m = matrix_from_json(j.at("operators")[3].at("matrix"));
    EXPECT_EQ(max_abs_diff(m, indexed_basis(NamedBasis::d3_4x3).op(2, 2)), 0.0);
}
