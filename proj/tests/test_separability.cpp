#include <gtest/gtest.h>

#include "symmap/catalog.hpp"
#include "symmap/separability.hpp"

using namespace symmap;

namespace {

/// Printed eigenvalues of the 16 x 16 output for state18, kept independent of the library.
std::vector<double> printed_spectrum(double q1, double q2, double q3, double q4, double z) {
    const double base = 1.0 / 8.0 + 5.0 * z / 4.0;
    const double A = -z * (3 * q1 / 8 + 5 * (q2 + q3 + q4) / 24 + 1) + base;
    const double B = -z * (3 * q4 / 8 + 5 * (q1 + q2 + q3) / 24 + 1) + base;
    const double C = -z * (3 * q3 / 8 + 5 * (q1 + q2 + q4) / 24 + 1) + base;
    const double D = -z * (3 * q2 / 8 + 5 * (q1 + q3 + q4) / 24 + 1) + base;
    std::vector<double> ev{A / 2 - q1 * z / 4, A / 2 + q1 * z / 12, A / 2 + q1 * z / 12, A / 2 + q1 * z / 12};
    for (double v : {B, C, D}) ev.insert(ev.end(), 4, v / 2);
    std::sort(ev.begin(), ev.end());
    return ev;
}

double max_spectrum_diff(const std::vector<double>& a, const std::vector<double>& b) {
    EXPECT_EQ(a.size(), b.size());
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

ComplexMatrix local_a(const ComplexMatrix& u, std::size_t dB) { return kron(u, ComplexMatrix::identity(dB)); }

} // namespace

TEST(State18, Entries) {
    const auto rho = build_state_18({0.4, 0.3, 0.2, 0.1});
    const auto& m = rho.matrix();
    EXPECT_DOUBLE_EQ(m(0, 0).real(), 0.1);
    EXPECT_DOUBLE_EQ(m(1, 1).real(), 0.025);
    EXPECT_DOUBLE_EQ(m(3, 3).real(), 0.075);
    EXPECT_DOUBLE_EQ(m(4, 4).real(), 0.075);
    EXPECT_DOUBLE_EQ(m(15, 15).real(), 0.1);
    EXPECT_DOUBLE_EQ(m(0, 15).real(), 0.1);
    EXPECT_DOUBLE_EQ(m(5, 10).real(), 0.1);
    EXPECT_EQ(m(0, 1), Complex{});
    EXPECT_NEAR(m.trace().real(), 1.0, 1e-15);
    EXPECT_THROW(build_state_18({0.5, 0.5, 0.5, -0.5}), ContractError);
    EXPECT_THROW(build_state_18({0.5, 0.5, 0.5, 0.5}), ContractError);
}

TEST(State18, PipelineMatchesPrintedSpectrumOnGrid) {
    double worst = 0.0;
    for (double z = -1.0; z <= 1.0 + 1e-12; z += 0.25) {
        const auto spec = catalog_spec("state18", z);
        for (double q1 = 0.0; q1 <= 1.0 + 1e-12; q1 += 0.125) {
            const double r = (1 - q1) / 3;
            const auto d = detect(spec, build_state_18({q1, r, r, r}));
            worst = std::max(worst, max_spectrum_diff(d.spectrum, printed_spectrum(q1, r, r, r, z)));
        }
    }
    EXPECT_LE(worst, 1e-12);
}

TEST(State18, NonUniformWeights) {
    const Q4 q{0.35, 0.3, 0.25, 0.1};
    for (double z : {-0.7, 0.6, 1.0}) {
        const auto d = detect(catalog_spec("state18", z), build_state_18(q));
        EXPECT_LE(max_spectrum_diff(d.spectrum, printed_spectrum(q[0], q[1], q[2], q[3], z)), 1e-12);
        EXPECT_LE(max_spectrum_diff(appendix_c_oracle(q, z), printed_spectrum(q[0], q[1], q[2], q[3], z)), 1e-15);
    }
}

TEST(State18, Threshold) {
    for (double z : {0.25, 0.5, 1.0}) {
        const double t = state18_threshold(catalog_spec("state18", z));
        EXPECT_NEAR(t, 1.0 / 16 + 3.0 / (16 * z), 1e-9) << z;
    }
    EXPECT_TRUE(detect(catalog_spec("state18", 1.0), build_state_18(q4_uniform_rest(0.3))).entangled);
    EXPECT_FALSE(detect(catalog_spec("state18", 1.0), build_state_18(q4_uniform_rest(0.2))).entangled);
    // z <= 0 never detects this family
    EXPECT_THROW(state18_threshold(catalog_spec("state18", -0.5)), CertificationError);
}

TEST(Detect, ZeroZGivesReducedStateTimesIdentity) {
    Rng rng(21);
    const auto spec = catalog_spec("example2", 0.0);
    const auto rho = random_separable_state(2, 3, 3, rng);
    const auto out = apply_extended_map(spec, rho, 2);
    const auto expected = kron(partial_trace_second(rho, 2, 3), ComplexMatrix::identity(3) * (1.0 / 3.0));
    EXPECT_LE(max_abs_diff(out, expected), 1e-14);
}

TEST(Detect, MaximallyMixedIsFixed) {
    for (const auto& e : spec_catalog()) {
        const auto spec = catalog_spec(e, -1.0);
        const std::size_t n = spec.dim() * spec.dim();
        const auto mm = ComplexMatrix::identity(n) * (1.0 / static_cast<double>(n));
        const auto d = detect(spec, BipartiteDensityMatrix::square(mm));
        EXPECT_FALSE(d.entangled);
        EXPECT_NEAR(d.min_eigenvalue, 1.0 / static_cast<double>(n), 1e-12) << e.name;
    }
}

TEST(Detect, ProductAndSeparableStatesPass) {
    Rng rng(22);
    for (const auto& e : spec_catalog())
        for (double z : {-1.0, 1.0}) {
            const auto spec = catalog_spec(e, z);
            const std::size_t d = spec.dim();
            for (int i = 0; i < 20; ++i) {
                const BipartiteDensityMatrix p(d, d, random_product_state(d, d, rng));
                EXPECT_GE(detect(spec, p).min_eigenvalue, -1e-10) << e.name;
                const BipartiteDensityMatrix s(2, d, random_separable_state(2, d, 4, rng));
                EXPECT_FALSE(detect(spec, s).entangled) << e.name;
            }
        }
}

TEST(Detect, LocalUnitaryOnFirstFactorKeepsSpectrum) {
    Rng rng(23);
    const auto spec = catalog_spec("state18", 0.8);
    const auto rho = build_state_18(q4_uniform_rest(0.6));
    const auto u = local_a(random_unitary(4, rng), 4);
    const BipartiteDensityMatrix rot(4, 4, u * rho.matrix() * u.adjoint());
    EXPECT_LE(max_spectrum_diff(detect(spec, rho).spectrum, detect(spec, rot).spectrum), 1e-12);
}

TEST(Detect, Contracts) {
    const auto spec = catalog_spec("example2", 1.0);
    const auto rho4 = BipartiteDensityMatrix::square(ComplexMatrix::identity(16) * (1.0 / 16));
    EXPECT_THROW(detect(spec, rho4), DimensionError);
    EXPECT_THROW(BipartiteDensityMatrix::square(ComplexMatrix::identity(5) * 0.2), DimensionError);
    EXPECT_THROW(BipartiteDensityMatrix(3, 3, ComplexMatrix::identity(9)), ContractError);
    ComplexMatrix neg = ComplexMatrix::identity(4) * 0.5;
    neg(0, 0) = -0.5;
    neg(1, 1) = 0.5;
    neg(2, 2) = 0.5;
    neg(3, 3) = 0.5;
    EXPECT_THROW(BipartiteDensityMatrix(2, 2, neg), ContractError);
    ComplexMatrix nh = ComplexMatrix::identity(4) * 0.25;
    nh(0, 1) = 0.1;
    EXPECT_THROW(BipartiteDensityMatrix(2, 2, nh), ContractError);
    const auto j = detection_report_to_json(detect(spec, BipartiteDensityMatrix::square(ComplexMatrix::identity(9) * (1.0 / 9))));
    EXPECT_EQ(j.at("spectrum").size(), 9u);
    EXPECT_EQ(j.at("spec").at("basis"), "d3_4x3");
}

TEST(Schmidt, PipelineMatchesBlockOracle) {
    Rng rng(24);
    for (const char* name : {"theorem2_d2", "theorem2_d3", "theorem2_d4"}) {
        const std::size_t d = catalog_spec(name, 0.0).dim();
        for (int i = 0; i < 4; ++i) {
            const auto alpha = random_schmidt_vector(d, rng);
            for (double z : {-1.0, -0.4, 0.3, 1.0}) {
                const auto got = detect(catalog_spec(name, z), schmidt_pure_state(alpha)).spectrum;
                // independent: eigenvalues of the d x d block by the library eig, and the
                // (d-1+z)/(d(d-1)) alpha_i^2 plateau
                const double dd = static_cast<double>(d);
                std::vector<double> want;
                ComplexMatrix P(d, d);
                for (std::size_t a = 0; a < d; ++a) {
                    want.insert(want.end(), d - 1, (dd - 1 + z) * alpha[a] * alpha[a] / (dd * (dd - 1)));
                    for (std::size_t b = 0; b < d; ++b)
                        P(a, b) = a == b ? (1 - z) * alpha[a] * alpha[a] / dd : -z * alpha[a] * alpha[b] / (dd - 1);
                }
                for (double v : eigenvalues_hermitian(P)) want.push_back(v);
                std::sort(want.begin(), want.end());
                EXPECT_LE(max_spectrum_diff(got, want), 1e-12) << name << " z=" << z;
            }
        }
    }
    const std::vector<double> bad{0.5, 0.5};
    EXPECT_THROW(schmidt_pure_state(bad), ContractError);
}

TEST(Schmidt, MaximallyEntangledIsDetectedForPositiveZ) {
    const std::vector<double> alpha(3, 1 / std::sqrt(3.0));
    EXPECT_TRUE(detect(catalog_spec("theorem2_d3", 0.5), schmidt_pure_state(alpha)).entangled);
    EXPECT_FALSE(detect(catalog_spec("theorem2_d3", -0.5), schmidt_pure_state(alpha)).entangled);
}
