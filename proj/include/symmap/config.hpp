#pragma once

namespace symmap {

/// Numerical tolerances shared by every public operation.
///
/// Operations take a `const Tolerances&` defaulting to `default_tolerances()`,
/// so a test can tighten or loosen all checks in one place.
struct Tolerances {
    double hermitian = 1e-10;        // eig_hermitian / trace norm precondition
    double hermitian_strict = 1e-12; // basis operators
    double residual = 1e-10;         // relative eigen-reconstruction residual
    double jacobi_offdiag = 1e-13;   // stop when off(A)_F <= this * ||A||_F
    int jacobi_max_sweeps = 64;
    double psd = 1e-9;               // min eigenvalue >= -psd counts as PSD
    double spectrum_match = 1e-9;    // multiset comparison, scaled by (1 + max|lambda|)
    double basis = 1e-10;            // Gram / trace / Hermiticity defects
    double trace = 1e-10;            // density matrix trace and POVM completeness
    double symmetry = 1e-9;          // POVM overlap identities
    double xt_relation = 1e-12;      // x(t) relation
    double verdict = 1e-9;           // entanglement verdict, scaled by (1 + ||out||_max)
    double positivity = 1e-9;        // Tr[(Phi_z P)^2] - 1/(d-1)
    double rotation = 1e-10;         // orthogonality of rotation matrices
    double t_opt_abs = 1e-12;        // bisection target on t
};

inline const Tolerances& default_tolerances() {
    static const Tolerances tol{};
    return tol;
}

} // namespace symmap
