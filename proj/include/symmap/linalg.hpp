#pragma once

// Dense complex matrices sized for bipartite operators (up to a few hundred
// rows), with the Hermitian spectral routines everything else is built on.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "symmap/config.hpp"
#include "symmap/errors.hpp"

namespace symmap {

using Complex = std::complex<double>;

inline bool is_finite(Complex c) { return std::isfinite(c.real()) && std::isfinite(c.imag()); }

/// Row-major dense matrix of complex doubles.
class ComplexMatrix {
public:
    ComplexMatrix() = default;

    ComplexMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {
        if (rows == 0 || cols == 0) throw DimensionError("ComplexMatrix: dimensions must be positive");
    }

    ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<Complex> entries)
        : rows_(rows), cols_(cols), data_(std::move(entries)) {
        if (rows == 0 || cols == 0) throw DimensionError("ComplexMatrix: dimensions must be positive");
        if (data_.size() != rows * cols)
            throw DimensionError("ComplexMatrix: entry count " + std::to_string(data_.size()) +
                                 " does not match " + std::to_string(rows) + "x" + std::to_string(cols));
        for (const auto& c : data_)
            if (!is_finite(c)) throw ContractError("ComplexMatrix: non-finite entry");
    }

    /// Nested-list construction, mostly for fixtures and tests.
    ComplexMatrix(std::initializer_list<std::initializer_list<Complex>> rows) {
        rows_ = rows.size();
        cols_ = rows_ ? rows.begin()->size() : 0;
        if (rows_ == 0 || cols_ == 0) throw DimensionError("ComplexMatrix: empty initializer");
        data_.reserve(rows_ * cols_);
        for (const auto& r : rows) {
            if (r.size() != cols_) throw DimensionError("ComplexMatrix: ragged initializer");
            data_.insert(data_.end(), r.begin(), r.end());
        }
    }

    static ComplexMatrix zeros(std::size_t n) { return ComplexMatrix(n, n); }

    static ComplexMatrix identity(std::size_t n) {
        ComplexMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    static ComplexMatrix diagonal(std::span<const double> values) {
        ComplexMatrix m(values.size(), values.size());
        for (std::size_t i = 0; i < values.size(); ++i) m(i, i) = values[i];
        return m;
    }

    static ComplexMatrix diagonal(std::initializer_list<double> values) {
        return diagonal(std::span<const double>(values.begin(), values.size()));
    }

    /// Outer product |u><v|.
    static ComplexMatrix outer(std::span<const Complex> u, std::span<const Complex> v) {
        ComplexMatrix m(u.size(), v.size());
        for (std::size_t i = 0; i < u.size(); ++i)
            for (std::size_t j = 0; j < v.size(); ++j) m(i, j) = u[i] * std::conj(v[j]);
        return m;
    }

    /// |i><j| in dimension n.
    static ComplexMatrix unit(std::size_t n, std::size_t i, std::size_t j) {
        ComplexMatrix m(n, n);
        m(i, j) = 1.0;
        return m;
    }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    bool is_square() const noexcept { return rows_ == cols_; }
    bool empty() const noexcept { return data_.empty(); }

    Complex& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    const Complex& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    std::span<const Complex> entries() const noexcept { return data_; }

    ComplexMatrix& operator+=(const ComplexMatrix& o) {
        require_same_shape(o, "operator+=");
        for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
        return *this;
    }
    ComplexMatrix& operator-=(const ComplexMatrix& o) {
        require_same_shape(o, "operator-=");
        for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
        return *this;
    }
    ComplexMatrix& operator*=(Complex s) {
        for (auto& c : data_) c *= s;
        return *this;
    }

    /// this += s * o, without a temporary.
    ComplexMatrix& add_scaled(Complex s, const ComplexMatrix& o) {
        require_same_shape(o, "add_scaled");
        for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += s * o.data_[k];
        return *this;
    }

    friend ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b) { return a += b; }
    friend ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b) { return a -= b; }
    friend ComplexMatrix operator*(ComplexMatrix a, Complex s) { return a *= s; }
    friend ComplexMatrix operator*(Complex s, ComplexMatrix a) { return a *= s; }
    friend ComplexMatrix operator*(double s, ComplexMatrix a) { return a *= s; }

    friend ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
        if (a.cols_ != b.rows_) throw DimensionError("matrix product: inner dimensions differ");
        ComplexMatrix c(a.rows_, b.cols_);
        for (std::size_t i = 0; i < a.rows_; ++i)
            for (std::size_t k = 0; k < a.cols_; ++k) {
                const Complex aik = a(i, k);
                if (aik == Complex{}) continue;
                for (std::size_t j = 0; j < b.cols_; ++j) c(i, j) += aik * b(k, j);
            }
        return c;
    }

    ComplexMatrix adjoint() const {
        ComplexMatrix m(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) m(j, i) = std::conj((*this)(i, j));
        return m;
    }

    ComplexMatrix transpose() const {
        ComplexMatrix m(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) m(j, i) = (*this)(i, j);
        return m;
    }

    /// Entrywise complex conjugate (not the adjoint).
    ComplexMatrix conj() const {
        ComplexMatrix m = *this;
        for (auto& c : m.data_) c = std::conj(c);
        return m;
    }

    Complex trace() const {
        require_square("trace");
        Complex t{};
        for (std::size_t i = 0; i < rows_; ++i) t += (*this)(i, i);
        return t;
    }

    double max_abs() const {
        double m = 0.0;
        for (const auto& c : data_) m = std::max(m, std::abs(c));
        return m;
    }

    double frobenius_norm() const {
        double s = 0.0;
        for (const auto& c : data_) s += std::norm(c);
        return std::sqrt(s);
    }

    void require_square(const char* op) const {
        if (!is_square())
            throw DimensionError(std::string(op) + ": matrix is " + std::to_string(rows_) + "x" +
                                 std::to_string(cols_) + ", square required");
    }

private:
    void require_same_shape(const ComplexMatrix& o, const char* op) const {
        if (rows_ != o.rows_ || cols_ != o.cols_) throw DimensionError(std::string(op) + ": shape mismatch");
    }

    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<Complex> data_;
};

/// Largest |a_ij - conj(a_ji)|.
inline double hermitian_defect(const ComplexMatrix& a) {
    a.require_square("hermitian_defect");
    double d = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = i; j < a.cols(); ++j) d = std::max(d, std::abs(a(i, j) - std::conj(a(j, i))));
    return d;
}

inline bool hermitize_check(const ComplexMatrix& a, double tol) { return hermitian_defect(a) <= tol; }

/// Hilbert-Schmidt inner product Tr(a^dagger b).
inline Complex hs_inner(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) throw DimensionError("hs_inner: shape mismatch");
    Complex s{};
    auto ea = a.entries();
    auto eb = b.entries();
    for (std::size_t k = 0; k < ea.size(); ++k) s += std::conj(ea[k]) * eb[k];
    return s;
}

/// Tr(a b) without forming the product.
inline Complex trace_of_product(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.cols() != b.rows() || a.rows() != b.cols()) throw DimensionError("trace_of_product: shape mismatch");
    Complex s{};
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t k = 0; k < a.cols(); ++k) s += a(i, k) * b(k, i);
    return s;
}

inline double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) throw DimensionError("max_abs_diff: shape mismatch");
    double m = 0.0;
    auto ea = a.entries();
    auto eb = b.entries();
    for (std::size_t k = 0; k < ea.size(); ++k) m = std::max(m, std::abs(ea[k] - eb[k]));
    return m;
}

struct Spectrum {
    std::vector<double> eigenvalues; // ascending
    ComplexMatrix eigenvectors;      // columns, matching eigenvalues
    double residual = 0.0;           // max column norm of A V - V Lambda
    int sweeps = 0;
};

/// Eigendecomposition of a Hermitian matrix by cyclic complex Jacobi rotations.
///
/// Each rotation first removes the phase of a_pq with a diagonal unitary and
/// then applies the real symmetric Jacobi rotation to the 2x2 block.
inline Spectrum eig_hermitian(const ComplexMatrix& a, const Tolerances& tol = default_tolerances()) {
    a.require_square("eig_hermitian");
    const double defect = hermitian_defect(a);
    if (defect > tol.hermitian)
        throw ContractError("eig_hermitian: input not Hermitian (defect " + std::to_string(defect) + ")");

    const std::size_t n = a.rows();
    ComplexMatrix A = a;
    for (std::size_t i = 0; i < n; ++i) {
        A(i, i) = A(i, i).real();
        for (std::size_t j = i + 1; j < n; ++j) {
            const Complex m = 0.5 * (A(i, j) + std::conj(A(j, i)));
            A(i, j) = m;
            A(j, i) = std::conj(m);
        }
    }
    ComplexMatrix V = ComplexMatrix::identity(n);

    const double threshold = tol.jacobi_offdiag * A.frobenius_norm();
    auto off_norm = [&] {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (i != j) s += std::norm(A(i, j));
        return std::sqrt(s);
    };

    int sweep = 0;
    bool converged = off_norm() <= threshold;
    while (!converged && sweep < tol.jacobi_max_sweeps) {
        ++sweep;
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const Complex apq = A(p, q);
                const double g = std::abs(apq);
                if (g == 0.0) continue;
                const Complex phase = apq / g;
                const double theta = (A(q, q).real() - A(p, p).real()) / (2.0 * g);
                const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                const Complex upp = c;
                const Complex upq = s;
                const Complex uqp = -s * std::conj(phase);
                const Complex uqq = c * std::conj(phase);

                for (std::size_t k = 0; k < n; ++k) {
                    const Complex akp = A(k, p);
                    const Complex akq = A(k, q);
                    A(k, p) = akp * upp + akq * uqp;
                    A(k, q) = akp * upq + akq * uqq;
                    const Complex vkp = V(k, p);
                    const Complex vkq = V(k, q);
                    V(k, p) = vkp * upp + vkq * uqp;
                    V(k, q) = vkp * upq + vkq * uqq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const Complex apk = A(p, k);
                    const Complex aqk = A(q, k);
                    A(p, k) = std::conj(upp) * apk + std::conj(uqp) * aqk;
                    A(q, k) = std::conj(upq) * apk + std::conj(uqq) * aqk;
                }
                A(p, q) = 0.0;
                A(q, p) = 0.0;
                A(p, p) = A(p, p).real();
                A(q, q) = A(q, q).real();
            }
        }
        converged = off_norm() <= threshold;
    }
    if (!converged)
        throw NumericError("eig_hermitian: no convergence after " + std::to_string(sweep) + " sweeps", off_norm());

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t i, std::size_t j) { return A(i, i).real() < A(j, j).real(); });

    Spectrum out;
    out.sweeps = sweep;
    out.eigenvalues.resize(n);
    out.eigenvectors = ComplexMatrix(n, n);
    for (std::size_t c = 0; c < n; ++c) {
        out.eigenvalues[c] = A(order[c], order[c]).real();
        for (std::size_t r = 0; r < n; ++r) out.eigenvectors(r, c) = V(r, order[c]);
    }

    // Residual against the caller's matrix, column by column.
    double residual = 0.0;
    for (std::size_t c = 0; c < n; ++c) {
        double col = 0.0;
        for (std::size_t r = 0; r < n; ++r) {
            Complex av{};
            for (std::size_t k = 0; k < n; ++k) av += a(r, k) * out.eigenvectors(k, c);
            col += std::norm(av - out.eigenvalues[c] * out.eigenvectors(r, c));
        }
        residual = std::max(residual, std::sqrt(col));
    }
    out.residual = residual;
    if (residual > tol.residual * (1.0 + a.max_abs()))
        throw NumericError("eig_hermitian: reconstruction residual too large", residual);
    return out;
}

inline std::vector<double> eigenvalues_hermitian(const ComplexMatrix& a, const Tolerances& tol = default_tolerances()) {
    return eig_hermitian(a, tol).eigenvalues;
}

inline double min_eigenvalue(const ComplexMatrix& a, const Tolerances& tol = default_tolerances()) {
    return eig_hermitian(a, tol).eigenvalues.front();
}

/// Sum of |lambda_i| over the Hermitian spectrum.
inline double trace_norm_hermitian(const ComplexMatrix& a, const Tolerances& tol = default_tolerances()) {
    double s = 0.0;
    for (double l : eig_hermitian(a, tol).eigenvalues) s += std::abs(l);
    return s;
}

/// Kronecker product, first factor outer: (a (x) b)_{(i p + k),(j q + l)} = a_ij b_kl.
inline ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
    const std::size_t p = b.rows();
    const std::size_t q = b.cols();
    ComplexMatrix out(a.rows() * p, a.cols() * q);
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) {
            const Complex aij = a(i, j);
            if (aij == Complex{}) continue;
            for (std::size_t k = 0; k < p; ++k)
                for (std::size_t l = 0; l < q; ++l) out(i * p + k, j * q + l) = aij * b(k, l);
        }
    return out;
}

inline void require_bipartite(const ComplexMatrix& a, std::size_t dA, std::size_t dB, const char* op) {
    if (!a.is_square() || a.rows() != dA * dB)
        throw DimensionError(std::string(op) + ": matrix of size " + std::to_string(a.rows()) + "x" +
                             std::to_string(a.cols()) + " is not " + std::to_string(dA) + "*" + std::to_string(dB));
}

/// Transposes every dB x dB block in place of the block.
inline ComplexMatrix partial_transpose_second(const ComplexMatrix& a, std::size_t dA, std::size_t dB) {
    require_bipartite(a, dA, dB, "partial_transpose_second");
    ComplexMatrix out(a.rows(), a.cols());
    for (std::size_t i = 0; i < dA; ++i)
        for (std::size_t j = 0; j < dA; ++j)
            for (std::size_t k = 0; k < dB; ++k)
                for (std::size_t l = 0; l < dB; ++l) out(i * dB + k, j * dB + l) = a(i * dB + l, j * dB + k);
    return out;
}

inline ComplexMatrix partial_trace_second(const ComplexMatrix& a, std::size_t dA, std::size_t dB) {
    require_bipartite(a, dA, dB, "partial_trace_second");
    ComplexMatrix out(dA, dA);
    for (std::size_t i = 0; i < dA; ++i)
        for (std::size_t j = 0; j < dA; ++j)
            for (std::size_t k = 0; k < dB; ++k) out(i, j) += a(i * dB + k, j * dB + k);
    return out;
}

/// Compares two eigenvalue multisets after sorting both.
inline bool spectra_match(std::vector<double> a, std::vector<double> b, const Tolerances& tol = default_tolerances(),
                          double* max_diff = nullptr) {
    if (a.size() != b.size()) return false;
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    double scale = 0.0;
    double diff = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        scale = std::max({scale, std::abs(a[i]), std::abs(b[i])});
        diff = std::max(diff, std::abs(a[i] - b[i]));
    }
    if (max_diff) *max_diff = diff;
    return diff <= tol.spectrum_match * (1.0 + scale);
}

} // namespace symmap
