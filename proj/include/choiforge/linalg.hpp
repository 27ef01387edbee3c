#pragma once

// Dense complex linear algebra for small (<= 64x64) matrices.
//
// Bipartite convention used everywhere in this library: for a space A (x) B
// with dimensions (dim_a, dim_b), basis index = a * dim_b + b (row-major
// flattening), so block (i, j) of a bipartite matrix is indexed by the FIRST
// factor and has size dim_b x dim_b.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <limits>
#include <numeric>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "choiforge/error.hpp"

namespace choiforge {

using cplx = std::complex<double>;

class ComplexMatrix {
public:
    ComplexMatrix() = default;

    ComplexMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {
        if (rows == 0 || cols == 0) {
            throw Error(ErrorKind::invalid_argument, "matrix dimensions must be positive");
        }
    }

    ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<cplx> entries)
        : rows_(rows), cols_(cols), data_(std::move(entries)) {
        if (rows == 0 || cols == 0) {
            throw Error(ErrorKind::invalid_argument, "matrix dimensions must be positive");
        }
        if (data_.size() != rows * cols) {
            throw Error(ErrorKind::dimension_mismatch, "matrix entry count " + std::to_string(data_.size()) +
                                                           " does not match shape " + shape_string(rows, cols));
        }
        for (const auto& z : data_) {
            if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
                throw Error(ErrorKind::invalid_argument, "matrix entries must be finite");
            }
        }
    }

    /// Row-wise literal, e.g. {{0, 1}, {1, 0}}.
    ComplexMatrix(std::initializer_list<std::initializer_list<cplx>> rows) {
        rows_ = rows.size();
        cols_ = rows_ == 0 ? 0 : rows.begin()->size();
        if (rows_ == 0 || cols_ == 0) {
            throw Error(ErrorKind::invalid_argument, "matrix dimensions must be positive");
        }
        data_.reserve(rows_ * cols_);
        for (const auto& row : rows) {
            if (row.size() != cols_) {
                throw Error(ErrorKind::dimension_mismatch, "ragged matrix literal");
            }
            data_.insert(data_.end(), row.begin(), row.end());
        }
    }

    static ComplexMatrix identity(std::size_t n) {
        ComplexMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    static ComplexMatrix zeros(std::size_t rows, std::size_t cols) { return ComplexMatrix(rows, cols); }

    /// |i><j| in dimension n.
    static ComplexMatrix unit(std::size_t n, std::size_t i, std::size_t j) {
        ComplexMatrix m(n, n);
        m(i, j) = 1.0;
        return m;
    }

    /// Column vector |i> in dimension n.
    static ComplexMatrix basis_vector(std::size_t n, std::size_t i) {
        ComplexMatrix v(n, 1);
        v(i, 0) = 1.0;
        return v;
    }

    static ComplexMatrix column(std::vector<cplx> entries) {
        const auto n = entries.size();
        return ComplexMatrix(n, 1, std::move(entries));
    }

    static ComplexMatrix diagonal(const std::vector<double>& d) {
        ComplexMatrix m(d.size(), d.size());
        for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
        return m;
    }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    bool is_square() const noexcept { return rows_ == cols_; }
    bool empty() const noexcept { return data_.empty(); }

    cplx& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    const cplx& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    const std::vector<cplx>& entries() const noexcept { return data_; }

    std::string shape() const { return shape_string(rows_, cols_); }

    cplx trace() const {
        require_square("trace");
        cplx t = 0.0;
        for (std::size_t i = 0; i < rows_; ++i) t += (*this)(i, i);
        return t;
    }

    ComplexMatrix column_at(std::size_t c) const {
        ComplexMatrix v(rows_, 1);
        for (std::size_t r = 0; r < rows_; ++r) v(r, 0) = (*this)(r, c);
        return v;
    }

    /// Sub-block of size (block_rows x block_cols) at block coordinates (bi, bj).
    ComplexMatrix block(std::size_t bi, std::size_t bj, std::size_t block_rows, std::size_t block_cols) const {
        ComplexMatrix b(block_rows, block_cols);
        for (std::size_t r = 0; r < block_rows; ++r)
            for (std::size_t c = 0; c < block_cols; ++c) b(r, c) = (*this)(bi * block_rows + r, bj * block_cols + c);
        return b;
    }

    void set_block(std::size_t bi, std::size_t bj, const ComplexMatrix& b) {
        for (std::size_t r = 0; r < b.rows(); ++r)
            for (std::size_t c = 0; c < b.cols(); ++c) (*this)(bi * b.rows() + r, bj * b.cols() + c) = b(r, c);
    }

    ComplexMatrix& operator+=(const ComplexMatrix& o) {
        require_same_shape(o, "addition");
        for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
        return *this;
    }
    ComplexMatrix& operator-=(const ComplexMatrix& o) {
        require_same_shape(o, "subtraction");
        for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
        return *this;
    }
    ComplexMatrix& operator*=(cplx s) {
        for (auto& z : data_) z *= s;
        return *this;
    }

    friend ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b) { return a += b; }
    friend ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b) { return a -= b; }
    friend ComplexMatrix operator*(ComplexMatrix a, cplx s) { return a *= s; }
    friend ComplexMatrix operator*(cplx s, ComplexMatrix a) { return a *= s; }

    friend bool operator==(const ComplexMatrix& a, const ComplexMatrix& b) {
        return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
    }

    static std::string shape_string(std::size_t r, std::size_t c) {
        return std::to_string(r) + "x" + std::to_string(c);
    }

private:
    void require_square(const char* op) const {
        if (!is_square()) {
            throw Error(ErrorKind::dimension_mismatch, std::string(op) + " requires a square matrix, got " + shape());
        }
    }
    void require_same_shape(const ComplexMatrix& o, const char* op) const {
        if (rows_ != o.rows_ || cols_ != o.cols_) {
            throw Error(ErrorKind::dimension_mismatch,
                        std::string(op) + ": shape mismatch " + shape() + " vs " + o.shape());
        }
    }

    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<cplx> data_;
};

inline ComplexMatrix multiply(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.cols() != b.rows()) {
        throw Error(ErrorKind::dimension_mismatch,
                    "multiply: cannot multiply " + a.shape() + " by " + b.shape());
    }
    ComplexMatrix out(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const cplx aik = a(i, k);
            if (aik == cplx{}) continue;
            for (std::size_t j = 0; j < b.cols(); ++j) out(i, j) += aik * b(k, j);
        }
    return out;
}

inline ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) { return multiply(a, b); }

inline ComplexMatrix adjoint(const ComplexMatrix& a) {
    ComplexMatrix out(a.cols(), a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) out(j, i) = std::conj(a(i, j));
    return out;
}

inline ComplexMatrix transpose(const ComplexMatrix& a) {
    ComplexMatrix out(a.cols(), a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) out(j, i) = a(i, j);
    return out;
}

inline ComplexMatrix conjugate(const ComplexMatrix& a) {
    ComplexMatrix out = a;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) out(i, j) = std::conj(a(i, j));
    return out;
}

/// Kronecker product: block (i, j) of the result is a(i, j) * b.
inline ComplexMatrix tensor_product(const ComplexMatrix& a, const ComplexMatrix& b) {
    ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) {
            const cplx aij = a(i, j);
            for (std::size_t k = 0; k < b.rows(); ++k)
                for (std::size_t l = 0; l < b.cols(); ++l) out(i * b.rows() + k, j * b.cols() + l) = aij * b(k, l);
        }
    return out;
}

/// |v><v| for a column vector v.
inline ComplexMatrix outer(const ComplexMatrix& v) { return multiply(v, adjoint(v)); }

/// <u|v> for column vectors.
inline cplx inner(const ComplexMatrix& u, const ComplexMatrix& v) {
    if (u.cols() != 1 || v.cols() != 1 || u.rows() != v.rows()) {
        throw Error(ErrorKind::dimension_mismatch, "inner: expected equal-length columns, got " + u.shape() +
                                                       " and " + v.shape());
    }
    cplx s = 0.0;
    for (std::size_t i = 0; i < u.rows(); ++i) s += std::conj(u(i, 0)) * v(i, 0);
    return s;
}

/// Tr(a^dagger b).
inline cplx hilbert_schmidt(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw Error(ErrorKind::dimension_mismatch,
                    "hilbert_schmidt: shape mismatch " + a.shape() + " vs " + b.shape());
    }
    cplx s = 0.0;
    for (std::size_t k = 0; k < a.entries().size(); ++k) s += std::conj(a.entries()[k]) * b.entries()[k];
    return s;
}

inline double frobenius_norm(const ComplexMatrix& a) {
    double s = 0.0;
    for (const auto& z : a.entries()) s += std::norm(z);
    return std::sqrt(s);
}

inline double frobenius_distance(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw Error(ErrorKind::dimension_mismatch,
                    "frobenius_distance: shape mismatch " + a.shape() + " vs " + b.shape());
    }
    double s = 0.0;
    for (std::size_t k = 0; k < a.entries().size(); ++k) s += std::norm(a.entries()[k] - b.entries()[k]);
    return std::sqrt(s);
}

/// Frobenius norm of (m - m^dagger) / 2; zero for Hermitian m.
inline double hermiticity_deviation(const ComplexMatrix& m) {
    if (!m.is_square()) return std::numeric_limits<double>::infinity();
    double s = 0.0;
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) s += std::norm(m(i, j) - std::conj(m(j, i)));
    return 0.5 * std::sqrt(s);
}

inline ComplexMatrix hermitian_part(const ComplexMatrix& m) { return (m + adjoint(m)) * 0.5; }

enum class Subsystem { first, second };

/// Traces out the subsystem that is NOT kept from an operator on A (x) B.
inline ComplexMatrix partial_trace(const ComplexMatrix& m, std::size_t dim_a, std::size_t dim_b, Subsystem keep) {
    const std::size_t n = dim_a * dim_b;
    if (dim_a == 0 || dim_b == 0 || m.rows() != n || m.cols() != n) {
        throw Error(ErrorKind::dimension_mismatch, "partial_trace: matrix " + m.shape() +
                                                       " is not compatible with subsystem dims " +
                                                       std::to_string(dim_a) + "x" + std::to_string(dim_b));
    }
    if (keep == Subsystem::first) {
        ComplexMatrix out(dim_a, dim_a);
        for (std::size_t i = 0; i < dim_a; ++i)
            for (std::size_t j = 0; j < dim_a; ++j)
                for (std::size_t k = 0; k < dim_b; ++k) out(i, j) += m(i * dim_b + k, j * dim_b + k);
        return out;
    }
    ComplexMatrix out(dim_b, dim_b);
    for (std::size_t k = 0; k < dim_b; ++k)
        for (std::size_t l = 0; l < dim_b; ++l)
            for (std::size_t i = 0; i < dim_a; ++i) out(k, l) += m(i * dim_b + k, i * dim_b + l);
    return out;
}

// ---------------------------------------------------------------------------
// Hermitian eigendecomposition (cyclic Jacobi)
// ---------------------------------------------------------------------------

namespace tolerance {
inline constexpr double hermiticity = 1e-8;
inline constexpr double orthonormality = 1e-10;
inline constexpr double reconstruction = 1e-9;
inline constexpr double unit_norm = 1e-8;
}  // namespace tolerance

struct HermitianEigenDecomposition {
    std::vector<double> eigenvalues;  // descending
    ComplexMatrix eigenvectors;       // column k pairs with eigenvalues[k]

    ComplexMatrix reconstruct() const {
        return multiply(multiply(eigenvectors, ComplexMatrix::diagonal(eigenvalues)), adjoint(eigenvectors));
    }

    double min_eigenvalue() const { return eigenvalues.empty() ? 0.0 : eigenvalues.back(); }
    double max_eigenvalue() const { return eigenvalues.empty() ? 0.0 : eigenvalues.front(); }
};

namespace detail {

// 2x2 unitary acting on the (p, q) plane, stored as its four entries.
struct PlaneRotation {
    std::size_t p, q;
    cplx pp, pq, qp, qq;
};

// Rotation J such that J^dagger [[a_pp, g], [conj(g), a_qq]] J is diagonal.
inline PlaneRotation jacobi_rotation(std::size_t p, std::size_t q, double a_pp, double a_qq, cplx g) {
    const double ag = std::abs(g);
    const cplx phase_conj = std::conj(g) / ag;
    const double tau = (a_qq - a_pp) / (2.0 * ag);
    const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
    const double c = 1.0 / std::sqrt(1.0 + t * t);
    const double s = t * c;
    return {p, q, c, s, -s * phase_conj, c * phase_conj};
}

// m <- m J
inline void rotate_columns(ComplexMatrix& m, const PlaneRotation& j) {
    for (std::size_t k = 0; k < m.rows(); ++k) {
        const cplx mp = m(k, j.p);
        const cplx mq = m(k, j.q);
        m(k, j.p) = mp * j.pp + mq * j.qp;
        m(k, j.q) = mp * j.pq + mq * j.qq;
    }
}

// m <- J^dagger m
inline void rotate_rows(ComplexMatrix& m, const PlaneRotation& j) {
    for (std::size_t k = 0; k < m.cols(); ++k) {
        const cplx mp = m(j.p, k);
        const cplx mq = m(j.q, k);
        m(j.p, k) = std::conj(j.pp) * mp + std::conj(j.qp) * mq;
        m(j.q, k) = std::conj(j.pq) * mp + std::conj(j.qq) * mq;
    }
}

// Fix the arbitrary phase of a unit column: its largest-magnitude entry becomes real positive.
inline void normalize_phase(ComplexMatrix& v, std::size_t col) {
    std::size_t best = 0;
    double best_mag = -1.0;
    for (std::size_t r = 0; r < v.rows(); ++r) {
        const double mag = std::abs(v(r, col));
        if (mag > best_mag + 1e-12) {
            best_mag = mag;
            best = r;
        }
    }
    if (best_mag <= 0.0) return;
    const cplx phase = std::conj(v(best, col)) / best_mag;
    for (std::size_t r = 0; r < v.rows(); ++r) v(r, col) *= phase;
}

// Appends standard-basis directions, Gram-Schmidt orthogonalized, until `basis`
// has `target` orthonormal columns. Columns [0, filled) must already be orthonormal.
inline void complete_orthonormal_basis(ComplexMatrix& basis, std::size_t filled) {
    const std::size_t n = basis.rows();
    std::size_t next = filled;
    for (std::size_t e = 0; e < n && next < basis.cols(); ++e) {
        ComplexMatrix v = ComplexMatrix::basis_vector(n, e);
        for (int pass = 0; pass < 2; ++pass) {
            for (std::size_t c = 0; c < next; ++c) {
                const ComplexMatrix u = basis.column_at(c);
                const cplx proj = inner(u, v);
                for (std::size_t r = 0; r < n; ++r) v(r, 0) -= proj * u(r, 0);
            }
        }
        const double norm = frobenius_norm(v);
        if (norm < 1e-6) continue;
        for (std::size_t r = 0; r < n; ++r) basis(r, next) = v(r, 0) / norm;
        ++next;
    }
}

}  // namespace detail

/// Eigendecomposition of a Hermitian matrix. The input is symmetrized as
/// (m + m^dagger) / 2 after the Hermiticity check.
inline HermitianEigenDecomposition hermitian_eig(const ComplexMatrix& m) {
    if (!m.is_square()) {
        throw Error(ErrorKind::dimension_mismatch, "hermitian_eig: non-square input " + m.shape());
    }
    const double dev = hermiticity_deviation(m);
    if (dev > tolerance::hermiticity) {
        std::ostringstream msg;
        msg << "hermitian_eig: input is not Hermitian (deviation " << dev << ")";
        throw Error(ErrorKind::not_hermitian, msg.str());
    }
    const std::size_t n = m.rows();
    ComplexMatrix a = hermitian_part(m);
    ComplexMatrix v = ComplexMatrix::identity(n);

    const double scale = std::max(frobenius_norm(a), std::numeric_limits<double>::min());
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) off += std::norm(a(p, q));
        if (std::sqrt(off) <= 1e-15 * scale) break;

        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) {
                const cplx g = a(p, q);
                if (std::abs(g) <= 1e-300) continue;
                const auto rot = detail::jacobi_rotation(p, q, a(p, p).real(), a(q, q).real(), g);
                detail::rotate_columns(a, rot);
                detail::rotate_rows(a, rot);
                detail::rotate_columns(v, rot);
                a(p, q) = 0.0;
                a(q, p) = 0.0;
                a(p, p) = a(p, p).real();
                a(q, q) = a(q, q).real();
            }
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t x, std::size_t y) { return a(x, x).real() > a(y, y).real(); });

    HermitianEigenDecomposition out;
    out.eigenvalues.reserve(n);
    out.eigenvectors = ComplexMatrix(n, n);
    for (std::size_t k = 0; k < n; ++k) {
        out.eigenvalues.push_back(a(order[k], order[k]).real());
        for (std::size_t r = 0; r < n; ++r) out.eigenvectors(r, k) = v(r, order[k]);
        detail::normalize_phase(out.eigenvectors, k);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Schmidt decomposition
// ---------------------------------------------------------------------------

struct SchmidtDecomposition {
    std::vector<double> coefficients;  // descending, min(dim_a, dim_b) entries
    ComplexMatrix left_basis;          // dim_a x dim_a unitary U
    ComplexMatrix right_basis;         // dim_b x dim_b unitary V

    /// sum_i alpha_i (U|i>) (x) (V|i>) as a column vector.
    ComplexMatrix reassemble() const {
        const std::size_t da = left_basis.rows();
        const std::size_t db = right_basis.rows();
        ComplexMatrix psi(da * db, 1);
        for (std::size_t i = 0; i < coefficients.size(); ++i)
            for (std::size_t a = 0; a < da; ++a)
                for (std::size_t b = 0; b < db; ++b)
                    psi(a * db + b, 0) += coefficients[i] * left_basis(a, i) * right_basis(b, i);
        return psi;
    }
};

/// Schmidt decomposition of a unit vector on A (x) B, via a one-sided Jacobi
/// SVD of its dim_a x dim_b reshaping.
inline SchmidtDecomposition schmidt_decompose(const ComplexMatrix& state, std::size_t dim_a, std::size_t dim_b) {
    if (state.cols() != 1 || state.rows() != dim_a * dim_b) {
        throw Error(ErrorKind::dimension_mismatch, "schmidt_decompose: state " + state.shape() +
                                                       " is not a column of length " +
                                                       std::to_string(dim_a * dim_b));
    }
    const double norm = frobenius_norm(state);
    if (std::abs(norm - 1.0) > tolerance::unit_norm) {
        std::ostringstream msg;
        msg << "schmidt_decompose: state is not a unit vector (norm " << norm << ")";
        throw Error(ErrorKind::invalid_argument, msg.str());
    }

    // g = reshaped state; accumulate W so that g_initial * W has orthogonal columns.
    ComplexMatrix g(dim_a, dim_b);
    for (std::size_t a = 0; a < dim_a; ++a)
        for (std::size_t b = 0; b < dim_b; ++b) g(a, b) = state(a * dim_b + b, 0);
    ComplexMatrix w = ComplexMatrix::identity(dim_b);

    for (int sweep = 0; sweep < 100; ++sweep) {
        bool rotated = false;
        for (std::size_t p = 0; p < dim_b; ++p)
            for (std::size_t q = p + 1; q < dim_b; ++q) {
                double npp = 0.0, nqq = 0.0;
                cplx gpq = 0.0;
                for (std::size_t r = 0; r < dim_a; ++r) {
                    npp += std::norm(g(r, p));
                    nqq += std::norm(g(r, q));
                    gpq += std::conj(g(r, p)) * g(r, q);
                }
                if (std::abs(gpq) <= 1e-16 * std::sqrt(npp * nqq) || std::abs(gpq) <= 1e-300) continue;
                const auto rot = detail::jacobi_rotation(p, q, npp, nqq, gpq);
                detail::rotate_columns(g, rot);
                detail::rotate_columns(w, rot);
                rotated = true;
            }
        if (!rotated) break;
    }

    std::vector<double> sigma(dim_b);
    for (std::size_t c = 0; c < dim_b; ++c) sigma[c] = frobenius_norm(g.column_at(c));
    std::vector<std::size_t> order(dim_b);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return sigma[x] > sigma[y]; });

    const std::size_t rank_cap = std::min(dim_a, dim_b);
    SchmidtDecomposition out;
    out.left_basis = ComplexMatrix(dim_a, dim_a);
    out.right_basis = ComplexMatrix(dim_b, dim_b);
    std::size_t filled = 0;
    for (std::size_t k = 0; k < dim_b; ++k) {
        const std::size_t c = order[k];
        // Right basis V = conj(W): psi = sum_i sigma_i u_i (x) conj(w_i).
        for (std::size_t r = 0; r < dim_b; ++r) out.right_basis(r, k) = std::conj(w(r, c));
        if (k < rank_cap) {
            out.coefficients.push_back(sigma[c]);
            if (sigma[c] > 1e-13 && filled == k) {
                for (std::size_t r = 0; r < dim_a; ++r) out.left_basis(r, k) = g(r, c) / sigma[c];
                ++filled;
            }
        }
    }
    detail::complete_orthonormal_basis(out.left_basis, filled);
    return out;
}

inline bool is_unitary(const ComplexMatrix& u, double tol = tolerance::orthonormality) {
    if (!u.is_square()) return false;
    return frobenius_distance(multiply(adjoint(u), u), ComplexMatrix::identity(u.rows())) <= tol;
}

/// Principal square root of a PSD matrix; eigenvalues below `clip` are treated as zero.
inline ComplexMatrix psd_sqrt(const ComplexMatrix& m, double clip = 1e-12) {
    auto eig = hermitian_eig(m);
    for (auto& l : eig.eigenvalues) l = l > clip ? std::sqrt(l) : 0.0;
    return eig.reconstruct();
}

}  // namespace choiforge
