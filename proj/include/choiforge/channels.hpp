#pragma once

// Quantum channels in Kraus, Choi and system-ancilla (Stinespring) form, plus
// conversions between them.
//
// Choi convention: J = (I (x) E)(sum_ij |i><j| (x) |i><j|), unnormalized, with the
// reference factor first. Block (i, j) of J (size n2 x n2) is E(|i><j|).

#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "choiforge/linalg.hpp"

namespace choiforge {

namespace tolerance {
inline constexpr double positivity = 1e-8;
inline constexpr double trace_condition = 1e-8;
inline constexpr double kraus_drop = 1e-10;
}  // namespace tolerance

/// An n1 -> n2 channel as a list of n2 x n1 Kraus operators.
///
/// Only shapes are enforced here. Whether sum_k A_k^dagger A_k <= I holds is
/// reported by check_cp_tp, so that malformed channels can still be loaded and linted.
class KrausSet {
public:
    KrausSet() = default;

    KrausSet(std::size_t input_dim, std::size_t output_dim, std::vector<ComplexMatrix> operators)
        : input_dim_(input_dim), output_dim_(output_dim), operators_(std::move(operators)) {
        if (input_dim == 0 || output_dim == 0) {
            throw Error(ErrorKind::invalid_argument, "KrausSet: dimensions must be positive");
        }
        for (std::size_t k = 0; k < operators_.size(); ++k) {
            const auto& a = operators_[k];
            if (a.rows() != output_dim || a.cols() != input_dim) {
                throw Error(ErrorKind::dimension_mismatch,
                            "KrausSet: operator " + std::to_string(k) + " has shape " + a.shape() + ", expected " +
                                ComplexMatrix::shape_string(output_dim, input_dim));
            }
        }
    }

    /// Single-operator set.
    explicit KrausSet(ComplexMatrix op) : KrausSet(op.cols(), op.rows(), {op}) {}

    std::size_t input_dim() const noexcept { return input_dim_; }
    std::size_t output_dim() const noexcept { return output_dim_; }
    std::size_t size() const noexcept { return operators_.size(); }
    const std::vector<ComplexMatrix>& operators() const noexcept { return operators_; }
    const ComplexMatrix& operator[](std::size_t k) const { return operators_[k]; }

    /// sum_k A_k^dagger A_k (n1 x n1).
    ComplexMatrix completeness() const {
        ComplexMatrix s(input_dim_, input_dim_);
        for (const auto& a : operators_) s += multiply(adjoint(a), a);
        return s;
    }

private:
    std::size_t input_dim_ = 0;
    std::size_t output_dim_ = 0;
    std::vector<ComplexMatrix> operators_;
};

/// Unnormalized Choi matrix of an n1 -> n2 map. Shape and Hermiticity are
/// enforced on construction; positivity (complete positivity of the map) is
/// checked by choi_to_kraus and check_cp_tp.
class ChoiMatrix {
public:
    ChoiMatrix() = default;

    ChoiMatrix(std::size_t input_dim, std::size_t output_dim, ComplexMatrix matrix)
        : input_dim_(input_dim), output_dim_(output_dim), matrix_(std::move(matrix)) {
        const std::size_t n = input_dim * output_dim;
        if (n == 0 || matrix_.rows() != n || matrix_.cols() != n) {
            throw Error(ErrorKind::dimension_mismatch, "ChoiMatrix: matrix " + matrix_.shape() +
                                                           " does not match dims (" + std::to_string(input_dim) +
                                                           ", " + std::to_string(output_dim) + ")");
        }
        const double dev = hermiticity_deviation(matrix_);
        if (dev > tolerance::hermiticity) {
            std::ostringstream msg;
            msg << "ChoiMatrix: matrix is not Hermitian (deviation " << dev << ")";
            throw Error(ErrorKind::not_hermitian, msg.str());
        }
    }

    std::size_t input_dim() const noexcept { return input_dim_; }
    std::size_t output_dim() const noexcept { return output_dim_; }
    const ComplexMatrix& matrix() const noexcept { return matrix_; }

    /// E(|i><j|).
    ComplexMatrix block(std::size_t i, std::size_t j) const {
        return matrix_.block(i, j, output_dim_, output_dim_);
    }

private:
    std::size_t input_dim_ = 0;
    std::size_t output_dim_ = 0;
    ComplexMatrix matrix_;
};

/// Ancilla-coupling model: E(M) = Tr_o[ U (M (x) rho_a) U^dagger (I (x) P_o) ].
/// The input space is system (x) ancilla; the output space is H2 (x) H_o.
class StinespringModel {
public:
    StinespringModel() = default;

    StinespringModel(std::size_t system_dim, std::size_t ancilla_dim, ComplexMatrix unitary,
                     ComplexMatrix ancilla_state, std::size_t output_dim, std::size_t discard_dim,
                     ComplexMatrix projector)
        : system_dim_(system_dim),
          ancilla_dim_(ancilla_dim),
          output_dim_(output_dim),
          discard_dim_(discard_dim),
          unitary_(std::move(unitary)),
          ancilla_state_(std::move(ancilla_state)),
          projector_(std::move(projector)) {
        const std::size_t n = system_dim * ancilla_dim;
        if (n == 0 || output_dim * discard_dim != n) {
            throw Error(ErrorKind::dimension_mismatch,
                        "StinespringModel: output partition " + std::to_string(output_dim) + "x" +
                            std::to_string(discard_dim) + " does not factor the joint dimension " +
                            std::to_string(n));
        }
        if (unitary_.rows() != n || unitary_.cols() != n) {
            throw Error(ErrorKind::dimension_mismatch, "StinespringModel: unitary has shape " + unitary_.shape());
        }
        if (!is_unitary(unitary_)) {
            throw Error(ErrorKind::invalid_argument, "StinespringModel: coupling matrix is not unitary");
        }
        if (ancilla_state_.rows() != ancilla_dim || ancilla_state_.cols() != ancilla_dim) {
            throw Error(ErrorKind::dimension_mismatch,
                        "StinespringModel: ancilla state has shape " + ancilla_state_.shape());
        }
        const auto rho_eig = hermitian_eig(ancilla_state_);
        if (rho_eig.min_eigenvalue() < -1e-10 || std::abs(ancilla_state_.trace() - 1.0) > 1e-10) {
            throw Error(ErrorKind::invalid_argument, "StinespringModel: ancilla state is not a density matrix");
        }
        if (projector_.rows() != discard_dim || projector_.cols() != discard_dim) {
            throw Error(ErrorKind::dimension_mismatch, "StinespringModel: projector has shape " + projector_.shape());
        }
        if (hermiticity_deviation(projector_) > 1e-10 ||
            frobenius_distance(multiply(projector_, projector_), projector_) > 1e-10) {
            throw Error(ErrorKind::invalid_argument, "StinespringModel: P_o is not an orthogonal projector");
        }
    }

    std::size_t system_dim() const noexcept { return system_dim_; }
    std::size_t ancilla_dim() const noexcept { return ancilla_dim_; }
    std::size_t output_dim() const noexcept { return output_dim_; }
    std::size_t discard_dim() const noexcept { return discard_dim_; }
    const ComplexMatrix& unitary() const noexcept { return unitary_; }
    const ComplexMatrix& ancilla_state() const noexcept { return ancilla_state_; }
    const ComplexMatrix& projector() const noexcept { return projector_; }

private:
    std::size_t system_dim_ = 0;
    std::size_t ancilla_dim_ = 0;
    std::size_t output_dim_ = 0;
    std::size_t discard_dim_ = 0;
    ComplexMatrix unitary_;
    ComplexMatrix ancilla_state_;
    ComplexMatrix projector_;
};

struct CpTpVerdict {
    bool is_cp = false;
    double min_choi_eigenvalue = 0.0;
    bool is_trace_preserving = false;
    bool is_trace_nonincreasing = false;
    double deviation_from_identity = 0.0;  // ||sum A^dagger A - I||_F

    bool ok() const noexcept { return is_cp && is_trace_nonincreasing; }
};

// ---------------------------------------------------------------------------

inline ComplexMatrix apply_kraus(const KrausSet& k, const ComplexMatrix& m) {
    if (m.rows() != k.input_dim() || m.cols() != k.input_dim()) {
        throw Error(ErrorKind::dimension_mismatch,
                    "apply_kraus: input " + m.shape() + " does not match channel input dimension " +
                        std::to_string(k.input_dim()));
    }
    ComplexMatrix out(k.output_dim(), k.output_dim());
    for (const auto& a : k.operators()) out += multiply(multiply(a, m), adjoint(a));
    return out;
}

/// E(M) = sum_ij M_ij E(|i><j|), reading E(|i><j|) off the Choi blocks.
inline ComplexMatrix apply_choi(const ChoiMatrix& j, const ComplexMatrix& m) {
    const std::size_t n1 = j.input_dim();
    if (m.rows() != n1 || m.cols() != n1) {
        throw Error(ErrorKind::dimension_mismatch, "apply_choi: input " + m.shape() +
                                                       " does not match channel input dimension " +
                                                       std::to_string(n1));
    }
    ComplexMatrix out(j.output_dim(), j.output_dim());
    for (std::size_t r = 0; r < n1; ++r)
        for (std::size_t c = 0; c < n1; ++c)
            if (m(r, c) != cplx{}) out += j.block(r, c) * m(r, c);
    return out;
}

inline ComplexMatrix apply_stinespring(const StinespringModel& s, const ComplexMatrix& m) {
    if (m.rows() != s.system_dim() || m.cols() != s.system_dim()) {
        throw Error(ErrorKind::dimension_mismatch, "apply_stinespring: input " + m.shape() +
                                                       " does not match system dimension " +
                                                       std::to_string(s.system_dim()));
    }
    const auto& u = s.unitary();
    const auto evolved = multiply(multiply(u, tensor_product(m, s.ancilla_state())), adjoint(u));
    const auto kept = tensor_product(ComplexMatrix::identity(s.output_dim()), s.projector());
    return partial_trace(multiply(evolved, kept), s.output_dim(), s.discard_dim(), Subsystem::first);
}

/// Assembles the Choi matrix block by block from an arbitrary linear map on n1 x n1 matrices.
inline ChoiMatrix choi_from_map(std::size_t n1, std::size_t n2,
                                const std::function<ComplexMatrix(const ComplexMatrix&)>& map) {
    ComplexMatrix j(n1 * n2, n1 * n2);
    for (std::size_t r = 0; r < n1; ++r)
        for (std::size_t c = 0; c < n1; ++c) {
            const auto image = map(ComplexMatrix::unit(n1, r, c));
            if (image.rows() != n2 || image.cols() != n2) {
                throw Error(ErrorKind::dimension_mismatch, "choi_from_map: map output " + image.shape() +
                                                               " does not match output dimension " +
                                                               std::to_string(n2));
            }
            j.set_block(r, c, image);
        }
    return ChoiMatrix(n1, n2, hermitian_part(j));
}

/// vec(A) = sum_i |i> (x) A|i>: segment i of the vector is column i of A.
inline ComplexMatrix vectorize(const ComplexMatrix& a) {
    const std::size_t n2 = a.rows();
    ComplexMatrix v(a.rows() * a.cols(), 1);
    for (std::size_t i = 0; i < a.cols(); ++i)
        for (std::size_t r = 0; r < n2; ++r) v(i * n2 + r, 0) = a(r, i);
    return v;
}

/// Inverse of vectorize: column i of the result is segment i of v.
inline ComplexMatrix unvectorize(const ComplexMatrix& v, std::size_t n1, std::size_t n2) {
    if (v.cols() != 1 || v.rows() != n1 * n2) {
        throw Error(ErrorKind::dimension_mismatch, "unvectorize: vector " + v.shape() +
                                                       " cannot be split into " + std::to_string(n1) +
                                                       " segments of length " + std::to_string(n2));
    }
    ComplexMatrix a(n2, n1);
    for (std::size_t i = 0; i < n1; ++i)
        for (std::size_t r = 0; r < n2; ++r) a(r, i) = v(i * n2 + r, 0);
    return a;
}

/// J = sum_k vec(A_k) vec(A_k)^dagger.
inline ChoiMatrix kraus_to_choi(const KrausSet& k) {
    const std::size_t n = k.input_dim() * k.output_dim();
    ComplexMatrix j(n, n);
    for (const auto& a : k.operators()) {
        const auto v = vectorize(a);
        for (std::size_t r = 0; r < n; ++r)
            for (std::size_t c = 0; c < n; ++c) j(r, c) += v(r, 0) * std::conj(v(c, 0));
    }
    return ChoiMatrix(k.input_dim(), k.output_dim(), std::move(j));
}

/// Canonical Kraus operators from the Choi eigendecomposition: each eigenvector
/// with eigenvalue above `drop_threshold`, scaled by sqrt(eigenvalue), is cut
/// into n1 segments of length n2 which become the columns of A_k.
inline KrausSet choi_to_kraus(const ChoiMatrix& j, double drop_threshold = tolerance::kraus_drop) {
    const auto eig = hermitian_eig(j.matrix());
    if (eig.min_eigenvalue() < -tolerance::positivity) {
        std::ostringstream msg;
        msg << "not completely positive: Choi matrix has eigenvalue " << eig.min_eigenvalue();
        throw NotCompletelyPositive(msg.str(), eig.min_eigenvalue());
    }
    std::vector<ComplexMatrix> ops;
    for (std::size_t k = 0; k < eig.eigenvalues.size(); ++k) {
        const double lambda = eig.eigenvalues[k];
        if (lambda <= drop_threshold) break;
        ops.push_back(unvectorize(eig.eigenvectors.column_at(k) * std::sqrt(lambda), j.input_dim(),
                                  j.output_dim()));
    }
    return KrausSet(j.input_dim(), j.output_dim(), std::move(ops));
}

inline ChoiMatrix stinespring_to_choi(const StinespringModel& s) {
    return choi_from_map(s.system_dim(), s.output_dim(),
                         [&](const ComplexMatrix& m) { return apply_stinespring(s, m); });
}

namespace detail {

inline void assess_trace_conditions(CpTpVerdict& v, const ComplexMatrix& completeness) {
    v.deviation_from_identity = frobenius_distance(completeness, ComplexMatrix::identity(completeness.rows()));
    const auto eig = hermitian_eig(completeness);
    double worst = 0.0;
    for (double l : eig.eigenvalues) worst = std::max(worst, std::abs(l - 1.0));
    v.is_trace_nonincreasing = eig.max_eigenvalue() <= 1.0 + tolerance::trace_condition;
    v.is_trace_preserving = worst <= tolerance::trace_condition;
}

}  // namespace detail

/// CP/TP verdict read off a Choi matrix. Since Tr_out J = (sum_k A_k^dagger A_k)^T,
/// the trace conditions are evaluated on the transpose of the output-traced Choi matrix.
inline CpTpVerdict check_cp_tp(const ChoiMatrix& j) {
    CpTpVerdict v;
    v.min_choi_eigenvalue = hermitian_eig(j.matrix()).min_eigenvalue();
    v.is_cp = v.min_choi_eigenvalue >= -tolerance::positivity;
    detail::assess_trace_conditions(
        v, transpose(partial_trace(j.matrix(), j.input_dim(), j.output_dim(), Subsystem::first)));
    return v;
}

inline CpTpVerdict check_cp_tp(const KrausSet& k) {
    CpTpVerdict v;
    v.min_choi_eigenvalue = hermitian_eig(kraus_to_choi(k).matrix()).min_eigenvalue();
    v.is_cp = v.min_choi_eigenvalue >= -tolerance::positivity;
    detail::assess_trace_conditions(v, k.completeness());
    return v;
}

/// Two Kraus sets describe the same channel iff their Choi matrices coincide.
inline bool kraus_equivalent(const KrausSet& a, const KrausSet& b, double tol) {
    if (a.input_dim() != b.input_dim() || a.output_dim() != b.output_dim()) {
        throw Error(ErrorKind::dimension_mismatch,
                    "kraus_equivalent: dims (" + std::to_string(a.input_dim()) + ", " +
                        std::to_string(a.output_dim()) + ") vs (" + std::to_string(b.input_dim()) + ", " +
                        std::to_string(b.output_dim()) + ")");
    }
    return frobenius_distance(kraus_to_choi(a).matrix(), kraus_to_choi(b).matrix()) < tol;
}

}  // namespace choiforge
