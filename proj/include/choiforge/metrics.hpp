#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <sstream>

#include "choiforge/channels.hpp"

namespace choiforge {

namespace detail {

inline void require_same_dims(const ChoiMatrix& a, const ChoiMatrix& b, const char* op) {
    if (a.input_dim() != b.input_dim() || a.output_dim() != b.output_dim()) {
        throw Error(ErrorKind::dimension_mismatch,
                    std::string(op) + ": dims (" + std::to_string(a.input_dim()) + ", " +
                        std::to_string(a.output_dim()) + ") vs (" + std::to_string(b.input_dim()) + ", " +
                        std::to_string(b.output_dim()) + ")");
    }
}

inline void require_psd(const ChoiMatrix& j, const char* op) {
    const double min_eig = hermitian_eig(j.matrix()).min_eigenvalue();
    if (min_eig < -tolerance::positivity) {
        std::ostringstream msg;
        msg << op << ": Choi matrix is not positive semidefinite (eigenvalue " << min_eig << ")";
        throw NotCompletelyPositive(msg.str(), min_eig);
    }
}

}  // namespace detail

/// Frobenius distance between unnormalized Choi matrices.
inline double choi_distance(const ChoiMatrix& a, const ChoiMatrix& b) {
    detail::require_same_dims(a, b, "choi_distance");
    return frobenius_distance(a.matrix(), b.matrix());
}

/// Uhlmann fidelity (Tr sqrt(sqrt(r1) r2 sqrt(r1)))^2 of the trace-normalized Choi
/// states r_i = J_i / Tr(J_i). For trace-preserving channels Tr(J) = n1.
inline double process_fidelity(const ChoiMatrix& a, const ChoiMatrix& b) {
    detail::require_same_dims(a, b, "process_fidelity");
    detail::require_psd(a, "process_fidelity");
    detail::require_psd(b, "process_fidelity");
    const double ta = a.matrix().trace().real();
    const double tb = b.matrix().trace().real();
    if (ta <= 0.0 || tb <= 0.0) {
        throw Error(ErrorKind::invalid_argument, "process_fidelity: Choi matrix has zero trace");
    }
    const auto rho_a = a.matrix() * (1.0 / ta);
    const auto rho_b = b.matrix() * (1.0 / tb);
    const auto root = psd_sqrt(rho_a);
    const auto inner_product = hermitian_part(multiply(multiply(root, rho_b), root));
    double sum = 0.0;
    for (double l : hermitian_eig(inner_product).eigenvalues)
        if (l > 1e-12) sum += std::sqrt(l);
    return std::clamp(sum * sum, 0.0, 1.0);
}

/// Measurement cost of ancilla-assisted tomography versus the
/// one-input-state-at-a-time approach, in ensemble measurements.
struct ResourceReport {
    std::size_t input_dim = 0;
    std::size_t output_dim = 0;
    std::size_t joint_state_dim = 0;               // n1 n2
    std::uint64_t ensemble_measurements = 0;       // (n1 n2)^2 for one joint density matrix
    std::uint64_t prior_method_measurements = 0;   // n1^2 density matrices, n2^2 each
    std::uint64_t degrees_of_freedom = 0;          // n1^2 n2^2 real parameters
};

inline ResourceReport resource_report(std::size_t n1, std::size_t n2) {
    if (n1 < 2 || n2 < 2) throw Error(ErrorKind::invalid_argument, "resource_report: dimensions must be at least 2");
    ResourceReport r;
    r.input_dim = n1;
    r.output_dim = n2;
    r.joint_state_dim = n1 * n2;
    r.ensemble_measurements = static_cast<std::uint64_t>(r.joint_state_dim) * r.joint_state_dim;
    r.prior_method_measurements = static_cast<std::uint64_t>(n1 * n1) * (n2 * n2);
    r.degrees_of_freedom = static_cast<std::uint64_t>(n1 * n1) * (n2 * n2);
    return r;
}

}  // namespace choiforge
