#pragma once

// Named textbook channels, used as a test corpus and by the CLI.

#include <array>
#include <cmath>
#include <string>
#include <string_view>
#include <vector>

#include "choiforge/channels.hpp"
#include "choiforge/random.hpp"

namespace choiforge {

inline constexpr std::array<std::string_view, 7> zoo_channel_names = {
    "identity", "unitary", "depolarizing", "amplitude_damping", "phase_damping", "project_discard", "random_cptp",
};

inline std::string zoo_names_joined() {
    std::string s;
    for (auto name : zoo_channel_names) {
        if (!s.empty()) s += ", ";
        s += name;
    }
    return s;
}

namespace detail {

inline void require_param_count(std::string_view name, const std::vector<double>& params, std::size_t min_count,
                                std::size_t max_count) {
    if (params.size() < min_count || params.size() > max_count) {
        throw Error(ErrorKind::invalid_argument, std::string(name) + ": expected " + std::to_string(min_count) +
                                           (min_count == max_count ? "" : "-" + std::to_string(max_count)) +
                                           " parameter(s), got " + std::to_string(params.size()));
    }
}

inline double probability_param(std::string_view name, double p, const char* label) {
    if (!(p >= 0.0 && p <= 1.0)) {
        throw Error(ErrorKind::invalid_argument,
                    std::string(name) + ": " + label + " must lie in [0, 1], got " + std::to_string(p));
    }
    return p;
}

inline std::uint64_t seed_param(std::string_view name, double v) {
    if (!(v >= 0.0) || v != std::floor(v) || v > 9.007199254740992e15) {
        throw Error(ErrorKind::invalid_argument, std::string(name) + ": seed must be a nonnegative integer");
    }
    return static_cast<std::uint64_t>(v);
}

// Generalized Pauli (Weyl) operator X^a Z^b in dimension n.
inline ComplexMatrix weyl_operator(std::size_t n, std::size_t a, std::size_t b) {
    const double two_pi = 2.0 * std::acos(-1.0);
    ComplexMatrix w(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        const double angle = two_pi * static_cast<double>((b * j) % n) / static_cast<double>(n);
        w((j + a) % n, j) = std::polar(1.0, angle);
    }
    return w;
}

inline void push_nonzero(std::vector<ComplexMatrix>& ops, ComplexMatrix op) {
    if (frobenius_norm(op) > 0.0) ops.push_back(std::move(op));
}

}  // namespace detail

/// Builds a named channel. Parameters:
///   identity            -
///   unitary             [seed]          Haar-random unitary from the seed (default 0)
///   depolarizing        [p]             rho -> (1-p) rho + p Tr(rho) I/n
///   amplitude_damping   [gamma]         every excited level decays to |0> with probability gamma
///   phase_damping       [lambda]        off-diagonal coherences shrink by sqrt(1-lambda)
///   project_discard     -               {|0><0|}, trace-decreasing
///   random_cptp         [seed, count]   random isometry split into `count` operators
/// Zero operators are dropped. All channels except random_cptp require n1 == n2.
inline KrausSet zoo_channel(std::string_view name, const std::vector<double>& params, std::size_t n1,
                            std::size_t n2) {
    if (n1 < 1 || n2 < 1) throw Error(ErrorKind::invalid_argument, "zoo: dimensions must be positive");
    if (name != "random_cptp" && n1 != n2) {
        throw Error(ErrorKind::invalid_argument, std::string(name) + ": requires equal input and output dimension");
    }
    const std::size_t n = n1;
    std::vector<ComplexMatrix> ops;

    if (name == "identity") {
        detail::require_param_count(name, params, 0, 0);
        ops.push_back(ComplexMatrix::identity(n));
    } else if (name == "unitary") {
        detail::require_param_count(name, params, 0, 1);
        Rng rng(params.empty() ? 0 : detail::seed_param(name, params[0]));
        ops.push_back(random_unitary(n, rng));
    } else if (name == "depolarizing") {
        detail::require_param_count(name, params, 1, 1);
        const double p = detail::probability_param(name, params[0], "p");
        // (p / n^2) sum_{a,b} W_ab rho W_ab^dagger = p Tr(rho) I / n.
        const double nn = static_cast<double>(n * n);
        detail::push_nonzero(ops, ComplexMatrix::identity(n) * std::sqrt(1.0 - p + p / nn));
        for (std::size_t a = 0; a < n; ++a)
            for (std::size_t b = 0; b < n; ++b) {
                if (a == 0 && b == 0) continue;
                detail::push_nonzero(ops, detail::weyl_operator(n, a, b) * std::sqrt(p / nn));
            }
    } else if (name == "amplitude_damping") {
        detail::require_param_count(name, params, 1, 1);
        const double gamma = detail::probability_param(name, params[0], "gamma");
        ComplexMatrix a0(n, n);
        a0(0, 0) = 1.0;
        for (std::size_t k = 1; k < n; ++k) a0(k, k) = std::sqrt(1.0 - gamma);
        detail::push_nonzero(ops, a0);
        for (std::size_t k = 1; k < n; ++k) detail::push_nonzero(ops, ComplexMatrix::unit(n, 0, k) * std::sqrt(gamma));
    } else if (name == "phase_damping") {
        detail::require_param_count(name, params, 1, 1);
        const double lambda = detail::probability_param(name, params[0], "lambda");
        ComplexMatrix a0(n, n);
        a0(0, 0) = 1.0;
        for (std::size_t k = 1; k < n; ++k) a0(k, k) = std::sqrt(1.0 - lambda);
        detail::push_nonzero(ops, a0);
        for (std::size_t k = 1; k < n; ++k)
            detail::push_nonzero(ops, ComplexMatrix::unit(n, k, k) * std::sqrt(lambda));
    } else if (name == "project_discard") {
        detail::require_param_count(name, params, 0, 0);
        ops.push_back(ComplexMatrix::unit(n, 0, 0));
    } else if (name == "random_cptp") {
        detail::require_param_count(name, params, 2, 2);
        const auto seed = detail::seed_param(name, params[0]);
        const double count_value = params[1];
        if (!(count_value >= 1.0) || count_value != std::floor(count_value) ||
            count_value > static_cast<double>(n1 * n2)) {
            throw Error(ErrorKind::invalid_argument, "random_cptp: Kraus count must be an integer in [1, n1*n2]");
        }
        const auto count = static_cast<std::size_t>(count_value);
        if (n2 * count < n1) {
            throw Error(ErrorKind::invalid_argument, "random_cptp: n2 * count must be at least n1 for trace preservation");
        }
        Rng rng(seed);
        const auto iso = random_isometry(n2 * count, n1, rng);
        for (std::size_t k = 0; k < count; ++k)
            ops.push_back(iso.block(k, 0, n2, n1));
    } else {
        throw Error(ErrorKind::invalid_argument,
                    "unknown channel name '" + std::string(name) + "'; valid names: " + zoo_names_joined());
    }
    return KrausSet(n1, n2, std::move(ops));
}

inline KrausSet zoo_channel(std::string_view name, const std::vector<double>& params, std::size_t n) {
    return zoo_channel(name, params, n, n);
}

}  // namespace choiforge
