#pragma once

#include <stdexcept>
#include <string>

namespace choiforge {

// Broad failure categories. The CLI maps these onto process exit codes.
enum class ErrorKind {
    dimension_mismatch,
    not_hermitian,
    not_completely_positive,
    invalid_argument,
    parse,
    config,
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

/// Raised when a would-be Choi matrix has an eigenvalue below the admission tolerance.
class NotCompletelyPositive : public Error {
public:
    NotCompletelyPositive(const std::string& what, double min_eigenvalue)
        : Error(ErrorKind::not_completely_positive, what), min_eigenvalue_(min_eigenvalue) {}

    double min_eigenvalue() const noexcept { return min_eigenvalue_; }

private:
    double min_eigenvalue_;
};

}  // namespace choiforge
