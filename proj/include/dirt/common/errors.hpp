#pragma once

#include <stdexcept>
#include <string>

namespace dirt {

/// Failure categories. Each maps to one CLI exit code (see exit_code()).
enum class ErrorKind {
    bounds,      ///< index outside a tensor's dims
    domain,      ///< argument outside a function's domain
    numerical,   ///< rank deficiency, failed factorization, non-converged root
    evaluation,  ///< user callback returned a non-finite value
    degenerate,  ///< estimator cannot form a value (e.g. zero normalizer)
    resource,    ///< dense materialization above the configured cap
    budget,      ///< evaluation budget exhausted
    config       ///< invalid configuration or hyperparameters
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

struct BoundsError : Error {
    explicit BoundsError(const std::string& w) : Error(ErrorKind::bounds, w) {}
};
struct DomainError : Error {
    explicit DomainError(const std::string& w) : Error(ErrorKind::domain, w) {}
};
struct NumericalError : Error {
    explicit NumericalError(const std::string& w) : Error(ErrorKind::numerical, w) {}
};
struct EvaluationError : Error {
    explicit EvaluationError(const std::string& w) : Error(ErrorKind::evaluation, w) {}
};
struct DegenerateError : Error {
    explicit DegenerateError(const std::string& w) : Error(ErrorKind::degenerate, w) {}
};
struct ResourceError : Error {
    explicit ResourceError(const std::string& w) : Error(ErrorKind::resource, w) {}
};
struct BudgetError : Error {
    explicit BudgetError(const std::string& w) : Error(ErrorKind::budget, w) {}
};
struct ConfigError : Error {
    explicit ConfigError(const std::string& w) : Error(ErrorKind::config, w) {}
};

/// 2 for numerical-type failures, 3 for configuration, 4 for budget/resource.
int exit_code(ErrorKind kind) noexcept;
const char* to_string(ErrorKind kind) noexcept;

}  // namespace dirt
