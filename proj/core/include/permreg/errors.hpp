#ifndef PERMREG_ERRORS_HPP
#define PERMREG_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace permreg {

// Bad arguments: shape mismatches, non-finite entries, out-of-range options.
class InvalidInputError : public std::invalid_argument {
public:
    explicit InvalidInputError(const std::string& what) : std::invalid_argument(what) {}
};

// Linear-algebra failure. `pivot` is the zero-based index at which a
// factorization broke down (or npos when not applicable).
class NumericalError : public std::runtime_error {
public:
    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

    explicit NumericalError(const std::string& what, std::size_t pivot = npos)
        : std::runtime_error(what), pivot_(pivot) {}

    std::size_t pivot() const noexcept { return pivot_; }

private:
    std::size_t pivot_;
};

// Data that cannot be standardized (constant column / constant response).
// `column` is the offending zero-based feature index, or npos for the response.
class DegenerateDataError : public std::runtime_error {
public:
    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

    explicit DegenerateDataError(const std::string& what, std::size_t column = npos)
        : std::runtime_error(what), column_(column) {}

    std::size_t column() const noexcept { return column_; }

private:
    std::size_t column_;
};

// A caller handed in data that violates a documented contract
// (e.g. a response that is not standardized).
class ContractViolationError : public std::logic_error {
public:
    explicit ContractViolationError(const std::string& what) : std::logic_error(what) {}
};

// The criterion is not differentiable at the requested point (a residual
// norm or an absolute-value argument sits on a kink). The optimizer reacts
// by perturbing the parameters and retrying.
class NondifferentiablePointError : public std::runtime_error {
public:
    explicit NondifferentiablePointError(const std::string& what) : std::runtime_error(what) {}
};

// Optimization produced non-finite values and could not recover.
class DivergedError : public std::runtime_error {
public:
    explicit DivergedError(const std::string& what) : std::runtime_error(what) {}
};

// CSV parsing failure; `row` and `column` are one-based file coordinates
// (row counts the header line as line 1).
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, std::size_t row, std::size_t column)
        : std::runtime_error(what), row_(row), column_(column) {}

    std::size_t row() const noexcept { return row_; }
    std::size_t column() const noexcept { return column_; }

private:
    std::size_t row_;
    std::size_t column_;
};

}  // namespace permreg

#endif  // PERMREG_ERRORS_HPP
