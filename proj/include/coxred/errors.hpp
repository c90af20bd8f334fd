#pragma once

#include <cstddef>
#include <cstdio>
#include <stdexcept>
#include <string>

namespace coxred {

/// Failure classes. The CLI maps these onto its exit codes.
enum class ErrorKind { Config, Data, Numerical, Budget };

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

/// Numerical rank of a design block fell below its column count.
class RankDeficient : public Error {
public:
    RankDeficient(std::size_t rank, std::size_t columns)
        : Error(ErrorKind::Numerical, "rank deficient design: rank " + std::to_string(rank) +
                                          " < " + std::to_string(columns) + " columns"),
          rank_(rank), columns_(columns) {}
    std::size_t rank() const noexcept { return rank_; }
    std::size_t columns() const noexcept { return columns_; }

private:
    std::size_t rank_;
    std::size_t columns_;
};

class ZeroVector : public Error {
public:
    explicit ZeroVector(const std::string& where)
        : Error(ErrorKind::Numerical, "zero-norm vector in " + where) {}
};

class DegenerateResidual : public Error {
public:
    DegenerateResidual() : Error(ErrorKind::Numerical, "residual scale estimate is zero (perfect fit)") {}
};

class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& what, double gap)
        : Error(ErrorKind::Numerical, what + " (KKT gap " + format_gap(gap) + ")"), gap_(gap) {}
    double gap() const noexcept { return gap_; }

private:
    static std::string format_gap(double gap) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.3e", gap);
        return buf;
    }
    double gap_;
};

/// Argument outside the documented domain of an operation.
class DomainError : public Error {
public:
    explicit DomainError(const std::string& what) : Error(ErrorKind::Config, what) {}
};

class OverlappingSets : public Error {
public:
    OverlappingSets() : Error(ErrorKind::Config, "index sets overlap") {}
};

class NotNested : public Error {
public:
    NotNested() : Error(ErrorKind::Config, "submodel columns are not among the comprehensive model columns") {}
};

class Overflow : public Error {
public:
    Overflow(std::size_t count, std::size_t capacity)
        : Error(ErrorKind::Config, std::to_string(count) + " indices exceed " + std::to_string(capacity) +
                                       " cells of the arrangement") {}
};

class TooSmall : public Error {
public:
    explicit TooSmall(const std::string& what) : Error(ErrorKind::Config, what) {}
};

class BudgetExceeded : public Error {
public:
    BudgetExceeded(std::size_t required, std::size_t budget)
        : Error(ErrorKind::Budget, "model enumeration needs " + std::to_string(required) +
                                       " tests, budget is " + std::to_string(budget)),
          required_(required) {}
    std::size_t required() const noexcept { return required_; }

private:
    std::size_t required_;
};

class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t row, std::size_t column)
        : Error(ErrorKind::Data, what + " at row " + std::to_string(row) + ", column " + std::to_string(column)),
          row_(row), column_(column) {}
    std::size_t row() const noexcept { return row_; }
    std::size_t column() const noexcept { return column_; }

private:
    std::size_t row_;
    std::size_t column_;
};

class DataError : public Error {
public:
    explicit DataError(const std::string& what) : Error(ErrorKind::Data, what) {}
};

class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& what) : Error(ErrorKind::Config, what) {}
};

}  // namespace coxred
