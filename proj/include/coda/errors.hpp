#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace coda {

/// Base class for all errors raised by the toolkit.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

class NonPositivePartError : public Error {
public:
    NonPositivePartError(std::size_t index, double value)
        : Error("non-positive part at index " + std::to_string(index) +
                " (value " + std::to_string(value) + ")"),
          index(index), value(value) {}
    std::size_t index;
    double value;
};

class LabelMismatchError : public Error {
public:
    explicit LabelMismatchError(const std::string& what) : Error(what) {}
};

class BasisMismatchError : public Error {
public:
    explicit BasisMismatchError(const std::string& what) : Error(what) {}
};

class InsufficientRowsError : public Error {
public:
    explicit InsufficientRowsError(const std::string& what) : Error(what) {}
};

class DimensionError : public Error {
public:
    explicit DimensionError(const std::string& what) : Error(what) {}
};

class SingularSubsetError : public Error {
public:
    explicit SingularSubsetError(const std::string& what) : Error(what) {}
};

class DegenerateDesignError : public Error {
public:
    explicit DegenerateDesignError(const std::string& what) : Error(what) {}
};

class DegenerateDataError : public Error {
public:
    explicit DegenerateDataError(const std::string& what) : Error(what) {}
};

class PerplexityUnreachableError : public Error {
public:
    PerplexityUnreachableError(std::size_t point, const std::string& what)
        : Error("perplexity calibration failed for point " + std::to_string(point) + ": " + what),
          point(point) {}
    std::size_t point;
};

class ParseError : public Error {
public:
    ParseError(std::size_t row, std::size_t col, const std::string& what)
        : Error("parse error at row " + std::to_string(row) + ", column " +
                std::to_string(col) + ": " + what),
          row(row), col(col) {}
    std::size_t row;
    std::size_t col;
};

class NegativeValueError : public Error {
public:
    explicit NegativeValueError(const std::string& what) : Error(what) {}
};

class DuplicateEntityError : public Error {
public:
    explicit DuplicateEntityError(const std::string& what) : Error(what) {}
};

class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& what) : Error(what) {}
};

}  // namespace coda
