#pragma once

#include <stdexcept>
#include <string>

namespace phdae {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Dimensions of two operands do not agree.
class DimensionError : public Error {
public:
    using Error::Error;
};

/// A model or transformation violates a structural requirement.
class StructureError : public Error {
public:
    using Error::Error;
};

/// Malformed model or config file. Carries the offending line and block.
class ParseError : public Error {
public:
    ParseError(int line, std::string block, const std::string& what)
        : Error("line " + std::to_string(line) + (block.empty() ? "" : " (block " + block + ")") +
                ": " + what),
          line_(line),
          block_(std::move(block)) {}

    int line() const noexcept { return line_; }
    const std::string& block() const noexcept { return block_; }

private:
    int line_;
    std::string block_;
};

/// Newton iteration failed to converge or hit a singular iteration matrix.
class SolverError : public Error {
public:
    SolverError(const std::string& what, double residual, int iterations)
        : Error(what), residual_(residual), iterations_(iterations) {}

    double residual() const noexcept { return residual_; }
    int iterations() const noexcept { return iterations_; }

private:
    double residual_;
    int iterations_;
};

/// A time step failed; `step_index` counts from zero.
class IntegrationError : public Error {
public:
    IntegrationError(std::size_t step_index, double t, const std::string& what)
        : Error("step " + std::to_string(step_index) + " at t=" + std::to_string(t) + ": " + what),
          step_index_(step_index),
          t_(t) {}

    std::size_t step_index() const noexcept { return step_index_; }
    double time() const noexcept { return t_; }

private:
    std::size_t step_index_;
    double t_;
};

}  // namespace phdae
