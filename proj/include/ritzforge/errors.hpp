#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ritzforge {

/// Base class for all errors thrown by this library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Shape or structure of a matrix argument is wrong (non-square,
/// non-Hessenberg, non-triangular, dimension mismatch).
class StructuralError : public Error {
public:
    using Error::Error;
};

/// A scalar or container argument violates a precondition.
class ArgumentError : public Error {
public:
    using Error::Error;
};

/// The eigenvalue iteration failed to deflate within its budget.
class ConvergenceError : public Error {
public:
    using Error::Error;
};

/// A linear solve met a pivot below the singularity threshold.
class SingularSystemError : public Error {
public:
    SingularSystemError(const std::string& msg, std::size_t pivot_index)
        : Error(msg), pivot_index_(pivot_index) {}
    /// 1-based index of the offending pivot.
    std::size_t pivot_index() const noexcept { return pivot_index_; }

private:
    std::size_t pivot_index_;
};

/// A triangular matrix has a (near-)zero diagonal entry.
class SingularTriangularError : public Error {
public:
    SingularTriangularError(const std::string& msg, std::size_t index)
        : Error(msg), index_(index) {}
    /// 1-based index of the offending diagonal entry.
    std::size_t index() const noexcept { return index_; }

private:
    std::size_t index_;
};

/// The first-row data would make the Krylov process terminate before the
/// final step (a residual norm hits zero early).
class PrematureTerminationError : public Error {
public:
    PrematureTerminationError(const std::string& msg, std::size_t step)
        : Error(msg), step_(step) {}
    std::size_t step() const noexcept { return step_; }

private:
    std::size_t step_;
};

/// A prescription failed admissibility validation where a valid one is
/// required.
class AdmissibilityError : public Error {
public:
    using Error::Error;
};

/// The step-k inverse eigenvalue system is singular for the prescribed
/// values; the prescription lies in the degenerate set.
class DegeneratePrescriptionError : public Error {
public:
    DegeneratePrescriptionError(const std::string& msg, std::size_t step)
        : Error(msg), step_(step) {}
    std::size_t step() const noexcept { return step_; }

private:
    std::size_t step_;
};

/// A constructed triangular factor has a diagonal entry too close to zero.
class SingularRError : public Error {
public:
    SingularRError(const std::string& msg, std::size_t step)
        : Error(msg), step_(step) {}
    std::size_t step() const noexcept { return step_; }

private:
    std::size_t step_;
};

/// Two redundant computations of the same quantity disagree.
class InternalConsistencyError : public Error {
public:
    using Error::Error;
};

/// A file could not be read or written.
class IoError : public Error {
public:
    using Error::Error;
};

/// A matrix file violates the expected format.
class FormatError : public Error {
public:
    FormatError(const std::string& msg, std::size_t line)
        : Error(msg), line_(line) {}
    /// 1-based line number of the offending input line.
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// A JSON document violates the prescription schema.
class ParseError : public Error {
public:
    ParseError(const std::string& msg, std::string path)
        : Error(msg + " (at " + path + ")"), path_(std::move(path)) {}
    /// JSON pointer-style path of the offending element.
    const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

} // namespace ritzforge
