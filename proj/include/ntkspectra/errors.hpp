#pragma once

#include <stdexcept>
#include <string>

namespace ntkspectra {

struct NonFiniteError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NoConvergenceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NotSPDError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NotUnitNormError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DomainError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DegenerateInputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ShapeMismatchError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IndexError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DivergedError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InsufficientPointsError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NonPositiveEigenvalueError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SingularKernelError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ParseError : std::runtime_error {
    ParseError(const std::string& msg, long line, long column)
        : std::runtime_error(msg + " (line " + std::to_string(line) +
                             ", column " + std::to_string(column) + ")"),
          line(line), column(column) {}
    long line;
    long column;
};

struct ZeroVectorRowError : std::runtime_error {
    ZeroVectorRowError(const std::string& msg, long row)
        : std::runtime_error(msg + " (row " + std::to_string(row) + ")"), row(row) {}
    long row;
};

struct InvalidSpecError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InvalidSizeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct MissingArtifactError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IOError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace ntkspectra
