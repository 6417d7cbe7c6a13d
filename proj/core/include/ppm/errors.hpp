#pragma once

#include <stdexcept>
#include <string>

namespace ppm {

// Error categories map onto process exit codes: validation -> 2,
// solver -> 3, io -> 4.
enum class ErrorKind { Validation, Solver, Io };

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, std::string what) : std::runtime_error(std::move(what)), kind_(kind) {}
    ErrorKind kind() const { return kind_; }

private:
    ErrorKind kind_;
};

struct ParseError : Error {
    explicit ParseError(const std::string& w) : Error(ErrorKind::Io, "parse error: " + w) {}
};
struct IoError : Error {
    explicit IoError(const std::string& w) : Error(ErrorKind::Io, "io error: " + w) {}
};
struct NonManifoldError : Error {
    explicit NonManifoldError(const std::string& w) : Error(ErrorKind::Validation, "non-manifold mesh: " + w) {}
};
struct OrientationError : Error {
    explicit OrientationError(const std::string& w) : Error(ErrorKind::Validation, "inconsistent orientation: " + w) {}
};
struct DecimationFailure : Error {
    explicit DecimationFailure(const std::string& w) : Error(ErrorKind::Validation, "decimation failure: " + w) {}
};
struct DisconnectedMeshError : Error {
    explicit DisconnectedMeshError(const std::string& w) : Error(ErrorKind::Validation, "disconnected mesh: " + w) {}
};
struct DimensionMismatch : Error {
    explicit DimensionMismatch(const std::string& w) : Error(ErrorKind::Validation, "dimension mismatch: " + w) {}
};
struct ZeroFeatureVector : Error {
    explicit ZeroFeatureVector(const std::string& w) : Error(ErrorKind::Validation, "zero feature vector: " + w) {}
};
struct RangeError : Error {
    explicit RangeError(const std::string& w) : Error(ErrorKind::Validation, "value out of range: " + w) {}
};
struct LengthMismatch : Error {
    explicit LengthMismatch(const std::string& w) : Error(ErrorKind::Validation, "length mismatch: " + w) {}
};
struct IndexOutOfRange : Error {
    explicit IndexOutOfRange(const std::string& w) : Error(ErrorKind::Validation, "index out of range: " + w) {}
};
struct BudgetExceeded : Error {
    explicit BudgetExceeded(const std::string& w) : Error(ErrorKind::Solver, "exact-solver budget exceeded: " + w) {}
};
struct SolverLaunchError : Error {
    explicit SolverLaunchError(const std::string& w) : Error(ErrorKind::Solver, "solver launch failed: " + w) {}
};
struct SolutionParseError : Error {
    explicit SolutionParseError(const std::string& w) : Error(ErrorKind::Solver, "solution parse failed: " + w) {}
};
struct ValidationError : Error {
    explicit ValidationError(const std::string& w) : Error(ErrorKind::Validation, "validation failed: " + w) {}
};
struct InconsistentSolution : Error {
    explicit InconsistentSolution(const std::string& w) : Error(ErrorKind::Solver, "inconsistent solution: " + w) {}
};
struct DegenerateAlignment : Error {
    explicit DegenerateAlignment(const std::string& w) : Error(ErrorKind::Validation, "degenerate alignment: " + w) {}
};
struct EmptyOverlap : Error {
    explicit EmptyOverlap(const std::string& w) : Error(ErrorKind::Validation, "empty overlap: " + w) {}
};
struct DegenerateCut : Error {
    explicit DegenerateCut(const std::string& w) : Error(ErrorKind::Validation, "degenerate cut: " + w) {}
};
struct EmptyCandidateSet : Error {
    explicit EmptyCandidateSet(const std::string& w) : Error(ErrorKind::Validation, "empty candidate set: " + w) {}
};

}  // namespace ppm
