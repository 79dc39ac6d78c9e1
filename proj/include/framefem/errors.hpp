#pragma once

#include <stdexcept>
#include <string>

namespace framefem {

/// Base class for all errors raised by this library.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Invalid input that a caller could have checked (bad indices, bad config).
class UsageError : public Error {
public:
  using Error::Error;
};

/// A numerical procedure failed to produce a trustworthy result.
class NumericalError : public Error {
public:
  using Error::Error;
};

// mesh
struct DegenerateCell : UsageError { using UsageError::UsageError; };
struct NonConforming : UsageError { using UsageError::UsageError; };
struct IndexOutOfRange : UsageError { using UsageError::UsageError; };
struct UnsupportedKind : UsageError { using UsageError::UsageError; };
struct UnknownSubsimplex : UsageError { using UsageError::UsageError; };
struct PointOutsideMesh : UsageError { using UsageError::UsageError; };

// polynomial families and quadrature
struct InvalidParameters : UsageError { using UsageError::UsageError; };
struct InvalidDimensions : UsageError { using UsageError::UsageError; };
struct PointOutsideSimplex : UsageError { using UsageError::UsageError; };
struct UnsupportedDegree : UsageError { using UsageError::UsageError; };
struct DegreeCapExceeded : UsageError { using UsageError::UsageError; };

// frame space
struct InvalidIndex : UsageError { using UsageError::UsageError; };
struct CellMismatch : UsageError { using UsageError::UsageError; };
struct DegenerateProbe : UsageError { using UsageError::UsageError; };
struct UnsupportedMesh : UsageError { using UsageError::UsageError; };

// assembly
struct QuadratureTooWeak : UsageError { using UsageError::UsageError; };
struct DimensionMismatch : UsageError { using UsageError::UsageError; };

// spectral
struct NoConvergence : NumericalError { using NumericalError::NumericalError; };
struct GapTooSmall : NumericalError { using NumericalError::NumericalError; };
struct MNotDefinite : NumericalError { using NumericalError::NumericalError; };

// solver
struct MaxIterations : NumericalError { using NumericalError::NumericalError; };
struct InconsistentRHS : NumericalError { using NumericalError::NumericalError; };
struct SingularLocalBlock : NumericalError { using NumericalError::NumericalError; };

} // namespace framefem
