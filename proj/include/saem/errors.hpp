#pragma once

#include <stdexcept>
#include <string>

namespace saem {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A file could not be opened, read or written.
class IoError : public Error {
 public:
  using Error::Error;
};

/// Input mesh data is malformed or violates a TriMesh invariant.
class MeshError : public Error {
 public:
  using Error::Error;
};

/// A geometric quantity is degenerate (zero area, zero length, antipodal face, ...).
class GeometryError : public Error {
 public:
  using Error::Error;
};

/// The pinned stretch Laplacian could not be Cholesky-factorized.
class IndefinitePreconditioner : public Error {
 public:
  using Error::Error;
};

/// The line search could not find a step satisfying sufficient decrease.
class LineSearchError : public Error {
 public:
  using Error::Error;
};

/// Unrecoverable optimizer failure, e.g. a non-finite energy.
class SolverError : public Error {
 public:
  using Error::Error;
};

}  // namespace saem
