#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace aorta {

enum class ErrorKind {
  DegeneratePolyline,
  FrameTransport,
  EmptyInput,
  InvalidRadius,
  InconsistentSections,
  CurveMissesMesh,
  NonSimpleHole,
  DegenerateElement,
  Divergence,
  OrphanVertex,
  SelfIntersection,
  SingularSystem,
  UnknownSet,
  SolverFailure,
  InvalidTensor,
  InvalidBreakpoints,
  InvalidGroup,
  CorruptMask,
  NoIsosurface,
  DegenerateSurface,
  Parse,
  InvalidArgument,
  Io,
};

const char* to_string(ErrorKind kind);

/// True for failures of an iterative numerical method (divergence, solver
/// stagnation); everything else is a problem with the input data.
bool is_numerical(ErrorKind kind);

/// Library-wide exception. `indices()` carries offending element, vertex or
/// iteration ids when the failure can be pinned to specific items.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message, std::vector<std::size_t> indices = {});

  ErrorKind kind() const noexcept { return kind_; }
  const std::vector<std::size_t>& indices() const noexcept { return indices_; }

 private:
  ErrorKind kind_;
  std::vector<std::size_t> indices_;
};

/// Conjugate-gradient failure; keeps the relative residual per iteration.
class SolverError : public Error {
 public:
  SolverError(const std::string& message, std::vector<double> residual_history);

  const std::vector<double>& residual_history() const noexcept { return history_; }

 private:
  std::vector<double> history_;
};

}  // namespace aorta
