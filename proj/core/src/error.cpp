#include "aortamesh/error.hpp"

#include <utility>

namespace aorta {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::DegeneratePolyline: return "degenerate-polyline";
    case ErrorKind::FrameTransport: return "frame-transport";
    case ErrorKind::EmptyInput: return "empty-input";
    case ErrorKind::InvalidRadius: return "invalid-radius";
    case ErrorKind::InconsistentSections: return "inconsistent-sections";
    case ErrorKind::CurveMissesMesh: return "curve-misses-mesh";
    case ErrorKind::NonSimpleHole: return "non-simple-hole";
    case ErrorKind::DegenerateElement: return "degenerate-element";
    case ErrorKind::Divergence: return "divergence";
    case ErrorKind::OrphanVertex: return "orphan-vertex";
    case ErrorKind::SelfIntersection: return "self-intersection";
    case ErrorKind::SingularSystem: return "singular-system";
    case ErrorKind::UnknownSet: return "unknown-set";
    case ErrorKind::SolverFailure: return "solver-failure";
    case ErrorKind::InvalidTensor: return "invalid-tensor";
    case ErrorKind::InvalidBreakpoints: return "invalid-breakpoints";
    case ErrorKind::InvalidGroup: return "invalid-group";
    case ErrorKind::CorruptMask: return "corrupt-mask";
    case ErrorKind::NoIsosurface: return "no-isosurface";
    case ErrorKind::DegenerateSurface: return "degenerate-surface";
    case ErrorKind::Parse: return "parse";
    case ErrorKind::InvalidArgument: return "invalid-argument";
    case ErrorKind::Io: return "io";
  }
  return "unknown";
}

bool is_numerical(ErrorKind kind) {
  return kind == ErrorKind::Divergence || kind == ErrorKind::SolverFailure;
}

Error::Error(ErrorKind kind, const std::string& message, std::vector<std::size_t> indices)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message),
      kind_(kind),
      indices_(std::move(indices)) {}

SolverError::SolverError(const std::string& message, std::vector<double> residual_history)
    : Error(ErrorKind::SolverFailure, message), history_(std::move(residual_history)) {}

}  // namespace aorta
