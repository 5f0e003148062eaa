#pragma once

#include <stdexcept>
#include <string>

namespace leo {

// Base for every failure this library reports on purpose. kind() is a stable
// machine-readable tag; what() carries the human-readable detail.
class error : public std::runtime_error {
 public:
  explicit error(const std::string& msg) : std::runtime_error(msg) {}
  virtual const char* kind() const noexcept { return "error"; }
};

#define LEO_DEFINE_ERROR(type_name, tag)                          \
  class type_name : public error {                                \
   public:                                                        \
    explicit type_name(const std::string& msg) : error(msg) {}    \
    const char* kind() const noexcept override { return tag; }    \
  }

// An argument left the documented domain of an operation.
LEO_DEFINE_ERROR(domain_error, "DomainError");
// Antenna beam half-angle so wide the main-lobe cone misses the ground sphere.
LEO_DEFINE_ERROR(beam_misses_earth, "BeamMissesEarth");
// Conditioning event has probability zero (e.g. main-lobe cap degenerate).
LEO_DEFINE_ERROR(degenerate_conditioning, "DegenerateConditioning");
// A truncated series hit its term cap before meeting the tolerance.
LEO_DEFINE_ERROR(convergence_not_reached, "ConvergenceNotReached");
// Adaptive quadrature exhausted its subdivision budget above tolerance.
LEO_DEFINE_ERROR(quadrature_failure, "QuadratureFailure");
// Alternating closed form lost more significant decades than allowed.
LEO_DEFINE_ERROR(cancellation_overflow, "CancellationOverflow");
// Visibility target unreachable at any admissible elevation mask.
LEO_DEFINE_ERROR(infeasible_visibility, "InfeasibleVisibility");
// Outage target unreachable at any admissible rate.
LEO_DEFINE_ERROR(infeasible_rate, "InfeasibleRate");
// Optimizer iteration cap hit before the stopping rule fired.
LEO_DEFINE_ERROR(iteration_cap_reached, "IterationCapReached");
// Exhaustive search found no grid cell satisfying all constraints.
LEO_DEFINE_ERROR(no_feasible_point, "NoFeasiblePoint");
// Config/CLI text could not be parsed (message carries the line).
LEO_DEFINE_ERROR(parse_error, "ParseError");
// Parsed fine but violates a documented constraint (message carries the key).
LEO_DEFINE_ERROR(validation_error, "ValidationError");

#undef LEO_DEFINE_ERROR

}  // namespace leo
