#pragma once

#include <stdexcept>
#include <string>

namespace gapf {

/// Base of the solver's terminal signals. Both carry the offending scalar
/// (a radius or a curvature) for the event record.
class FlowError : public std::runtime_error {
 public:
  FlowError(const std::string& what, double detail) : std::runtime_error(what), detail_(detail) {}
  double detail() const { return detail_; }

 private:
  double detail_;
};

/// A radius fell to the floor: the curve is no longer resolvable as star-shaped about O.
class StarShapeLost : public FlowError {
 public:
  using FlowError::FlowError;
};

/// Curvature above the ceiling or non-finite state.
class BlowUp : public FlowError {
 public:
  using FlowError::FlowError;
};

}  // namespace gapf
