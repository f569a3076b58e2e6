#pragma once

#include <stdexcept>
#include <string>

namespace torusflow {

/// Vector lengths disagree (weight vs generator, chart coords vs model dimension).
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Invalid model description: non-smooth or incomplete fan, colliding weights.
class ModelError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A point lies outside the domain of the requested chart, or is not a fixed point.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Numeric weight inference could not round to an integer lattice vector.
class InferenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The generator pairs to zero with a weight that matters for the requested operation.
class GenericityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operation not available for this model kind (e.g. flows on spheres).
class UnsupportedError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Two independent computations disagreed, or a trajectory left every chart.
class ConsistencyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// RK4 kept switching charts on consecutive steps.
class SwitchingThrashError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace torusflow
