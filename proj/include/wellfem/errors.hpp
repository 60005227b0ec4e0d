#pragma once

#include <stdexcept>
#include <string>

namespace wellfem {

struct InvalidArgument : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Geometric query could not be answered (e.g. point outside the mesh).
struct NotFound : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Unphysical parameter combination made a corrected coefficient blow up.
struct DegenerateCoefficient : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SolveFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace wellfem
