#pragma once

#include <stdexcept>
#include <string>

namespace hdgqoi {

/// Malformed input: bad mesh, bad configuration, unknown problem id.
class InputError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A local or global linear system could not be solved.
class SolverError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A data function returned a non-finite value at an evaluation point.
class EvaluationError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// The requested construction is outside what is implemented.
class UnsupportedError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

} // namespace hdgqoi
