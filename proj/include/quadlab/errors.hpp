#pragma once

#include <stdexcept>
#include <string>

namespace quadlab {

// Base of every error raised by the library. Callers that only care about
// "something went wrong" catch this; tests assert on the concrete type.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed network or robot specification.
class SpecError : public Error {
 public:
  using Error::Error;
};

// Bad argument: shape mismatch, out-of-domain value, non-finite input.
class InputError : public Error {
 public:
  using Error::Error;
};

// Refused numerical update (NaN/inf gradients).
class NumericalError : public Error {
 public:
  using Error::Error;
};

// Simulator produced a non-finite state.
class SimulationDiverged : public Error {
 public:
  using Error::Error;
};

// Call made in the wrong lifecycle phase (e.g. step after done).
class ProtocolError : public Error {
 public:
  using Error::Error;
};

// Operation not possible in the current container state (e.g. empty buffer).
class StateError : public Error {
 public:
  using Error::Error;
};

// Learner update diverged.
class TrainingError : public Error {
 public:
  using Error::Error;
};

// Checkpoint / terrain / config file could not be read.
class LoadError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace quadlab
