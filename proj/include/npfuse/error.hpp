#pragma once

#include <stdexcept>
#include <string>

namespace npfuse {

// Error taxonomy. The CLI maps InputError/DecodeError to exit code 2 and
// ModelError/ProtocolError to exit code 3.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid argument, out-of-range index or time, malformed configuration.
class InputError : public Error {
 public:
  using Error::Error;
};

/// An intensity model violated its declared bounds or positivity.
class ModelError : public Error {
 public:
  using Error::Error;
};

/// Fusion received the wrong set of reports (duplicate, missing, mismatched T).
class ProtocolError : public Error {
 public:
  using Error::Error;
};

/// A wire line or serialized path could not be parsed.
class DecodeError : public Error {
 public:
  using Error::Error;
};

}  // namespace npfuse
