#pragma once

#include <stdexcept>
#include <string>

namespace facies_qc {

class error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed grid or point file.
class parse_error : public error {
 public:
  using error::error;
};

/// A value violates a documented invariant or precondition.
class invalid_argument : public error {
 public:
  using error::error;
};

class optimizer_error : public error {
 public:
  using error::error;
};

/// The external generator broke the wire protocol, timed out, or died.
class protocol_error : public error {
 public:
  using error::error;
};

}  // namespace facies_qc
