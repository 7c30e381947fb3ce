#pragma once

#include <stdexcept>
#include <string>

namespace neretin {

/// Precondition or schema violation in caller-supplied data.
class InvalidArgument : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// An enumeration would exceed its configured cap.
class CapExceeded : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A filtration schedule cannot be sparsified within its finite prefix.
class ScheduleError : public InvalidArgument {
public:
  using InvalidArgument::InvalidArgument;
};

/// An internal consistency check failed (a certificate did not verify).
class CheckFailed : public std::logic_error {
public:
  using std::logic_error::logic_error;
};

}  // namespace neretin
