#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace diagstab {

/// Malformed or invalid user input (files, documents, CLI arguments).
class InputError : public std::runtime_error {
 public:
  explicit InputError(const std::string& what) : std::runtime_error(what) {}
};

/// An iterative method failed to reach the requested tolerance. Carries the
/// certified enclosure known at the point of failure; never thrown with a
/// silently wrong value.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double lower, double upper, long iterations)
      : std::runtime_error(what), lower(lower), upper(upper), iterations(iterations) {}
  double lower;
  double upper;
  long iterations;
};

/// Row-selection (or index-combination) enumeration would exceed the cap.
class EnumerationCapError : public std::runtime_error {
 public:
  EnumerationCapError(const std::string& what, std::size_t cap, std::size_t requested)
      : std::runtime_error(what), cap(cap), requested(requested) {}
  std::size_t cap;
  std::size_t requested;
};

/// The LP solver gave up (iteration limit or detected unboundedness where the
/// encoding forbids it).
class LpFailure : public std::runtime_error {
 public:
  explicit LpFailure(const std::string& what) : std::runtime_error(what) {}
};

/// A witness handed to certificate synthesis does not satisfy the inequality
/// system it claims to solve, or the scaling product is not below one.
class WitnessError : public std::runtime_error {
 public:
  explicit WitnessError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace diagstab
