#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace insulate {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid mesh input: duplicate vertices, non-manifold sides, missing labels, inverted elements.
class MeshError : public Error {
 public:
  using Error::Error;
};

// A candidate violates a constraint that makes the energy +inf (or -inf for the dual).
class InadmissibleError : public Error {
 public:
  using Error::Error;
};

class SingularMatrixError : public Error {
 public:
  SingularMatrixError(const std::string& what, std::size_t pivot)
      : Error(what), pivot_(pivot) {}
  std::size_t pivot() const { return pivot_; }

 private:
  std::size_t pivot_;
};

class JumpViolationError : public Error {
 public:
  JumpViolationError(const std::string& what, std::size_t side, double jump)
      : Error(what), side_(side), jump_(jump) {}
  std::size_t side() const { return side_; }
  double jump() const { return jump_; }

 private:
  std::size_t side_;
  double jump_;
};

class CompatibilityError : public Error {
 public:
  CompatibilityError(const std::string& what, double residual)
      : Error(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

class DegenerateTraceError : public Error {
 public:
  using Error::Error;
};

// Bad configuration or command line input.
class InputError : public Error {
 public:
  using Error::Error;
};

}  // namespace insulate
