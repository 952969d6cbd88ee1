#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace graphconc {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidModel : public Error {
 public:
  using Error::Error;
};

class InvalidGraph : public Error {
 public:
  using Error::Error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class NoConvergence : public Error {
 public:
  NoConvergence(const std::string& what, int iterations)
      : Error(what + " (no convergence after " + std::to_string(iterations) + " iterations)"),
        iterations_(iterations) {}
  int iterations() const { return iterations_; }

 private:
  int iterations_;
};

class ZeroDegree : public Error {
 public:
  explicit ZeroDegree(std::int64_t vertex)
      : Error("vertex " + std::to_string(vertex) + " has zero degree; regularize first"),
        vertex_(vertex) {}
  std::int64_t vertex() const { return vertex_; }

 private:
  std::int64_t vertex_;
};

class SizeExceeded : public Error {
 public:
  using Error::Error;
};

class WidthExceeded : public Error {
 public:
  using Error::Error;
};

class EntryOutOfRange : public Error {
 public:
  using Error::Error;
};

class InvalidRates : public Error {
 public:
  using Error::Error;
};

class LengthMismatch : public Error {
 public:
  using Error::Error;
};

class ZeroGap : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace graphconc
