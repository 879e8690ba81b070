#pragma once

#include <stdexcept>
#include <string>

namespace slowlight {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Non-finite or out-of-range inputs.
class InvalidParameterError : public Error {
 public:
  using Error::Error;
};

// A model expression is evaluated at a point where it is singular
// (zero denominator with no finite limit).
class SingularModelError : public Error {
 public:
  using Error::Error;
};

// Perfect extinction t = 1 + r = 0: the transfer matrix of the scatterer
// does not exist. Regularize with nonzero Gamma_nr or move the grid.
class SingularScattererError : public Error {
 public:
  SingularScattererError(const std::string& what, std::size_t qubit_index, double omega)
      : Error(what), qubit_index(qubit_index), omega(omega) {}
  std::size_t qubit_index;
  double omega;
};

// Frequency-grid shape, resolution, or stencil problems.
class GridError : public Error {
 public:
  using Error::Error;
};

// Pulse bandwidth not covered by the supplied spectrum.
class CoverageError : public Error {
 public:
  using Error::Error;
};

// Expected spectral structure (window, dip pair) not present.
class StructureNotFoundError : public Error {
 public:
  using Error::Error;
};

// Invalid experiment configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace slowlight
