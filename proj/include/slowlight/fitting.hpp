#pragma once

#include <functional>
#include <string>
#include <vector>

#include "slowlight/errors.hpp"

namespace slowlight {

struct FitReport {
  std::vector<double> parameters;
  double rss = 0.0;            // residual sum of squares at the solution
  double initial_rss = 0.0;
  int iterations = 0;
  bool converged = false;
  std::string message;
};

class FitFailureError : public Error {
 public:
  FitFailureError(const std::string& what, FitReport best_so_far)
      : Error(what), best_so_far(std::move(best_so_far)) {}
  FitReport best_so_far;  // state when the fit gave up
};

struct FitOptions {
  int max_iterations = 200;
  double relative_step_tolerance = 1e-10;
  double initial_damping = 1e-3;
  double jacobian_step = 1e-7;  // relative finite-difference step
};

// residual_fn fills r (size m) from parameters x (size p).
using ResidualFn = std::function<void(const std::vector<double>& x, std::vector<double>& r)>;

// Damped Gauss-Newton (Levenberg style) for small smooth problems.
// Jacobian by forward differences. Throws FitFailureError when the iteration
// budget runs out without meeting the step tolerance.
FitReport fit_least_squares(const ResidualFn& residual, std::size_t residual_size,
                            std::vector<double> initial, const FitOptions& options = {});

// As above but returns the best-so-far report instead of throwing.
FitReport fit_least_squares_noexcept(const ResidualFn& residual, std::size_t residual_size,
                                     std::vector<double> initial, const FitOptions& options = {});

}  // namespace slowlight
