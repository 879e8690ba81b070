#include "slowlight/fitting.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace slowlight {

namespace {

double sum_sq(const std::vector<double>& r) {
  double s = 0.0;
  for (double v : r) s += v * v;
  return s;
}

// Solves A x = b for small dense symmetric-ish systems by Gaussian
// elimination with partial pivoting. Returns false when singular.
bool solve_dense(std::vector<double> a, std::vector<double> b, std::size_t n,
                 std::vector<double>& x) {
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t row = col + 1; row < n; ++row) {
      if (std::abs(a[row * n + col]) > std::abs(a[pivot * n + col])) pivot = row;
    }
    if (std::abs(a[pivot * n + col]) < 1e-300) return false;
    if (pivot != col) {
      for (std::size_t k = 0; k < n; ++k) std::swap(a[col * n + k], a[pivot * n + k]);
      std::swap(b[col], b[pivot]);
    }
    for (std::size_t row = col + 1; row < n; ++row) {
      const double f = a[row * n + col] / a[col * n + col];
      for (std::size_t k = col; k < n; ++k) a[row * n + k] -= f * a[col * n + k];
      b[row] -= f * b[col];
    }
  }
  x.assign(n, 0.0);
  for (std::size_t row = n; row-- > 0;) {
    double s = b[row];
    for (std::size_t k = row + 1; k < n; ++k) s -= a[row * n + k] * x[k];
    x[row] = s / a[row * n + row];
  }
  return true;
}

FitReport run_fit(const ResidualFn& residual, std::size_t m, std::vector<double> x,
                  const FitOptions& opt, bool& success) {
  const std::size_t p = x.size();
  std::vector<double> r(m), r_trial(m), jac(m * p);

  residual(x, r);
  double rss = sum_sq(r);

  FitReport report;
  report.initial_rss = rss;
  double lambda = opt.initial_damping;
  success = false;

  for (int iter = 0; iter < opt.max_iterations; ++iter) {
    report.iterations = iter + 1;

    // Forward-difference Jacobian.
    for (std::size_t j = 0; j < p; ++j) {
      const double h = opt.jacobian_step * std::max(1.0, std::abs(x[j]));
      std::vector<double> xj = x;
      xj[j] += h;
      residual(xj, r_trial);
      for (std::size_t i = 0; i < m; ++i) jac[i * p + j] = (r_trial[i] - r[i]) / h;
    }

    // Normal equations with Levenberg damping on the diagonal.
    std::vector<double> jtj(p * p, 0.0), jtr(p, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < p; ++j) {
        jtr[j] += jac[i * p + j] * r[i];
        for (std::size_t k = j; k < p; ++k) jtj[j * p + k] += jac[i * p + j] * jac[i * p + k];
      }
    }
    for (std::size_t j = 0; j < p; ++j) {
      for (std::size_t k = 0; k < j; ++k) jtj[j * p + k] = jtj[k * p + j];
    }

    bool stepped = false;
    for (int attempt = 0; attempt < 12; ++attempt) {
      std::vector<double> damped = jtj;
      for (std::size_t j = 0; j < p; ++j) {
        damped[j * p + j] += lambda * std::max(jtj[j * p + j], 1e-12);
      }
      std::vector<double> step;
      if (!solve_dense(damped, jtr, p, step)) {
        lambda *= 10.0;
        continue;
      }
      std::vector<double> x_trial = x;
      for (std::size_t j = 0; j < p; ++j) x_trial[j] -= step[j];
      residual(x_trial, r_trial);
      const double rss_trial = sum_sq(r_trial);
      if (std::isfinite(rss_trial) && rss_trial <= rss) {
        double step_norm = 0.0, x_norm = 0.0;
        for (std::size_t j = 0; j < p; ++j) {
          step_norm += step[j] * step[j];
          x_norm += x_trial[j] * x_trial[j];
        }
        x = std::move(x_trial);
        r = r_trial;
        rss = rss_trial;
        lambda = std::max(lambda * 0.3, 1e-12);
        stepped = true;
        if (step_norm <= opt.relative_step_tolerance * opt.relative_step_tolerance *
                             std::max(x_norm, 1e-30)) {
          success = true;
        }
        break;
      }
      lambda *= 10.0;
    }

    if (success) break;
    if (!stepped) {
      // No downhill step found at any damping: treat a stationary point as
      // converged, otherwise give up.
      success = rss <= report.initial_rss;
      break;
    }
  }

  report.parameters = std::move(x);
  report.rss = rss;
  report.converged = success;
  report.message = success ? "converged" : "iteration budget exhausted";
  return report;
}

}  // namespace

FitReport fit_least_squares_noexcept(const ResidualFn& residual, std::size_t residual_size,
                                     std::vector<double> initial, const FitOptions& options) {
  bool ok = false;
  return run_fit(residual, residual_size, std::move(initial), options, ok);
}

FitReport fit_least_squares(const ResidualFn& residual, std::size_t residual_size,
                            std::vector<double> initial, const FitOptions& options) {
  bool ok = false;
  FitReport report = run_fit(residual, residual_size, std::move(initial), options, ok);
  if (!ok) throw FitFailureError("least-squares fit did not converge: " + report.message, report);
  return report;
}

}  // namespace slowlight
