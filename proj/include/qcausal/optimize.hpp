#pragma once

#include <functional>
#include <vector>

namespace qcausal {

struct MinimizeResult {
  std::vector<double> x;
  double value = 0.0;
  int iterations = 0;
};

/// Nelder-Mead minimization with standard coefficients (reflection 1,
/// expansion 2, contraction 1/2, shrink 1/2). Stops when the simplex
/// diameter (max vertex distance from the best vertex) drops below `tol`
/// or after `max_iterations`.
MinimizeResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                           std::vector<double> start, double step, int max_iterations, double tol);

struct ScalarMinimum {
  double x;
  double value;
};

/// Golden-section search for a minimum of f on [lo, hi], to bracket width `tol`.
ScalarMinimum golden_section(const std::function<double(double)>& f, double lo, double hi, double tol);

}  // namespace qcausal
