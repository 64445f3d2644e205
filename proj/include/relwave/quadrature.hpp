#pragma once

#include <functional>
#include <vector>

namespace relwave {

/// Gauss–Legendre nodes and weights on [-1, 1].
struct GaussLegendreRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Computes the n-point rule by Newton iteration on P_n. Rules are cached,
/// so repeated calls with the same n are cheap and thread-safe.
const GaussLegendreRule& gauss_legendre(int n);

/// Fixed-order Gauss–Legendre integral of f over [a, b].
double integrate_fixed(const std::function<double(double)>& f, double a, double b, int n);

/// Composite Gauss–Legendre: [a, b] split into `panels` equal pieces.
double integrate_composite(const std::function<double(double)>& f, double a, double b,
                           int panels, int n = 32);

struct AdaptiveResult {
  double value = 0.0;
  int points = 0;
  bool converged = false;
};

/// Starts at 64 points and doubles until two successive values agree to
/// `tol` (absolute + relative) or `max_points` is reached. Intervals longer
/// than `panel_length` are split into panels first.
AdaptiveResult integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                                  double tol = 1e-12, int max_points = 4096,
                                  double panel_length = 2.0);

}  // namespace relwave
