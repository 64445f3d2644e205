#include "relwave/curve_geometry.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "relwave/errors.hpp"
#include "relwave/quadrature.hpp"

namespace relwave {

CurveProfile::CurveProfile(std::string id, ScalarFn kappa, ScalarFn kappa_prime,
                           ScalarFn kappa_double_prime, Norms norms)
    : id_(std::move(id)),
      kappa_(std::move(kappa)),
      kappa_prime_(std::move(kappa_prime)),
      kappa_double_prime_(std::move(kappa_double_prime)),
      norms_(norms) {}

CurveProfile CurveProfile::with_samples(std::vector<double> s, std::vector<double> kappa) const {
  CurveProfile copy = *this;
  copy.samples_s_ = std::move(s);
  copy.samples_kappa_ = std::move(kappa);
  return copy;
}

CurveProfile zero_profile() {
  auto zero = [](double) { return 0.0; };
  CurveProfile::Norms norms;
  norms.decay_window = 0.0;
  return CurveProfile("zero", zero, zero, zero, norms);
}

CurveProfile gaussian_bump(double a, double sigma) {
  if (!(sigma > 0.0)) throw DomainError("gaussian_bump: sigma must be positive");
  const double s2 = sigma * sigma;
  auto k = [a, s2](double s) { return a * std::exp(-s * s / s2); };
  auto k1 = [a, s2](double s) { return -2.0 * a * s / s2 * std::exp(-s * s / s2); };
  auto k2 = [a, s2](double s) {
    return a * (4.0 * s * s / (s2 * s2) - 2.0 / s2) * std::exp(-s * s / s2);
  };
  CurveProfile::Norms norms;
  norms.sup_kappa = std::abs(a);
  norms.sup_kappa_prime = std::abs(a) * std::numbers::sqrt2 * std::exp(-0.5) / sigma;
  norms.sup_kappa_double_prime = 2.0 * std::abs(a) / s2;
  norms.l2_kappa_squared = a * a * sigma * std::sqrt(std::numbers::pi / 2.0);
  norms.tail_bound = 1e-8;
  norms.decay_window =
      std::abs(a) > norms.tail_bound ? sigma * std::sqrt(std::log(std::abs(a) / norms.tail_bound))
                                     : 0.0;
  std::ostringstream id;
  id << "gaussian_a" << a;
  if (sigma != 1.0) id << "_s" << sigma;
  return CurveProfile(id.str(), k, k1, k2, norms);
}

CurveProfile compact_bump(double a, double w) {
  if (!(w > 0.0)) throw DomainError("compact_bump: w must be positive");
  auto k = [a, w](double s) {
    const double x = s / w;
    if (std::abs(x) >= 1.0) return 0.0;
    const double y = 1.0 - x * x;
    return a * y * y * y;
  };
  auto k1 = [a, w](double s) {
    const double x = s / w;
    if (std::abs(x) >= 1.0) return 0.0;
    const double y = 1.0 - x * x;
    return -6.0 * a * x * y * y / w;
  };
  auto k2 = [a, w](double s) {
    const double x = s / w;
    if (std::abs(x) >= 1.0) return 0.0;
    return -6.0 * a / (w * w) * (1.0 - x * x) * (1.0 - 5.0 * x * x);
  };
  CurveProfile::Norms norms;
  norms.sup_kappa = std::abs(a);
  // max of x(1-x²)² sits at x = 1/√5
  norms.sup_kappa_prime = 6.0 * std::abs(a) / w * (16.0 / 25.0) / std::sqrt(5.0);
  norms.sup_kappa_double_prime = 6.0 * std::abs(a) / (w * w);
  // ∫_{-1}^{1} (1-x²)^6 dx = 2^13 (6!)² / 13!
  norms.l2_kappa_squared = a * a * w * (8192.0 * 518400.0 / 6227020800.0);
  norms.decay_window = w;
  norms.tail_bound = 0.0;
  std::ostringstream id;
  id << "compact_a" << a << "_w" << w;
  return CurveProfile(id.str(), k, k1, k2, norms);
}

CurveProfile constant_profile(double c) {
  auto k = [c](double) { return c; };
  auto zero = [](double) { return 0.0; };
  CurveProfile::Norms norms;
  norms.sup_kappa = std::abs(c);
  norms.l2_kappa_squared = c == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  norms.decay_window = std::numeric_limits<double>::infinity();
  std::ostringstream id;
  id << "constant_" << c;
  return CurveProfile(id.str(), k, zero, zero, norms);
}

namespace {

void check_uniform(const std::vector<double>& s, double rel_tol) {
  if (s.size() < 7) throw PreconditionError("need at least 7 samples on the s-grid");
  const double h = (s.back() - s.front()) / static_cast<double>(s.size() - 1);
  if (!(h > 0.0)) throw PreconditionError("s-grid must be increasing");
  for (std::size_t i = 1; i < s.size(); ++i) {
    if (std::abs((s[i] - s[i - 1]) - h) > rel_tol * std::max(1.0, std::abs(h)) + 1e-12 * h)
      throw PreconditionError("non-uniform s-grid");
  }
}

// Fourth-order central stencils in the interior, second order next to the ends.
std::vector<double> derivative(const std::vector<double>& f, double h) {
  const std::size_t n = f.size();
  std::vector<double> d(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (i >= 2 && i + 2 < n) {
      d[i] = (-f[i + 2] + 8.0 * f[i + 1] - 8.0 * f[i - 1] + f[i - 2]) / (12.0 * h);
    } else if (i >= 1 && i + 1 < n) {
      d[i] = (f[i + 1] - f[i - 1]) / (2.0 * h);
    } else if (i == 0) {
      d[i] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h);
    } else {
      d[i] = (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) / (2.0 * h);
    }
  }
  return d;
}

std::vector<double> second_derivative(const std::vector<double>& f, double h) {
  const std::size_t n = f.size();
  std::vector<double> d(n);
  const double h2 = h * h;
  for (std::size_t i = 0; i < n; ++i) {
    if (i >= 2 && i + 2 < n) {
      d[i] = (-f[i + 2] + 16.0 * f[i + 1] - 30.0 * f[i] + 16.0 * f[i - 1] - f[i - 2]) / (12.0 * h2);
    } else if (i >= 1 && i + 1 < n) {
      d[i] = (f[i + 1] - 2.0 * f[i] + f[i - 1]) / h2;
    } else if (i == 0) {
      d[i] = (2.0 * f[0] - 5.0 * f[1] + 4.0 * f[2] - f[3]) / h2;
    } else {
      d[i] = (2.0 * f[n - 1] - 5.0 * f[n - 2] + 4.0 * f[n - 3] - f[n - 4]) / h2;
    }
  }
  return d;
}

CurveProfile::ScalarFn linear_interpolant(std::shared_ptr<const std::vector<double>> s,
                                          std::shared_ptr<const std::vector<double>> f) {
  return [s, f](double x) {
    const auto& grid = *s;
    if (x < grid.front() || x > grid.back()) return 0.0;
    auto it = std::upper_bound(grid.begin(), grid.end(), x);
    std::size_t i = it == grid.end() ? grid.size() - 2
                                     : static_cast<std::size_t>(it - grid.begin()) - 1;
    i = std::min(i, grid.size() - 2);
    const double lam = (x - grid[i]) / (grid[i + 1] - grid[i]);
    return (1.0 - lam) * (*f)[i] + lam * (*f)[i + 1];
  };
}

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

CurveProfile sampled_profile(std::string id, const std::vector<double>& s,
                             const std::vector<double>& kappa) {
  if (s.size() != kappa.size()) throw PreconditionError("s and kappa sample counts differ");
  check_uniform(s, 1e-9);
  const double h = (s.back() - s.front()) / static_cast<double>(s.size() - 1);
  auto sp = std::make_shared<const std::vector<double>>(s);
  auto kp = std::make_shared<const std::vector<double>>(kappa);
  auto d1 = std::make_shared<const std::vector<double>>(derivative(kappa, h));
  auto d2 = std::make_shared<const std::vector<double>>(second_derivative(kappa, h));

  CurveProfile::Norms norms;
  norms.sup_kappa = max_abs(kappa);
  norms.sup_kappa_prime = max_abs(*d1);
  norms.sup_kappa_double_prime = max_abs(*d2);
  double l2 = 0.0;
  for (std::size_t i = 0; i + 1 < s.size(); ++i) {
    // exact for the piecewise-linear interpolant
    const double a = kappa[i];
    const double b = kappa[i + 1];
    l2 += h * (a * a + a * b + b * b) / 3.0;
  }
  norms.l2_kappa_squared = l2;
  norms.decay_window = std::max(std::abs(s.front()), std::abs(s.back()));
  norms.tail_bound = 0.0;

  CurveProfile profile(std::move(id), linear_interpolant(sp, kp), linear_interpolant(sp, d1),
                       linear_interpolant(sp, d2), norms);
  return profile.with_samples(s, kappa);
}

CurveProfile curvature_from_parametrization(const std::vector<CurveSample>& samples,
                                            const ParametrizationOptions& options) {
  std::vector<double> s(samples.size());
  std::vector<double> x(samples.size());
  std::vector<double> y(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    s[i] = samples[i].s;
    x[i] = samples[i].point[0];
    y[i] = samples[i].point[1];
  }
  check_uniform(s, options.uniform_tol);
  const double h = (s.back() - s.front()) / static_cast<double>(s.size() - 1);
  const auto dx = derivative(x, h);
  const auto dy = derivative(y, h);
  const auto ddx = second_derivative(x, h);
  const auto ddy = second_derivative(y, h);

  std::vector<double> kappa(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double speed = std::hypot(dx[i], dy[i]);
    if (std::abs(speed - 1.0) > options.arc_length_tol) {
      std::ostringstream msg;
      msg << "not arc-length: |gamma'(" << s[i] << ")| = " << speed;
      throw PreconditionError(msg.str());
    }
    // ν = (-γ′_y, γ′_x)/|γ′|
    kappa[i] = (-dy[i] * ddx[i] + dx[i] * ddy[i]) / speed;
  }
  return sampled_profile("parametrization", s, kappa);
}

double epsilon0(const CurveProfile& profile) {
  if (profile.sup_kappa() == 0.0) return std::numeric_limits<double>::infinity();
  return 1.0 / profile.sup_kappa();
}

namespace {

// Exact integral of the linear interpolant over [0, s] (zero outside the table).
double piecewise_linear_primitive(const CurveProfile& profile, double s) {
  const auto& grid = profile.sample_s();
  const auto& k = profile.sample_kappa();
  auto integral_to = [&](double x) {
    // ∫_{grid.front()}^{x} of the interpolant
    if (x <= grid.front()) return 0.0;
    double sum = 0.0;
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
      const double a = grid[i];
      const double b = grid[i + 1];
      if (x <= a) break;
      const double end = std::min(x, b);
      const double lam = (end - a) / (b - a);
      const double kend = (1.0 - lam) * k[i] + lam * k[i + 1];
      sum += 0.5 * (k[i] + kend) * (end - a);
    }
    return sum;
  };
  return integral_to(s) - integral_to(0.0);
}

}  // namespace

double curvature_primitive(const CurveProfile& profile, double s) {
  if (s == 0.0 || profile.is_straight()) return 0.0;
  if (profile.piecewise_linear()) return piecewise_linear_primitive(profile, s);
  auto k = [&profile](double x) { return profile.kappa(x); };
  return integrate_adaptive(k, 0.0, s, 1e-14, 4096, 1.0).value;
}

std::vector<double> curvature_primitive_on_grid(const CurveProfile& profile,
                                                const std::vector<double>& nodes) {
  std::vector<double> rho(nodes.size(), 0.0);
  if (nodes.empty() || profile.is_straight()) return rho;
  if (profile.piecewise_linear()) {
    for (std::size_t i = 0; i < nodes.size(); ++i) rho[i] = piecewise_linear_primitive(profile, nodes[i]);
    return rho;
  }
  auto k = [&profile](double x) { return profile.kappa(x); };
  auto segment = [&](double a, double b) {
    const int panels = std::max(1, static_cast<int>(std::ceil(std::abs(b - a) / 0.25)));
    return integrate_composite(k, a, b, panels, 16);
  };
  // first node at or right of s = 0
  const std::size_t pivot = static_cast<std::size_t>(
      std::lower_bound(nodes.begin(), nodes.end(), 0.0) - nodes.begin());
  if (pivot < nodes.size()) {
    rho[pivot] = segment(0.0, nodes[pivot]);
    for (std::size_t i = pivot + 1; i < nodes.size(); ++i)
      rho[i] = rho[i - 1] + segment(nodes[i - 1], nodes[i]);
  }
  if (pivot > 0) {
    rho[pivot - 1] = segment(0.0, nodes[pivot - 1]);
    for (std::size_t i = pivot - 1; i-- > 0;) rho[i] = rho[i + 1] + segment(nodes[i + 1], nodes[i]);
  }
  return rho;
}

// --- PlanarCurve -----------------------------------------------------------

PlanarCurve PlanarCurve::from_profile(const CurveProfile& profile, double s_min, double s_max,
                                      double step) {
  if (!(s_min <= 0.0 && s_max >= 0.0 && s_max > s_min))
    throw DomainError("PlanarCurve: range must contain s = 0");
  PlanarCurve curve;
  curve.sup_kappa_ = profile.sup_kappa();
  const int n_right = std::max(1, static_cast<int>(std::ceil(s_max / step)));
  const int n_left = std::max(1, static_cast<int>(std::ceil(-s_min / step)));

  struct State {
    double angle, x, y;
  };
  auto rhs = [&profile](double s, const State& u) {
    return State{profile.kappa(s), std::cos(u.angle), std::sin(u.angle)};
  };
  auto march = [&](int count, double h) {
    std::vector<State> states{State{0.0, 0.0, 0.0}};
    std::vector<double> grid{0.0};
    State u{0.0, 0.0, 0.0};
    double s = 0.0;
    for (int i = 0; i < count; ++i) {
      const State k1 = rhs(s, u);
      const State k2 = rhs(s + 0.5 * h, {u.angle + 0.5 * h * k1.angle, u.x + 0.5 * h * k1.x,
                                         u.y + 0.5 * h * k1.y});
      const State k3 = rhs(s + 0.5 * h, {u.angle + 0.5 * h * k2.angle, u.x + 0.5 * h * k2.x,
                                         u.y + 0.5 * h * k2.y});
      const State k4 = rhs(s + h, {u.angle + h * k3.angle, u.x + h * k3.x, u.y + h * k3.y});
      u.angle += h / 6.0 * (k1.angle + 2.0 * k2.angle + 2.0 * k3.angle + k4.angle);
      u.x += h / 6.0 * (k1.x + 2.0 * k2.x + 2.0 * k3.x + k4.x);
      u.y += h / 6.0 * (k1.y + 2.0 * k2.y + 2.0 * k3.y + k4.y);
      s += h;
      states.push_back(u);
      grid.push_back(s);
    }
    return std::make_pair(grid, states);
  };
  auto [right_s, right] = march(n_right, s_max / n_right);
  auto [left_s, left] = march(n_left, s_min / n_left);

  for (std::size_t i = left.size(); i-- > 1;) {
    curve.s_.push_back(left_s[i]);
    curve.points_.push_back({left[i].x, left[i].y});
    curve.angle_.push_back(left[i].angle);
  }
  for (std::size_t i = 0; i < right.size(); ++i) {
    curve.s_.push_back(right_s[i]);
    curve.points_.push_back({right[i].x, right[i].y});
    curve.angle_.push_back(right[i].angle);
  }
  curve.kappa_.resize(curve.s_.size());
  for (std::size_t i = 0; i < curve.s_.size(); ++i) curve.kappa_[i] = profile.kappa(curve.s_[i]);
  return curve;
}

PlanarCurve PlanarCurve::from_samples(const std::vector<CurveSample>& samples) {
  std::vector<double> s(samples.size());
  std::vector<double> x(samples.size());
  std::vector<double> y(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    s[i] = samples[i].s;
    x[i] = samples[i].point[0];
    y[i] = samples[i].point[1];
  }
  check_uniform(s, 1e-9);
  const double h = (s.back() - s.front()) / static_cast<double>(s.size() - 1);
  const auto dx = derivative(x, h);
  const auto dy = derivative(y, h);
  PlanarCurve curve;
  curve.s_ = s;
  curve.points_.resize(s.size());
  curve.angle_.resize(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    curve.points_[i] = {x[i], y[i]};
    double a = std::atan2(dy[i], dx[i]);
    if (i > 0) {
      // unwrap
      while (a - curve.angle_[i - 1] > std::numbers::pi) a -= 2.0 * std::numbers::pi;
      while (a - curve.angle_[i - 1] < -std::numbers::pi) a += 2.0 * std::numbers::pi;
    }
    curve.angle_[i] = a;
  }
  curve.kappa_ = derivative(curve.angle_, h);
  curve.sup_kappa_ = max_abs(curve.kappa_);
  return curve;
}

std::size_t PlanarCurve::locate(double s) const {
  if (s < s_.front() - 1e-12 || s > s_.back() + 1e-12)
    throw DomainError("PlanarCurve: s outside the reconstructed range");
  auto it = std::upper_bound(s_.begin(), s_.end(), s);
  std::size_t i = it == s_.begin() ? 0 : static_cast<std::size_t>(it - s_.begin()) - 1;
  return std::min(i, s_.size() - 2);
}

Point2 PlanarCurve::point(double s) const {
  const std::size_t i = locate(s);
  const double h = s_[i + 1] - s_[i];
  const double u = (s - s_[i]) / h;
  // cubic Hermite with unit tangents as endpoint slopes
  const double h00 = 2 * u * u * u - 3 * u * u + 1;
  const double h10 = u * u * u - 2 * u * u + u;
  const double h01 = -2 * u * u * u + 3 * u * u;
  const double h11 = u * u * u - u * u;
  Point2 p{};
  const double t0[2] = {std::cos(angle_[i]), std::sin(angle_[i])};
  const double t1[2] = {std::cos(angle_[i + 1]), std::sin(angle_[i + 1])};
  for (int c = 0; c < 2; ++c)
    p[c] = h00 * points_[i][c] + h10 * h * t0[c] + h01 * points_[i + 1][c] + h11 * h * t1[c];
  return p;
}

Point2 PlanarCurve::tangent(double s) const {
  const std::size_t i = locate(s);
  const double h = s_[i + 1] - s_[i];
  const double u = (s - s_[i]) / h;
  const double h00 = 2 * u * u * u - 3 * u * u + 1;
  const double h10 = u * u * u - 2 * u * u + u;
  const double h01 = -2 * u * u * u + 3 * u * u;
  const double h11 = u * u * u - u * u;
  const double angle =
      h00 * angle_[i] + h10 * h * kappa_[i] + h01 * angle_[i + 1] + h11 * h * kappa_[i + 1];
  return {std::cos(angle), std::sin(angle)};
}

Point2 PlanarCurve::normal(double s) const {
  const Point2 t = tangent(s);
  return {-t[1], t[0]};
}

Point2 tubular_map(const PlanarCurve& curve, double eps, double s, double t) {
  if (std::abs(t) > 1.0) throw DomainError("tubular_map: |t| must not exceed 1");
  if (!(eps > 0.0)) throw DomainError("tubular_map: eps must be positive");
  if (curve.sup_kappa() > 0.0 && eps * curve.sup_kappa() >= 1.0)
    throw DomainError("tubular_map: eps must be below epsilon0");
  const Point2 g = curve.point(s);
  const Point2 n = curve.normal(s);
  return {g[0] + eps * t * n[0], g[1] + eps * t * n[1]};
}

// --- validation ------------------------------------------------------------

bool segments_intersect(const Point2& p1, const Point2& p2, const Point2& q1, const Point2& q2) {
  auto cross = [](const Point2& o, const Point2& a, const Point2& b) {
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
  };
  auto on_segment = [](const Point2& a, const Point2& b, const Point2& p) {
    return std::min(a[0], b[0]) <= p[0] && p[0] <= std::max(a[0], b[0]) &&
           std::min(a[1], b[1]) <= p[1] && p[1] <= std::max(a[1], b[1]);
  };
  const double d1 = cross(q1, q2, p1);
  const double d2 = cross(q1, q2, p2);
  const double d3 = cross(p1, p2, q1);
  const double d4 = cross(p1, p2, q2);
  if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0)))
    return true;
  if (d1 == 0 && on_segment(q1, q2, p1)) return true;
  if (d2 == 0 && on_segment(q1, q2, p2)) return true;
  if (d3 == 0 && on_segment(p1, p2, q1)) return true;
  if (d4 == 0 && on_segment(p1, p2, q2)) return true;
  return false;
}

namespace {

ValidationReport check_decay_and_derivatives(const CurveProfile& profile,
                                             const ValidationOptions& options) {
  ValidationReport report;
  const double w = options.window;
  const int n_tail = std::max(2, static_cast<int>(std::ceil(w / options.sample_step)));
  double tail = 0.0;
  for (int i = 0; i <= n_tail; ++i) {
    const double s = w + w * i / n_tail;
    tail = std::max({tail, std::abs(profile.kappa(s)), std::abs(profile.kappa(-s))});
  }
  report.max_tail_sample = tail;
  report.decay_ok = tail <= options.tail;

  const int n_all = 2 * n_tail;
  double d1 = 0.0;
  double d2 = 0.0;
  bool finite = true;
  for (int i = -n_all; i <= n_all; ++i) {
    const double s = 2.0 * w * i / n_all;
    const double a = profile.kappa_prime(s);
    const double b = profile.kappa_double_prime(s);
    finite = finite && std::isfinite(a) && std::isfinite(b);
    d1 = std::max(d1, std::abs(a));
    d2 = std::max(d2, std::abs(b));
  }
  report.max_kappa_prime_sample = d1;
  report.max_kappa_double_prime_sample = d2;
  const double slack = 1e-9;
  report.derivatives_ok = finite && d1 <= profile.sup_kappa_prime() * (1 + slack) + 1e-300 &&
                          d2 <= profile.sup_kappa_double_prime() * (1 + slack) + 1e-300;
  if (!report.decay_ok) {
    std::ostringstream msg;
    msg << "decay: |kappa| reaches " << tail << " beyond |s| = " << w;
    report.reason = msg.str();
  } else if (!report.derivatives_ok) {
    report.reason = "derivative bounds: sampled kappa' or kappa'' exceeds the declared sup norm";
  }
  return report;
}

bool fibers_disjoint(const PlanarCurve& curve, double eps, const ValidationOptions& options,
                     std::string& reason) {
  const double a = curve.s_min();
  const double b = curve.s_max();
  const int n = std::max(2, static_cast<int>(std::floor((b - a) / options.fiber_step)));
  std::vector<std::pair<Point2, Point2>> fibers;
  std::vector<double> where;
  fibers.reserve(n + 1);
  for (int i = 0; i <= n; ++i) {
    const double s = a + (b - a) * i / n;
    const Point2 g = curve.point(s);
    const Point2 nu = curve.normal(s);
    fibers.push_back({{g[0] - eps * nu[0], g[1] - eps * nu[1]},
                      {g[0] + eps * nu[0], g[1] + eps * nu[1]}});
    where.push_back(s);
  }
  for (std::size_t i = 0; i < fibers.size(); ++i) {
    for (std::size_t j = i + 1; j < fibers.size(); ++j) {
      if (segments_intersect(fibers[i].first, fibers[i].second, fibers[j].first,
                             fibers[j].second)) {
        std::ostringstream msg;
        msg << "self-intersection: normal fibers at s = " << where[i] << " and s = " << where[j]
            << " intersect";
        reason = msg.str();
        return false;
      }
    }
  }
  return true;
}

}  // namespace

ValidationReport validate_assumptions(const CurveProfile& profile, const PlanarCurve& curve,
                                      double eps, const ValidationOptions& options) {
  if (!(eps > 0.0)) throw DomainError("validate_assumptions: eps must be positive");
  ValidationReport report = check_decay_and_derivatives(profile, options);
  const double sup = std::max(profile.sup_kappa(), curve.sup_kappa());
  if (eps * sup >= 1.0) {
    report.injective_ok = false;
    if (report.reason.empty()) report.reason = "fold-over: eps*||kappa||_inf >= 1";
    return report;
  }
  std::string reason;
  report.injective_ok = fibers_disjoint(curve, eps, options, reason);
  if (!report.injective_ok && report.reason.empty()) report.reason = reason;
  return report;
}

ValidationReport validate_assumptions(const CurveProfile& profile, double eps,
                                      const ValidationOptions& options) {
  if (!(eps > 0.0)) throw DomainError("validate_assumptions: eps must be positive");
  if (eps * profile.sup_kappa() >= 1.0) {
    ValidationReport report = check_decay_and_derivatives(profile, options);
    report.injective_ok = false;
    report.reason = "fold-over: eps*||kappa||_inf >= 1";
    return report;
  }
  const PlanarCurve curve =
      PlanarCurve::from_profile(profile, -options.window, options.window, 1e-2);
  return validate_assumptions(profile, curve, eps, options);
}

// --- files -----------------------------------------------------------------

namespace {

std::vector<std::vector<double>> read_table(const std::string& path, std::size_t columns) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    std::vector<double> row;
    double value = 0.0;
    while (fields >> value) row.push_back(value);
    if (!fields.eof()) {
      std::ostringstream msg;
      msg << path << ":" << lineno << ": not a number";
      throw PreconditionError(msg.str());
    }
    if (row.empty()) continue;
    if (row.size() != columns) {
      std::ostringstream msg;
      msg << path << ":" << lineno << ": expected " << columns << " fields, got " << row.size();
      throw PreconditionError(msg.str());
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

std::vector<CurveSample> read_curve_file(const std::string& path) {
  std::vector<CurveSample> samples;
  for (const auto& row : read_table(path, 3)) samples.push_back({row[0], {row[1], row[2]}});
  return samples;
}

CurveProfile read_profile_file(const std::string& path) {
  std::vector<double> s;
  std::vector<double> k;
  for (const auto& row : read_table(path, 2)) {
    s.push_back(row[0]);
    k.push_back(row[1]);
  }
  std::string id = path;
  if (auto slash = id.find_last_of('/'); slash != std::string::npos) id = id.substr(slash + 1);
  if (auto dot = id.find_last_of('.'); dot != std::string::npos) id = id.substr(0, dot);
  return sampled_profile(id, s, k);
}

}  // namespace relwave
