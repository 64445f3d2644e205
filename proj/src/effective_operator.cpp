#include "relwave/effective_operator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "relwave/errors.hpp"
#include "relwave/quadrature.hpp"

namespace relwave {

using std::numbers::pi;

std::vector<double> Grid1D::nodes() const {
  std::vector<double> s(n);
  for (int i = 0; i < n; ++i) s[i] = node(i);
  return s;
}

void Grid1D::validate() const {
  if (!(half_length > 0.0) || !std::isfinite(half_length))
    throw DomainError("grid: half_length must be positive and finite");
  if (n < 3) throw DomainError("grid: need at least 3 interior nodes");
}

namespace {

std::string format_double(double x) {
  std::ostringstream out;
  out.precision(17);
  out << x;
  return out.str();
}

void record_grid(DiscretizedForm& form, const Grid1D& grid) {
  form.provenance["L"] = format_double(grid.half_length);
  form.provenance["n"] = std::to_string(grid.n);
  form.provenance["h"] = format_double(grid.h());
  form.provenance["boundary"] = "dirichlet";
}

void check_tail(DiscretizedForm& form, const CurveProfile& profile, const Grid1D& grid) {
  const double tail = std::max(std::abs(profile.kappa(grid.half_length)),
                               std::abs(profile.kappa(-grid.half_length)));
  if (tail > std::max(profile.tail_bound(), 1e-8)) {
    std::ostringstream msg;
    msg << "|kappa(+-L)| = " << tail << " exceeds the tail bound; enlarge L";
    form.provenance["warning"] = msg.str();
  }
}

}  // namespace

DiscretizedForm assemble_schrodinger(const std::function<double(double)>& potential,
                                     const Grid1D& grid) {
  grid.validate();
  const int n = grid.n;
  const double h = grid.h();
  Triplets a;
  Triplets b;
  a.reserve(3 * n);
  b.reserve(n);
  double sup_negative = 0.0;
  for (int i = 0; i < n; ++i) {
    const double v = potential(grid.node(i));
    sup_negative = std::max(sup_negative, -v);
    a.emplace_back(i, i, 2.0 / h + h * v);
    if (i + 1 < n) {
      a.emplace_back(i + 1, i, -1.0 / h);
      a.emplace_back(i, i + 1, -1.0 / h);
    }
    b.emplace_back(i, i, h);
  }
  DiscretizedForm form;
  form.stiffness = from_triplets(n, a);
  form.mass = from_triplets(n, b);
  form.kind = FormKind::schrodinger;
  form.block = 1;
  form.s_nodes = grid.nodes();
  form.shift_hint = -1.1 * sup_negative - 1e-3;
  record_grid(form, grid);
  return form;
}

DiscretizedForm assemble_qe(const CurveProfile& profile, const Grid1D& grid) {
  auto v = [&profile](double s) {
    const double k = profile.kappa(s);
    return -k * k / (pi * pi);
  };
  DiscretizedForm form = assemble_schrodinger(v, grid);
  form.kind = FormKind::qe;
  form.provenance["profile"] = profile.id();
  check_tail(form, profile, grid);
  return form;
}

EffectiveSpectrum effective_spectrum(const DiscretizedForm& form, int n_ev, double tol_zero,
                                     const SolverOptions& options) {
  if (n_ev < 1) throw PreconditionError("effective_spectrum: n_ev must be >= 1");
  const int n = static_cast<int>(form.size());
  int want = std::min(n_ev, n);
  SpectralResult result;
  for (;;) {
    result = lowest_eigenpairs(form, want, options);
    if (result.eigenvalues.back() >= -tol_zero || want >= n) break;
    want = std::min(2 * want, n);
  }
  EffectiveSpectrum out;
  out.mu = result.eigenvalues;
  out.residuals = result.residuals;
  out.tol_zero = tol_zero;
  out.J = static_cast<int>(std::count_if(out.mu.begin(), out.mu.end(),
                                         [tol_zero](double x) { return x < -tol_zero; }));
  out.J_complete = out.J < static_cast<int>(out.mu.size()) || want >= n;
  out.gap_below = out.J > 0 ? out.mu[out.J - 1] : 0.0;
  out.gap_above = out.J < static_cast<int>(out.mu.size()) ? out.mu[out.J] : 0.0;
  out.provenance = form.provenance;
  out.provenance["solver"] = result.solver;
  out.provenance["iterations"] = std::to_string(result.iterations);
  return out;
}

// --- shooting ----------------------------------------------------------------

namespace {

struct ShootingState {
  double f = 0.0;
  double df = 0.0;
};

// Integrates f″ = (q² - V) f over `steps` RK4 steps whose potential values at
// the step start, midpoint and end sit in v[2k], v[2k+1], v[2k+2].
ShootingState integrate(const std::vector<double>& v, double h, double q2, double direction,
                        ShootingBoundary boundary) {
  ShootingState u = boundary == ShootingBoundary::dirichlet
                        ? ShootingState{0.0, direction}
                        : ShootingState{1.0, direction * std::sqrt(q2)};
  const std::size_t steps = (v.size() - 1) / 2;
  const double dh = direction * h;
  for (std::size_t k = 0; k < steps; ++k) {
    const double a0 = q2 - v[2 * k];
    const double a1 = q2 - v[2 * k + 1];
    const double a2 = q2 - v[2 * k + 2];
    const double k1f = u.df;
    const double k1d = a0 * u.f;
    const double k2f = u.df + 0.5 * dh * k1d;
    const double k2d = a1 * (u.f + 0.5 * dh * k1f);
    const double k3f = u.df + 0.5 * dh * k2d;
    const double k3d = a1 * (u.f + 0.5 * dh * k2f);
    const double k4f = u.df + dh * k3d;
    const double k4d = a2 * (u.f + dh * k3f);
    u.f += dh / 6.0 * (k1f + 2.0 * k2f + 2.0 * k3f + k4f);
    u.df += dh / 6.0 * (k1d + 2.0 * k2d + 2.0 * k3d + k4d);
    const double size = std::abs(u.f) + std::abs(u.df);
    if (size > 1e100) {
      u.f /= size;
      u.df /= size;
    }
  }
  return u;
}

}  // namespace

ShootingResult shooting_mu1(const std::function<double(double)>& potential, double sup_potential,
                            const ShootingOptions& options) {
  if (!(options.half_length > 0.0) || !(options.step > 0.0))
    throw DomainError("shooting: half_length and step must be positive");
  const double lo_default = -sup_potential;
  const double mu_lo = std::isnan(options.mu_lo) ? lo_default : options.mu_lo;
  const double mu_hi = options.mu_hi;
  if (!(mu_lo < mu_hi) || !(mu_hi < 0.0)) throw ConvergenceError("no bound state in bracket");

  const int steps = std::max(1, static_cast<int>(std::ceil(options.half_length / options.step)));
  const double h = options.half_length / steps;
  // potential at half-step spacing, from -L to 0 and from +L to 0
  std::vector<double> left(2 * steps + 1);
  std::vector<double> right(2 * steps + 1);
  for (int k = 0; k <= 2 * steps; ++k) {
    const double s = options.half_length - 0.5 * h * k;
    left[k] = potential(-s);
    right[k] = potential(s);
  }

  ShootingResult result;
  auto wronskian = [&](double mu, double* derivative) {
    ++result.evaluations;
    const double q2 = -mu;
    const ShootingState l = integrate(left, h, q2, +1.0, options.boundary);
    const ShootingState r = integrate(right, h, q2, -1.0, options.boundary);
    const double nl = std::hypot(l.f, l.df);
    const double nr = std::hypot(r.f, r.df);
    if (derivative) *derivative = l.df / nl;
    return (l.df * r.f - r.df * l.f) / (nl * nr);
  };

  const int scan = std::max(2, options.scan_points);
  double a = mu_lo;
  double wa = wronskian(a, nullptr);
  double b = a;
  double wb = wa;
  bool found = false;
  for (int i = 1; i <= scan; ++i) {
    b = mu_lo + (mu_hi - mu_lo) * i / scan;
    wb = wronskian(b, nullptr);
    if ((wa < 0.0) != (wb < 0.0) || wb == 0.0) {
      found = true;
      break;
    }
    a = b;
    wa = wb;
  }
  if (!found) throw ConvergenceError("no bound state in bracket");
  for (int it = 0; it < 200 && b - a > 1e-15 * std::max(1.0, std::abs(a)); ++it) {
    const double mid = 0.5 * (a + b);
    const double wm = wronskian(mid, nullptr);
    if (wm == 0.0) {
      a = b = mid;
      break;
    }
    if ((wm < 0.0) == (wa < 0.0)) {
      a = mid;
      wa = wm;
    } else {
      b = mid;
    }
  }
  result.mu = 0.5 * (a + b);
  wronskian(result.mu, &result.matching_derivative);
  return result;
}

ShootingResult shooting_mu1(const CurveProfile& profile, const ShootingOptions& options) {
  if (profile.is_straight()) throw ConvergenceError("no bound state in bracket");
  auto v = [&profile](double s) {
    const double k = profile.kappa(s);
    return k * k / (pi * pi);
  };
  const double sup = profile.sup_kappa() * profile.sup_kappa() / (pi * pi);
  return shooting_mu1(v, sup, options);
}

// --- gauged form -------------------------------------------------------------

std::vector<double> gauge_phase(const CurveProfile& profile, const std::vector<double>& nodes) {
  std::vector<double> theta = curvature_primitive_on_grid(profile, nodes);
  for (double& x : theta) x /= pi;
  return theta;
}

namespace {

DiscretizedForm assemble_pair(const CurveProfile& profile, const Grid1D& grid, bool gauged) {
  grid.validate();
  const int n = grid.n;
  const double h = grid.h();
  const std::vector<double> nodes = grid.nodes();
  std::vector<double> theta(n, 0.0);
  if (gauged) theta = gauge_phase(profile, nodes);
  Triplets a;
  Triplets b;
  a.reserve(6 * n);
  b.reserve(2 * n);
  double sup_v = 0.0;
  for (int i = 0; i < n; ++i) {
    const double k = profile.kappa(nodes[i]);
    const double v = k * k / (pi * pi);
    sup_v = std::max(sup_v, v);
    for (int c = 0; c < 2; ++c) {
      const int row = 2 * i + c;
      a.emplace_back(row, row, 2.0 / h - h * v);
      b.emplace_back(row, row, h);
      if (i + 1 < n) {
        const double sign = c == 0 ? 1.0 : -1.0;
        // |e^{-iασ₃}f_{i+1} - e^{iασ₃}f_i|²/h with 2α = θ_{i+1} - θ_i
        const double two_alpha = theta[i + 1] - theta[i];
        const Complex link = -std::polar(1.0, sign * two_alpha) / h;
        a.emplace_back(row + 2, row, link);
        a.emplace_back(row, row + 2, std::conj(link));
      }
    }
  }
  DiscretizedForm form;
  form.stiffness = from_triplets(2 * n, a);
  form.mass = from_triplets(2 * n, b);
  form.kind = gauged ? FormKind::qe_tilde : FormKind::generic;
  form.block = 2;
  form.s_nodes = nodes;
  form.shift_hint = -1.1 * sup_v - 1e-3;
  form.provenance["profile"] = profile.id();
  if (gauged) form.provenance["gauge_phase"] = "rho/pi";
  record_grid(form, grid);
  check_tail(form, profile, grid);
  return form;
}

}  // namespace

DiscretizedForm assemble_qe_tilde(const CurveProfile& profile, const Grid1D& grid) {
  return assemble_pair(profile, grid, true);
}

DiscretizedForm assemble_qe_pair(const CurveProfile& profile, const Grid1D& grid) {
  return assemble_pair(profile, grid, false);
}

Vector gauge_transform(const CurveProfile& profile, const Grid1D& grid, const Vector& f) {
  if (f.size() != 2 * grid.n) throw PreconditionError("gauge_transform: expected 2n entries");
  const std::vector<double> theta = gauge_phase(profile, grid.nodes());
  Vector g(f.size());
  for (int i = 0; i < grid.n; ++i) {
    g(2 * i) = std::polar(1.0, theta[i]) * f(2 * i);
    g(2 * i + 1) = std::polar(1.0, -theta[i]) * f(2 * i + 1);
  }
  return g;
}

SpinorField gauge_transform(const CurveProfile& profile, const SpinorField& f) {
  SpinorField g = f;
  g.value = [profile, f](double s) {
    const double theta = curvature_primitive(profile, s) / pi;
    return Spinor(std::polar(1.0, theta) * f.value(s)(0), std::polar(1.0, -theta) * f.value(s)(1));
  };
  g.derivative = [profile, f](double s) {
    const double theta = curvature_primitive(profile, s) / pi;
    const double dtheta = profile.kappa(s) / pi;
    const Spinor u = f.value(s);
    const Spinor du = f.derivative(s);
    const Complex i(0.0, 1.0);
    return Spinor(std::polar(1.0, theta) * (du(0) + i * dtheta * u(0)),
                  std::polar(1.0, -theta) * (du(1) - i * dtheta * u(1)));
  };
  return g;
}

double qe_pair_value(const CurveProfile& profile, const SpinorField& f, int panels) {
  auto density = [&](double s) {
    const double k = profile.kappa(s);
    return f.derivative(s).squaredNorm() - k * k / (pi * pi) * f.value(s).squaredNorm();
  };
  return integrate_composite(density, f.a, f.b, panels, 32);
}

double qe_tilde_value(const CurveProfile& profile, const SpinorField& g, int panels) {
  const Complex i(0.0, 1.0);
  auto density = [&](double s) {
    const double k = profile.kappa(s);
    const Spinor u = g.value(s);
    const Spinor du = g.derivative(s);
    const Spinor cov(du(0) - i * (k / pi) * u(0), du(1) + i * (k / pi) * u(1));
    return cov.squaredNorm() - k * k / (pi * pi) * u.squaredNorm();
  };
  return integrate_composite(density, g.a, g.b, panels, 32);
}

WitnessResult psi_theta_witness(const CurveProfile& profile, double theta, const Grid1D& grid) {
  if (!(theta > 0.0)) throw DomainError("psi_theta_witness: theta must be positive");
  if (theta >= grid.half_length / 2.0)
    throw DomainError("psi_theta_witness: theta must be below L/2 so that supp psi fits the grid");
  auto psi = [theta](double s) {
    const double x = std::abs(s);
    if (x <= theta) return 1.0;
    if (x <= 2.0 * theta) return (2.0 * theta - x) / theta;
    return 0.0;
  };
  auto dpsi2 = [theta](double s) {
    const double x = std::abs(s);
    return x > theta && x <= 2.0 * theta ? 1.0 / (theta * theta) : 0.0;
  };
  auto weighted = [&](double s) {
    const double k = profile.kappa(s);
    const double p = psi(s);
    return k * k * p * p;
  };
  auto kappa2 = [&](double s) {
    const double k = profile.kappa(s);
    return k * k;
  };
  const int panels = std::max(4, static_cast<int>(std::ceil(theta / 0.25)));
  // pieces split at the kinks of ψ_θ
  const double kinetic = integrate_composite(dpsi2, -2.0 * theta, -theta, panels, 32) +
                         integrate_composite(dpsi2, theta, 2.0 * theta, panels, 32);
  const double potential = integrate_composite(weighted, -2.0 * theta, -theta, panels, 32) +
                           integrate_composite(weighted, -theta, theta, 2 * panels, 32) +
                           integrate_composite(weighted, theta, 2.0 * theta, panels, 32);
  const double inner = integrate_composite(kappa2, -theta, theta, 2 * panels, 32);
  WitnessResult out;
  out.value = kinetic - potential / (pi * pi);
  out.bound = 2.0 / theta - inner / (pi * pi);
  out.bound_holds = out.value <= out.bound + 1e-12 * std::max(1.0, std::abs(out.bound));
  return out;
}

}  // namespace relwave
