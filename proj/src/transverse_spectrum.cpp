#include "relwave/transverse_spectrum.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "json.hpp"
#include "relwave/errors.hpp"
#include "relwave/quadrature.hpp"

namespace relwave {

using std::numbers::pi;

const PauliConstants& pauli() {
  static const PauliConstants constants = [] {
    using C = std::complex<double>;
    const C i(0.0, 1.0);
    PauliConstants c;
    c.sigma1 << 0.0, 1.0, 1.0, 0.0;
    c.sigma2 << 0.0, -i, i, 0.0;
    c.sigma3 << 1.0, 0.0, 0.0, -1.0;
    return c;
  }();
  return constants;
}

double dispersion(double k, double m) { return m * std::sin(2.0 * k) + k * std::cos(2.0 * k); }

double transverse_root(int p, double m) {
  if (p < 1) throw DomainError("transverse_root: p must be >= 1");
  if (!(m >= 0.0) || !std::isfinite(m)) throw DomainError("transverse_root: m must be finite and >= 0");
  double lo = (2.0 * p - 1.0) * pi / 4.0;
  double hi = p * pi / 2.0;
  if (m == 0.0) return lo;

  double f_lo = dispersion(lo, m);
  const double f_hi = dispersion(hi, m);
  if (!(f_lo * f_hi < 0.0)) {
    std::ostringstream msg;
    msg << "transverse_root: no sign change on [" << lo << ", " << hi << "] for p = " << p
        << ", m = " << m << " (f = " << f_lo << ", " << f_hi << ")";
    throw ConvergenceError(msg.str());
  }
  while (hi - lo > 1e-10) {
    const double mid = 0.5 * (lo + hi);
    const double f_mid = dispersion(mid, m);
    if (f_mid == 0.0) return mid;
    if ((f_mid < 0.0) == (f_lo < 0.0)) {
      lo = mid;
      f_lo = f_mid;
    } else {
      hi = mid;
    }
  }
  double k = 0.5 * (lo + hi);
  for (int it = 0; it < 5; ++it) {
    const double f = dispersion(k, m);
    const double df = (2.0 * m + 1.0) * std::cos(2.0 * k) - 2.0 * k * std::sin(2.0 * k);
    if (df == 0.0) break;
    const double next = k - f / df;
    if (!(next > lo - 1e-9 && next < hi + 1e-9)) break;
    if (next == k) break;
    k = next;
  }
  return k;
}

double k1_series(double m) { return pi / 4.0 + 2.0 * m / pi - 16.0 * m * m / (pi * pi * pi); }

double transverse_energy(int p, double m) {
  const double k = transverse_root(p, m);
  return std::sqrt(m * m + k * k);
}

double essential_threshold(double m, double eps) {
  if (!(eps > 0.0)) throw DomainError("essential_threshold: eps must be positive");
  return transverse_energy(1, m * eps) / eps;
}

TransverseMode::TransverseMode(int p, double m, Branch sign)
    : p_(p), m_(m), k_(transverse_root(p, m)), sign_(sign) {
  energy_ = std::sqrt(m * m + k_ * k_);
  const double k = k_;
  const double e = energy_;
  auto density = [k, e, m](double t) {
    const double c = std::cos(k * (t + 1.0));
    const double s = std::sin(k * (t + 1.0));
    return 2.0 * k * k * c * c + 2.0 * (e * e + m * m) * s * s + 4.0 * k * m * c * s;
  };
  const AdaptiveResult norm2 = integrate_adaptive(density, -1.0, 1.0, 1e-12);
  normalization_ = 1.0 / std::sqrt(norm2.value);
}

Eigen::Vector2d TransverseMode::value(double t) const {
  const double c = std::cos(k_ * (t + 1.0));
  const double s = std::sin(k_ * (t + 1.0));
  const double a = normalization_ * (k_ * c + (energy_ + m_) * s);
  const double b = normalization_ * (k_ * c - (energy_ - m_) * s);
  return sign_ == Branch::plus ? Eigen::Vector2d(a, b) : Eigen::Vector2d(b, a);
}

Eigen::Vector2d TransverseMode::derivative(double t) const {
  const double c = std::cos(k_ * (t + 1.0));
  const double s = std::sin(k_ * (t + 1.0));
  const double a = normalization_ * k_ * (-k_ * s + (energy_ + m_) * c);
  const double b = normalization_ * k_ * (-k_ * s - (energy_ - m_) * c);
  return sign_ == Branch::plus ? Eigen::Vector2d(a, b) : Eigen::Vector2d(b, a);
}

Spinor eigenfunction_eval(const TransverseMode& mode, double t) {
  if (std::abs(t) > 1.0) throw DomainError("eigenfunction_eval: |t| must not exceed 1");
  return mode.value(t).cast<std::complex<double>>();
}

Spinor eigenfunction_derivative(const TransverseMode& mode, double t) {
  if (std::abs(t) > 1.0) throw DomainError("eigenfunction_derivative: |t| must not exceed 1");
  return mode.derivative(t).cast<std::complex<double>>();
}

Spinor apply_transverse(const Spinor& u, const Spinor& du, double m) {
  return Spinor(-du(1) + m * u(0), du(0) - m * u(1));
}

SpinorFunction as_function(const TransverseMode& mode) {
  return {[mode](double t) { return eigenfunction_eval(mode, t); },
          [mode](double t) { return eigenfunction_derivative(mode, t); }};
}

namespace {

double integrate_real(const std::function<double(double)>& f, double tol) {
  return integrate_adaptive(f, -1.0, 1.0, tol).value;
}

}  // namespace

std::complex<double> inner_product(const std::function<Spinor(double)>& f,
                                   const std::function<Spinor(double)>& g, double tol) {
  const double re = integrate_real([&](double t) { return f(t).dot(g(t)).real(); }, tol);
  const double im = integrate_real([&](double t) { return f(t).dot(g(t)).imag(); }, tol);
  return {re, im};
}

Eigen::Matrix2cd sigma3_matrix_elements(double m) {
  if (!(m >= 0.0)) throw DomainError("sigma3_matrix_elements: m must be >= 0");
  const TransverseMode modes[2] = {TransverseMode(1, m, Branch::plus),
                                   TransverseMode(1, m, Branch::minus)};
  Eigen::Matrix2cd out;
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      const auto& pa = modes[a];
      const auto& pb = modes[b];
      out(a, b) = inner_product([&](double t) { return eigenfunction_eval(pa, t); },
                                [&](double t) {
                                  Spinor v = eigenfunction_eval(pb, t);
                                  v(1) = -v(1);
                                  return v;
                                });
    }
  }
  return out;
}

double transverse_form_identity_check(const SpinorFunction& u, double m, double bc_tol) {
  const Spinor right = u.value(1.0);
  const Spinor left = u.value(-1.0);
  const double scale = std::max({1.0, right.norm(), left.norm()});
  const double bc = std::max(std::abs(right(1) + right(0)), std::abs(left(1) - left(0)));
  if (bc > bc_tol * scale) {
    std::ostringstream msg;
    msg << "transverse_form_identity_check: boundary condition violated by " << bc;
    throw PreconditionError(msg.str());
  }
  const double lhs = integrate_real(
      [&](double t) { return apply_transverse(u.value(t), u.derivative(t), m).squaredNorm(); },
      1e-13);
  const double grad = integrate_real([&](double t) { return u.derivative(t).squaredNorm(); }, 1e-13);
  const double mass = integrate_real([&](double t) { return u.value(t).squaredNorm(); }, 1e-13);
  const double rhs = grad + m * m * mass + m * (right.squaredNorm() + left.squaredNorm());
  return std::abs(lhs - rhs);
}

double eigen_residual(const TransverseMode& mode) {
  const double lambda = mode.eigenvalue();
  const double r2 = integrate_real(
      [&](double t) {
        const Eigen::Vector2d u = mode.value(t);
        const Eigen::Vector2d du = mode.derivative(t);
        const Eigen::Vector2d tu(-du(1) + mode.m() * u(0), du(0) - mode.m() * u(1));
        return (tu - lambda * u).squaredNorm();
      },
      1e-14);
  return std::sqrt(std::max(0.0, r2));
}

Projection project_pi_delta(const std::function<Spinor(double)>& u, double delta) {
  const TransverseMode plus(1, delta, Branch::plus);
  const TransverseMode minus(1, delta, Branch::minus);
  Projection c;
  c.plus = inner_product([&](double t) { return eigenfunction_eval(plus, t); }, u);
  c.minus = inner_product([&](double t) { return eigenfunction_eval(minus, t); }, u);
  return c;
}

std::function<Spinor(double)> reconstruct(const Projection& c, double delta) {
  const TransverseMode plus(1, delta, Branch::plus);
  const TransverseMode minus(1, delta, Branch::minus);
  return [c, plus, minus](double t) {
    return Spinor(c.plus * eigenfunction_eval(plus, t) + c.minus * eigenfunction_eval(minus, t));
  };
}

std::string to_json(const TransverseMode& mode) {
  nlohmann::json j;
  j["p"] = mode.p();
  j["m"] = mode.m();
  j["k"] = mode.k();
  j["E"] = mode.energy();
  j["N"] = mode.normalization();
  j["sign"] = mode.sign() == Branch::plus ? "+" : "-";
  return j.dump();
}

}  // namespace relwave
