#pragma once

#include <array>
#include <functional>
#include <limits>
#include <memory>
#include <string>
#include <vector>

namespace relwave {

using Point2 = std::array<double, 2>;

/// Signed curvature of an arc-length parametrized planar curve together with
/// the two derivatives and norms the waveguide analysis needs.
///
/// Immutable after construction; every accessor is safe to call concurrently.
class CurveProfile {
 public:
  using ScalarFn = std::function<double(double)>;

  struct Norms {
    double sup_kappa = 0.0;
    double sup_kappa_prime = 0.0;
    double sup_kappa_double_prime = 0.0;
    double l2_kappa_squared = 0.0;  ///< ∫ κ² ds
    double decay_window = 0.0;      ///< |κ(s)| <= tail_bound for |s| > decay_window
    double tail_bound = 0.0;
  };

  CurveProfile(std::string id, ScalarFn kappa, ScalarFn kappa_prime, ScalarFn kappa_double_prime,
               Norms norms);

  const std::string& id() const { return id_; }
  double kappa(double s) const { return kappa_(s); }
  double kappa_prime(double s) const { return kappa_prime_(s); }
  double kappa_double_prime(double s) const { return kappa_double_prime_(s); }

  double sup_kappa() const { return norms_.sup_kappa; }
  double sup_kappa_prime() const { return norms_.sup_kappa_prime; }
  double sup_kappa_double_prime() const { return norms_.sup_kappa_double_prime; }
  double l2_kappa_squared() const { return norms_.l2_kappa_squared; }
  double decay_window() const { return norms_.decay_window; }
  double tail_bound() const { return norms_.tail_bound; }
  const Norms& norms() const { return norms_; }

  bool is_straight() const { return norms_.sup_kappa == 0.0; }

  /// Piecewise-linear profiles integrate exactly; analytic ones go through quadrature.
  bool piecewise_linear() const { return !samples_s_.empty(); }
  const std::vector<double>& sample_s() const { return samples_s_; }
  const std::vector<double>& sample_kappa() const { return samples_kappa_; }

  /// Attaches the sample table of a piecewise-linear profile.
  CurveProfile with_samples(std::vector<double> s, std::vector<double> kappa) const;

 private:
  std::string id_;
  ScalarFn kappa_;
  ScalarFn kappa_prime_;
  ScalarFn kappa_double_prime_;
  Norms norms_;
  std::vector<double> samples_s_;
  std::vector<double> samples_kappa_;
};

/// Half-width scale and mass of the tube.
struct TubularParams {
  double epsilon = 0.1;
  double m = 0.0;
};

// Built-in profiles with analytic κ, κ′, κ″.
CurveProfile zero_profile();
/// κ(s) = a·exp(-s²/σ²)
CurveProfile gaussian_bump(double a, double sigma = 1.0);
/// κ(s) = a·(1 - (s/w)²)³ on [-w, w], zero outside; C² across ±w.
CurveProfile compact_bump(double a, double w);
/// κ ≡ c. Violates decay at infinity; used for circles in tests.
CurveProfile constant_profile(double c);

/// Profile from tabulated (s, κ) pairs on a uniform grid; κ′ and κ″ come from
/// five-point central stencils (three-point at the ends), evaluation between
/// samples is linear and κ vanishes outside the table.
CurveProfile sampled_profile(std::string id, const std::vector<double>& s,
                             const std::vector<double>& kappa);

struct CurveSample {
  double s = 0.0;
  Point2 point{};
};

struct ParametrizationOptions {
  double arc_length_tol = 1e-3;  ///< allowed deviation of |γ′| from 1
  double uniform_tol = 1e-9;     ///< relative tolerance on the s spacing
};

/// κ = γ″·ν with ν = γ′ rotated by +π/2, by fourth-order finite differences.
/// Throws PreconditionError on a non-uniform grid, fewer than 7 samples, or
/// |γ′| outside 1 ± tol ("not arc-length").
CurveProfile curvature_from_parametrization(const std::vector<CurveSample>& samples,
                                            const ParametrizationOptions& options = {});

/// 1/‖κ‖∞, or +∞ for a straight line.
double epsilon0(const CurveProfile& profile);

/// ρ(s) = ∫_0^s κ.
double curvature_primitive(const CurveProfile& profile, double s);

/// ρ on an increasing list of nodes, accumulated interval by interval from s = 0.
std::vector<double> curvature_primitive_on_grid(const CurveProfile& profile,
                                                const std::vector<double>& nodes);

/// Arc-length curve γ with γ(0) = 0, γ′(0) = (1, 0), rebuilt from κ (or taken
/// from samples), with unit normal ν = rot(+π/2)γ′.
class PlanarCurve {
 public:
  static PlanarCurve from_profile(const CurveProfile& profile, double s_min, double s_max,
                                  double step = 1e-3);
  static PlanarCurve from_samples(const std::vector<CurveSample>& samples);

  Point2 point(double s) const;
  Point2 tangent(double s) const;
  Point2 normal(double s) const;
  double s_min() const { return s_.front(); }
  double s_max() const { return s_.back(); }
  double sup_kappa() const { return sup_kappa_; }

 private:
  PlanarCurve() = default;
  std::size_t locate(double s) const;

  std::vector<double> s_;
  std::vector<Point2> points_;
  std::vector<double> angle_;
  std::vector<double> kappa_;
  double sup_kappa_ = 0.0;
};

/// Φ_ε(s, t) = γ(s) + ε t ν(s). Throws DomainError for |t| > 1, s off the curve,
/// or ε ≥ ε₀.
Point2 tubular_map(const PlanarCurve& curve, double eps, double s, double t);

struct ValidationOptions {
  double window = 20.0;      ///< decay checked on |s| in [window, 2 window]
  double tail = 1e-8;        ///< declared tail bound for assumption (A)
  double fiber_step = 0.05;  ///< spacing of the normal fibers used for (C)
  double sample_step = 0.01;
};

struct ValidationReport {
  bool decay_ok = false;        ///< (A)
  bool derivatives_ok = false;  ///< (B)
  bool injective_ok = false;    ///< (C)
  double max_tail_sample = 0.0;
  double max_kappa_prime_sample = 0.0;
  double max_kappa_double_prime_sample = 0.0;
  std::string reason;  ///< first failure, empty if all pass

  bool all_ok() const { return decay_ok && derivatives_ok && injective_ok; }
};

ValidationReport validate_assumptions(const CurveProfile& profile, double eps,
                                      const ValidationOptions& options = {});

/// Same check against an explicitly sampled curve (parametrization input).
ValidationReport validate_assumptions(const CurveProfile& profile, const PlanarCurve& curve,
                                      double eps, const ValidationOptions& options = {});

/// True when the closed segments [p1, p2] and [q1, q2] share a point.
bool segments_intersect(const Point2& p1, const Point2& p2, const Point2& q1, const Point2& q2);

// Plain-text inputs: '#' starts a comment, fields are whitespace-delimited.
std::vector<CurveSample> read_curve_file(const std::string& path);
CurveProfile read_profile_file(const std::string& path);

}  // namespace relwave
