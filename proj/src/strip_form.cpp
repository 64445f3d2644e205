#include "relwave/strip_form.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "relwave/eigensolve.hpp"
#include "relwave/errors.hpp"
#include "relwave/parallel.hpp"
#include "relwave/quadrature.hpp"
#include "relwave/transverse_spectrum.hpp"

namespace relwave {

std::string to_string(TransverseBackend backend) {
  return backend == TransverseBackend::galerkin ? "galerkin" : "tensor";
}

void StripDiscretization::validate(const CurveProfile& profile) const {
  s_grid.validate();
  if (!(epsilon > 0.0)) throw DomainError("strip: epsilon must be positive");
  if (!(m >= 0.0) || !std::isfinite(m)) throw DomainError("strip: m must be finite and >= 0");
  if (epsilon * profile.sup_kappa() >= 1.0) throw DomainError("strip: epsilon must be below epsilon0");
  if (backend == TransverseBackend::galerkin) {
    if (modes < 1) throw DomainError("strip: need at least one transverse mode");
    if (modes > max_modes) {
      std::ostringstream msg;
      msg << "strip: P = " << modes << " exceeds the " << max_modes << " computed transverse modes";
      throw DomainError(msg.str());
    }
    if (quadrature_points < 4 * modes)
      throw DomainError("strip: too few t-quadrature points for the requested modes");
  } else {
    if (n_t < 8 || n_t % 2 != 0) throw DomainError("strip: n_t must be even and >= 8");
    if (element_points < 3) throw DomainError("strip: need at least 3 points per element");
  }
}

// --- transverse bases ----------------------------------------------------------

Eigen::MatrixXd TransverseBasis::weighted_gram(const std::vector<double>& w, bool sigma3) const {
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(dim, dim);
  const double second = sigma3 ? -1.0 : 1.0;
  for (std::size_t q = 0; q < t.size(); ++q) {
    const double f = w[q] * weight[q];
    const auto& idx = support[q];
    const auto& val = values[q];
    for (std::size_t i = 0; i < idx.size(); ++i) {
      for (std::size_t j = 0; j < idx.size(); ++j) {
        g(idx[i], idx[j]) += f * (val[i](0) * val[j](0) + second * val[i](1) * val[j](1));
      }
    }
  }
  return g;
}

namespace {

void finish_pattern(TransverseBasis& basis) {
  Eigen::MatrixXi seen = Eigen::MatrixXi::Zero(basis.dim, basis.dim);
  for (const auto& idx : basis.support)
    for (int a : idx)
      for (int b : idx) seen(a, b) = 1;
  for (int b = 0; b < basis.dim; ++b)
    for (int a = 0; a < basis.dim; ++a)
      if (seen(a, b)) basis.pattern.emplace_back(a, b);
  basis.gram = basis.weighted_gram(std::vector<double>(basis.t.size(), 1.0));
}

}  // namespace

TransverseBasis galerkin_basis(int modes, double mass, int quadrature_points) {
  TransverseBasis basis;
  basis.dim = 2 * modes;
  const GaussLegendreRule& rule = gauss_legendre(quadrature_points);
  basis.t = rule.nodes;
  basis.weight = rule.weights;
  std::vector<TransverseMode> list;
  for (int p = 1; p <= modes; ++p) {
    list.emplace_back(p, mass, Branch::plus);
    list.emplace_back(p, mass, Branch::minus);
  }
  std::vector<int> all(basis.dim);
  for (int a = 0; a < basis.dim; ++a) all[a] = a;
  for (double t : basis.t) {
    basis.support.push_back(all);
    std::vector<Eigen::Vector2d> v;
    for (const auto& mode : list) v.push_back(mode.value(t));
    basis.values.push_back(std::move(v));
  }
  basis.form = Eigen::MatrixXd::Zero(basis.dim, basis.dim);
  for (int a = 0; a < basis.dim; ++a) basis.form(a, a) = list[a].energy() * list[a].energy();
  finish_pattern(basis);
  return basis;
}

TransverseBasis tensor_basis(int n_t, double mass, int element_points) {
  TransverseBasis basis;
  basis.dim = 2 * n_t;
  const GaussLegendreRule& rule = gauss_legendre(element_points);
  const double he = 4.0 / n_t;
  // global function index of (node j, component c); boundary nodes carry a
  // single function with vector (1, 1) at t = -1 and (1, -1) at t = 1
  auto function_of = [n_t](int j, int c) {
    if (j == 0) return 0;
    if (j == n_t) return 2 * n_t - 1;
    return 1 + 2 * (j - 1) + c;
  };
  std::vector<std::vector<Eigen::Vector2d>> derivs;
  for (int e = 0; e < n_t / 2; ++e) {
    const double left = -1.0 + e * he;
    for (std::size_t g = 0; g < rule.nodes.size(); ++g) {
      const double xi = rule.nodes[g];
      const double shape[3] = {0.5 * xi * (xi - 1.0), 1.0 - xi * xi, 0.5 * xi * (xi + 1.0)};
      const double dshape[3] = {(xi - 0.5) * 2.0 / he, -2.0 * xi * 2.0 / he, (xi + 0.5) * 2.0 / he};
      basis.t.push_back(left + 0.5 * he * (xi + 1.0));
      basis.weight.push_back(0.5 * he * rule.weights[g]);
      std::vector<int> idx;
      std::vector<Eigen::Vector2d> val;
      std::vector<Eigen::Vector2d> der;
      for (int l = 0; l < 3; ++l) {
        const int j = 2 * e + l;
        if (j == 0 || j == n_t) {
          const Eigen::Vector2d dir(1.0, j == 0 ? 1.0 : -1.0);
          idx.push_back(function_of(j, 0));
          val.push_back(shape[l] * dir);
          der.push_back(dshape[l] * dir);
        } else {
          for (int c = 0; c < 2; ++c) {
            const Eigen::Vector2d dir = c == 0 ? Eigen::Vector2d(1.0, 0.0) : Eigen::Vector2d(0.0, 1.0);
            idx.push_back(function_of(j, c));
            val.push_back(shape[l] * dir);
            der.push_back(dshape[l] * dir);
          }
        }
      }
      basis.support.push_back(std::move(idx));
      basis.values.push_back(std::move(val));
      derivs.push_back(std::move(der));
    }
  }
  finish_pattern(basis);
  Eigen::MatrixXd stiff = Eigen::MatrixXd::Zero(basis.dim, basis.dim);
  for (std::size_t q = 0; q < basis.t.size(); ++q) {
    const auto& idx = basis.support[q];
    for (std::size_t i = 0; i < idx.size(); ++i)
      for (std::size_t j = 0; j < idx.size(); ++j)
        stiff(idx[i], idx[j]) += basis.weight[q] * derivs[q][i].dot(derivs[q][j]);
  }
  Eigen::MatrixXd trace = Eigen::MatrixXd::Zero(basis.dim, basis.dim);
  trace(0, 0) = 2.0;  // |(1, 1)|² at t = -1
  trace(basis.dim - 1, basis.dim - 1) = 2.0;  // |(1, -1)|² at t = 1
  basis.form = stiff + mass * mass * basis.gram + mass * trace;
  return basis;
}

TransverseBasis make_basis(const StripDiscretization& disc) {
  const double mass = disc.m * disc.epsilon;
  if (disc.backend == TransverseBackend::galerkin)
    return galerkin_basis(disc.modes, mass, disc.quadrature_points);
  return tensor_basis(disc.n_t, mass, disc.element_points);
}

// --- assembly ------------------------------------------------------------------

namespace {

struct CurveSamples {
  std::vector<double> node_s, kappa, kappa1, kappa2;  // interior nodes
  std::vector<double> mid_s, mid_kappa;               // cells 0..n
  std::vector<double> rho;                            // nodes -1..n (ghosts at ±L)
};

CurveSamples sample_curve(const CurveProfile& profile, const Grid1D& grid) {
  CurveSamples c;
  const int n = grid.n;
  const double h = grid.h();
  c.node_s = grid.nodes();
  for (double s : c.node_s) {
    c.kappa.push_back(profile.kappa(s));
    c.kappa1.push_back(profile.kappa_prime(s));
    c.kappa2.push_back(profile.kappa_double_prime(s));
  }
  for (int cell = 0; cell <= n; ++cell) {
    const double s = -grid.half_length + (cell + 0.5) * h;
    c.mid_s.push_back(s);
    c.mid_kappa.push_back(profile.kappa(s));
  }
  std::vector<double> extended;
  extended.push_back(-grid.half_length);
  extended.insert(extended.end(), c.node_s.begin(), c.node_s.end());
  extended.push_back(grid.half_length);
  c.rho = curvature_primitive_on_grid(profile, extended);
  return c;
}

double metric(double eps, double t, double kappa) {
  const double d = 1.0 - eps * t * kappa;
  if (!(d > 0.0)) throw DomainError("1 - eps*t*kappa <= 0 on grid");
  return d;
}

void check_metric(const CurveSamples& c, double eps) {
  for (double k : c.kappa) {
    metric(eps, 1.0, k);
    metric(eps, -1.0, k);
  }
  for (double k : c.mid_kappa) {
    metric(eps, 1.0, k);
    metric(eps, -1.0, k);
  }
}

// Coefficients shared by fqunit and a_±.
struct Recipe {
  bool curved = true;       // (1-εtκ)^{-k} weights and the κ′, κ″ terms
  double s_scale = 1.0;     // multiplies the covariant s-part (kinetic and -κ²/4)
  double mass_shift = 0.0;  // coefficient of ‖u‖²
  FormKind kind = FormKind::fqunit;
};

void add_block(Triplets& out, int row_node, int col_node, int dim, const Eigen::MatrixXcd& block,
               const std::vector<std::pair<int, int>>& pattern) {
  for (const auto& [a, b] : pattern)
    out.emplace_back(row_node * dim + a, col_node * dim + b, block(a, b));
}

DiscretizedForm assemble_strip(const CurveProfile& profile, const StripDiscretization& disc,
                               const Recipe& recipe) {
  disc.validate(profile);
  const TransverseBasis basis = make_basis(disc);
  const CurveSamples c = sample_curve(profile, disc.s_grid);
  const double eps = disc.epsilon;
  check_metric(c, eps);
  const int n = disc.s_grid.n;
  const int dim = basis.dim;
  const double h = disc.s_grid.h();
  const std::size_t nq = basis.t.size();

  auto cell_weights = [&](int cell) {
    std::vector<double> w(nq, 1.0);
    if (recipe.curved) {
      for (std::size_t q = 0; q < nq; ++q) {
        const double d = metric(eps, basis.t[q], c.mid_kappa[cell]);
        w[q] = 1.0 / (d * d);
      }
    }
    return w;
  };
  auto node_potential = [&](int i) {
    std::vector<double> v(nq);
    const double k = c.kappa[i];
    for (std::size_t q = 0; q < nq; ++q) {
      if (recipe.curved) {
        const double t = basis.t[q];
        const double d = metric(eps, t, k);
        const double w2 = 1.0 / (d * d);
        const double w3 = w2 / d;
        const double w4 = w2 * w2;
        const double et1 = eps * t * c.kappa1[i];
        v[q] = -k * k * w2 / 4.0 - 1.25 * et1 * et1 * w4 - 0.5 * eps * t * c.kappa2[i] * w3;
      } else {
        v[q] = recipe.s_scale * (-k * k / 4.0);
      }
    }
    return v;
  };
  // cell `cell` joins node cell-1 (left) and node cell (right)
  auto cell_blocks = [&](int cell, Eigen::MatrixXcd& diag, Eigen::MatrixXcd& lower) {
    const std::vector<double> w = cell_weights(cell);
    const Eigen::MatrixXd g0 = basis.weighted_gram(w) * (recipe.s_scale / h);
    diag = g0.cast<Complex>();
    if (cell >= 1 && cell <= n - 1) {
      const Eigen::MatrixXd g1 = basis.weighted_gram(w, true) * (recipe.s_scale / h);
      const double alpha = (c.rho[cell + 1] - c.rho[cell]) / 4.0;
      const double cs = std::cos(2.0 * alpha);
      const double sn = std::sin(2.0 * alpha);
      lower = -(cs * g0.cast<Complex>() + Complex(0.0, sn) * g1.cast<Complex>());
    }
  };

  std::vector<Triplets> rows(n);
  const Eigen::MatrixXcd transverse = (basis.form * (h / (eps * eps))).cast<Complex>();
  const Eigen::MatrixXcd shift = (basis.gram * (h * recipe.mass_shift)).cast<Complex>();
  parallel_for(n, [&](int i) {
    Triplets& out = rows[i];
    Eigen::MatrixXcd d_left, lower_left, d_right, lower_right;
    cell_blocks(i, d_left, lower_left);
    cell_blocks(i + 1, d_right, lower_right);
    const Eigen::MatrixXcd pot =
        (basis.weighted_gram(node_potential(i)) * h).cast<Complex>();
    const Eigen::MatrixXcd diag = d_left + d_right + pot + transverse + shift;
    if (i >= 1) add_block(out, i, i - 1, dim, lower_left, basis.pattern);
    add_block(out, i, i, dim, diag, basis.pattern);
    if (i + 1 <= n - 1) add_block(out, i, i + 1, dim, lower_right.adjoint(), basis.pattern);
  });

  Triplets all;
  std::size_t total = 0;
  for (const auto& r : rows) total += r.size();
  all.reserve(total);
  for (auto& r : rows) all.insert(all.end(), r.begin(), r.end());

  Triplets mass_entries;
  for (int i = 0; i < n; ++i)
    for (const auto& [a, b] : basis.pattern)
      if (basis.gram(a, b) != 0.0) mass_entries.emplace_back(i * dim + a, i * dim + b, h * basis.gram(a, b));

  DiscretizedForm form;
  form.stiffness = from_triplets(static_cast<Eigen::Index>(n) * dim, all);
  form.mass = from_triplets(static_cast<Eigen::Index>(n) * dim, mass_entries);
  form.kind = recipe.kind;
  form.block = dim;
  form.s_nodes = c.node_s;
  std::ostringstream num;
  num.precision(17);
  auto fmt = [&num](double x) {
    num.str("");
    num << x;
    return num.str();
  };
  form.provenance["form"] = to_string(recipe.kind);
  form.provenance["profile"] = profile.id();
  form.provenance["backend"] = to_string(disc.backend);
  form.provenance["epsilon"] = fmt(eps);
  form.provenance["m"] = fmt(disc.m);
  form.provenance["L"] = fmt(disc.s_grid.half_length);
  form.provenance["n_s"] = std::to_string(n);
  if (disc.backend == TransverseBackend::galerkin) {
    form.provenance["P"] = std::to_string(disc.modes);
    form.provenance["t_points"] = std::to_string(disc.quadrature_points);
  } else {
    form.provenance["n_t"] = std::to_string(disc.n_t);
    form.provenance["element_points"] = std::to_string(disc.element_points);
  }
  double sigma = strip_shift(profile, disc);
  if (recipe.kind != FormKind::fqunit) {
    const double extra = std::abs(recipe.mass_shift) + std::abs(recipe.s_scale - 1.0) *
                                                            profile.sup_kappa() * profile.sup_kappa() / 4.0;
    sigma -= 1.1 * extra;
  }
  form.shift_hint = sigma;
  return form;
}

}  // namespace

DiscretizedForm assemble_fqunit(const CurveProfile& profile, const StripDiscretization& disc) {
  return assemble_strip(profile, disc, Recipe{});
}

DiscretizedForm assemble_a_pm(const CurveProfile& profile, const StripDiscretization& disc,
                              double c, SandwichSign sign) {
  if (!(c >= 0.0) || !std::isfinite(c)) throw DomainError("a_pm: c must be finite and >= 0");
  const double ce = c * disc.epsilon;
  Recipe r;
  r.curved = false;
  r.s_scale = sign == SandwichSign::plus ? 1.0 + ce : 1.0 - ce;
  r.mass_shift = sign == SandwichSign::plus ? ce : -ce;
  r.kind = sign == SandwichSign::plus ? FormKind::a_plus : FormKind::a_minus;
  DiscretizedForm form = assemble_strip(profile, disc, r);
  std::ostringstream num;
  num.precision(17);
  num << c;
  form.provenance["c"] = num.str();
  return form;
}

double strip_shift(const CurveProfile& profile, const StripDiscretization& disc) {
  const double eps = disc.epsilon;
  const double d = 1.0 - eps * profile.sup_kappa();
  if (!(d > 0.0)) throw DomainError("1 - eps*t*kappa <= 0 on grid");
  const double k = profile.sup_kappa();
  const double k1 = profile.sup_kappa_prime();
  const double k2 = profile.sup_kappa_double_prime();
  const double bound = k * k / (4.0 * d * d) + 1.25 * (eps * k1) * (eps * k1) / (d * d * d * d) +
                       0.5 * eps * k2 / (d * d * d);
  const double e1 = transverse_energy(1, disc.m * eps);
  return e1 * e1 / (eps * eps) - 1.1 * bound - 1.0;
}

// --- sandwich constant -----------------------------------------------------------

SandwichConstant estimate_sandwich_constant(const CurveProfile& profile,
                                            const StripDiscretization& disc) {
  const double eps = disc.epsilon;
  if (!(eps > 0.0)) throw DomainError("sandwich constant: eps must be positive");
  if (eps > 0.5 * epsilon0(profile))
    throw DomainError("sandwich constant: eps must not exceed epsilon0/2");
  disc.validate(profile);
  SandwichConstant out;
  if (profile.is_straight()) {
    out.derivation = "kappa == 0: fqunit and a_pm coincide, c = 0";
    return out;
  }
  const Grid1D& grid = disc.s_grid;
  const CurveSamples c = sample_curve(profile, grid);
  check_metric(c, eps);

  // β from the discrete Dirichlet form -d² - κ²/4 on the same s-grid
  const DiscretizedForm schr = assemble_schrodinger(
      [&profile](double s) {
        const double k = profile.kappa(s);
        return -k * k / 4.0;
      },
      grid);
  const SpectralResult low = lowest_eigenpairs(schr, 1);
  out.beta = std::max(0.0, -low.eigenvalues[0]) + 1e-9;
  if (out.beta >= 1.0) {
    std::ostringstream msg;
    msg << "sandwich constant: beta = " << out.beta << " >= 1, the kinetic split is unavailable";
    throw DomainError(msg.str());
  }
  const double beta = out.beta;

  std::vector<double> ts;
  if (disc.backend == TransverseBackend::galerkin)
    ts = gauss_legendre(disc.quadrature_points).nodes;
  else
    ts = tensor_basis(disc.n_t, 0.0, disc.element_points).t;

  const int n = grid.n;
  double need_minus = 0.0;  // required cε
  double need_plus = 0.0;
  for (double t : ts) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (double k : c.mid_kappa) {
      const double d = metric(eps, t, k);
      const double w = 1.0 / (d * d) - 1.0;
      lo = std::min(lo, w);
      hi = std::max(hi, w);
    }
    need_minus = std::max(need_minus, -lo);
    need_plus = std::max(need_plus, hi);
    for (int i = 0; i < n; ++i) {
      const double k = c.kappa[i];
      const double d = metric(eps, t, k);
      const double w2 = 1.0 / (d * d);
      const double w = w2 - 1.0;
      const double et1 = eps * t * c.kappa1[i];
      const double v = -1.25 * et1 * et1 * w2 * w2 - 0.5 * eps * t * c.kappa2[i] * w2 / d;
      const double minus = (beta * lo + (w - lo) * k * k / 4.0 - v) / (1.0 - beta);
      const double plus = (-beta * hi + (hi - w) * k * k / 4.0 + v) / (1.0 - beta);
      need_minus = std::max(need_minus, minus);
      need_plus = std::max(need_plus, plus);
    }
  }
  const double safety = 1.0 + 1e-9;
  out.c_minus = need_minus / eps * safety;
  out.c_plus = need_plus / eps * safety;
  out.c = std::max(out.c_minus, out.c_plus);
  std::ostringstream d;
  d.precision(10);
  d << "per t-node split on " << ts.size() << " t points, " << n
    << " s nodes: W = (1-eps t kappa)^-2 - 1 bounded over cells by [m(t), M(t)];"
    << " kinetic absorbs kappa^2/4 via beta = " << beta
    << "; c_minus eps = max(-m, (beta m + (W_i - m) kappa_i^2/4 - V_i)/(1-beta)) = " << need_minus
    << "; c_plus eps = max(M, (-beta M + (M - W_i) kappa_i^2/4 + V_i)/(1-beta)) = " << need_plus
    << "; V = -(5/4)(eps t kappa')^2 w^4 - (1/2) eps t kappa'' w^3";
  out.derivation = d.str();
  return out;
}

SandwichConstant estimate_sandwich_constant(const CurveProfile& profile, double eps) {
  StripDiscretization disc;
  disc.epsilon = eps;
  if (!(eps > 0.0)) throw DomainError("sandwich constant: eps must be positive");
  if (eps > 0.5 * epsilon0(profile))
    throw DomainError("sandwich constant: eps must not exceed epsilon0/2");
  return estimate_sandwich_constant(profile, disc);
}

}  // namespace relwave
