#include "relwave/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "relwave/effective_operator.hpp"
#include "relwave/errors.hpp"
#include "relwave/parallel.hpp"
#include "relwave/transverse_spectrum.hpp"

namespace relwave {

namespace {

std::string num17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string num_short(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%g", x);
  return buf;
}

}  // namespace

DiracEigenvalues dirac_eigenvalues_from_square(const std::vector<double>& square, int j_max,
                                               double degeneracy_tol, double slack) {
  if (j_max < 0) throw PreconditionError("dirac eigenvalues: j_max must be >= 0");
  if (static_cast<int>(square.size()) < 2 * j_max) {
    std::ostringstream msg;
    msg << "dirac eigenvalues: need " << 2 * j_max << " values of the square, got " << square.size();
    throw PreconditionError(msg.str());
  }
  DiracEigenvalues out;
  for (int j = 1; j <= j_max; ++j) {
    double lo = square[2 * j - 2];
    double hi = square[2 * j - 1];
    if (hi < -slack * std::max(1.0, std::abs(hi))) {
      std::ostringstream msg;
      msg << "dirac eigenvalues: mu_" << 2 * j << " = " << hi << " < 0";
      throw OrderingError(msg.str());
    }
    double gap = std::abs(hi - lo) / std::max(std::abs(hi), std::numeric_limits<double>::min());
    out.lambda.push_back(std::sqrt(std::max(hi, 0.0)));
    out.pair_gap.push_back(gap);
    if (gap > degeneracy_tol) {
      std::ostringstream msg;
      msg << "pair (" << 2 * j - 1 << ", " << 2 * j << ") not degenerate: relative gap " << gap;
      out.warnings.push_back(msg.str());
    }
  }
  return out;
}

DiracEigenvalues dirac_eigenvalues_from_square(const SpectralResult& square, int j_max,
                                               double degeneracy_tol, double slack) {
  std::vector<double> values(square.eigenvalues.data(),
                             square.eigenvalues.data() + square.eigenvalues.size());
  return dirac_eigenvalues_from_square(values, j_max, degeneracy_tol, slack);
}

std::pair<double, double> fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw PreconditionError("fit_line: need >= 2 points");
  double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0) throw PreconditionError("fit_line: abscissae coincide");
  double slope = sxy / sxx;
  return {my - slope * mx, slope};
}

namespace {

// Least-squares fits per j over the entries below threshold, and ε₁.
void fit_sweep(AsymptoticReport& report) {
  report.fits.clear();
  for (auto& e : report.entries) e.fit_residual = 0.0;
  for (int j = 1; j <= report.j_max; ++j) {
    SlopeFit fit;
    fit.j = j;
    fit.reference = (2.0 / std::numbers::pi) * report.mu_effective[j - 1];
    std::vector<double> x, y;
    std::vector<SweepEntry*> used;
    for (auto& e : report.entries)
      if (e.j == j && !e.absorbed) {
        x.push_back(e.epsilon);
        y.push_back(e.splitting);
        used.push_back(&e);
      }
    fit.points = static_cast<int>(x.size());
    double nan = std::numeric_limits<double>::quiet_NaN();
    fit.mu_hat_without_largest = nan;
    if (x.size() >= 2) {
      auto [a, b] = fit_line(x, y);
      fit.mu_hat = a;
      fit.slope = b;
      for (std::size_t k = 0; k < x.size(); ++k) {
        used[k]->fit_residual = y[k] - a - b * x[k];
        fit.max_residual = std::max(fit.max_residual, std::abs(used[k]->fit_residual));
        fit.residual_norm += used[k]->fit_residual * used[k]->fit_residual;
      }
      fit.residual_norm = std::sqrt(fit.residual_norm);
      if (x.size() >= 3) {
        // entries follow the decreasing ε order, so the largest is first
        std::vector<double> xr(x.begin() + 1, x.end()), yr(y.begin() + 1, y.end());
        fit.mu_hat_without_largest = fit_line(xr, yr).first;
      }
    } else if (x.size() == 1) {
      fit.mu_hat = y[0];
      fit.slope = nan;
    } else {
      fit.mu_hat = nan;
      fit.slope = nan;
      if (report.mu_effective[j - 1] < 0.0)
        report.warnings.push_back("j = " + std::to_string(j) + ": every entry absorbed");
    }
    fit.rel_error = std::abs(fit.mu_hat - fit.reference) / std::abs(fit.reference);
    report.fits.push_back(fit);
  }

  report.epsilon1 = 0.0;
  for (std::size_t i = report.epsilons.size(); i-- > 0;) {
    bool below = true;
    for (const auto& e : report.entries)
      if (e.epsilon == report.epsilons[i] && report.mu_effective[e.j - 1] < 0.0 && e.absorbed) below = false;
    if (!below) break;
    report.epsilon1 = report.epsilons[i];
  }

}

}  // namespace

AsymptoticReport run_epsilon_sweep(const CurveProfile& profile, double m,
                                   const std::vector<double>& epsilons, int j_max,
                                   const StripDiscretization& disc, const SweepOptions& options) {
  if (j_max < 1) throw PreconditionError("sweep: j_max must be >= 1");
  if (!(m >= 0.0) || !std::isfinite(m)) throw DomainError("sweep: m must be finite and >= 0");
  double eps0 = epsilon0(profile);
  for (std::size_t i = 0; i < epsilons.size(); ++i) {
    double eps = epsilons[i];
    if (!(eps > 0.0)) throw DomainError("sweep: epsilon must be positive");
    if (!(eps < 0.5 * eps0)) {
      std::ostringstream msg;
      msg << "sweep: epsilon " << eps << " not below eps0/2 = " << 0.5 * eps0;
      throw DomainError(msg.str());
    }
    if (i > 0 && !(eps < epsilons[i - 1])) throw DomainError("sweep: epsilons must be decreasing");
  }

  AsymptoticReport report;
  report.profile_id = profile.id();
  report.m = m;
  report.j_max = j_max;
  report.epsilons = epsilons;

  auto qe = effective_spectrum(assemble_qe(profile, disc.s_grid), j_max, 1e-10, options.solver);
  report.mu_effective.assign(qe.mu.begin(), qe.mu.begin() + j_max);
  report.J = qe.J;
  if (qe.provenance.count("warning")) report.warnings.push_back(qe.provenance.at("warning"));

  struct PointResult {
    DiracEigenvalues dirac;
    std::map<std::string, std::string> provenance;
  };
  std::vector<PointResult> points(epsilons.size());
  auto solve_point = [&](int i) {
    StripDiscretization d = disc;
    d.epsilon = epsilons[i];
    d.m = m;
    auto form = assemble_fqunit(profile, d);
    auto spec = lowest_eigenpairs(form, 2 * j_max, options.solver);
    points[i].dirac = dirac_eigenvalues_from_square(spec, j_max, options.degeneracy_tol);
    points[i].provenance = form.provenance;
    points[i].provenance["solver"] = spec.solver;
    points[i].provenance["iterations"] = std::to_string(spec.iterations);
  };
  if (options.parallel)
    parallel_for(static_cast<int>(epsilons.size()), solve_point);
  else
    for (int i = 0; i < static_cast<int>(epsilons.size()); ++i) solve_point(i);

  for (std::size_t i = 0; i < epsilons.size(); ++i) {
    double eps = epsilons[i];
    double threshold = essential_threshold(m, eps);
    for (int j = 1; j <= j_max; ++j) {
      SweepEntry e;
      e.j = j;
      e.epsilon = eps;
      e.lambda = points[i].dirac.lambda[j - 1];
      e.threshold = threshold;
      e.splitting = (e.lambda - threshold) / eps;
      e.absorbed = !(e.lambda < threshold);
      e.pair_gap = points[i].dirac.pair_gap[j - 1];
      report.entries.push_back(e);
    }
    for (const auto& w : points[i].dirac.warnings)
      report.warnings.push_back("epsilon " + num_short(eps) + ": " + w);
  }

  fit_sweep(report);

  auto& prov = report.provenance;
  prov["profile"] = profile.id();
  prov["m"] = num17(m);
  prov["backend"] = to_string(disc.backend);
  prov["L"] = num17(disc.s_grid.half_length);
  prov["n_s"] = std::to_string(disc.s_grid.n);
  if (disc.backend == TransverseBackend::galerkin) {
    prov["P"] = std::to_string(disc.modes);
    prov["t_points"] = std::to_string(disc.quadrature_points);
  } else {
    prov["n_t"] = std::to_string(disc.n_t);
    prov["element_points"] = std::to_string(disc.element_points);
  }
  prov["tol"] = num17(options.solver.tol);
  prov["seed"] = std::to_string(options.solver.seed);
  prov["degeneracy_tol"] = num17(options.degeneracy_tol);
  prov["reference"] = "finite-difference q_e on the same s-grid";
  for (std::size_t i = 0; i < epsilons.size(); ++i)
    prov["solver_eps_" + num_short(epsilons[i])] =
        points[i].provenance["solver"] + ", " + points[i].provenance["iterations"] + " cycles";
  return report;
}

AsymptoticReport restrict_sweep(const AsymptoticReport& report, const std::vector<double>& epsilons) {
  AsymptoticReport out = report;
  out.epsilons = epsilons;
  out.entries.clear();
  for (double eps : epsilons) {
    bool found = false;
    for (const auto& e : report.entries)
      if (e.epsilon == eps) {
        out.entries.push_back(e);
        found = true;
      }
    if (!found) throw PreconditionError("restrict_sweep: epsilon " + num_short(eps) + " not in the sweep");
  }
  std::vector<std::string> solver_keys;
  for (const auto& [k, v] : out.provenance)
    if (k.rfind("solver_eps_", 0) == 0) solver_keys.push_back(k);
  for (const auto& k : solver_keys) {
    bool keep = false;
    for (double eps : epsilons) keep = keep || k == "solver_eps_" + num_short(eps);
    if (!keep) out.provenance.erase(k);
  }
  fit_sweep(out);
  return out;
}

SandwichRecord sandwich_report(const CurveProfile& profile, double m, double eps,
                               const StripDiscretization& disc, int n_ev, std::optional<double> c,
                               const SolverOptions& solver, double slack) {
  if (n_ev < 1) throw PreconditionError("sandwich: n_ev must be >= 1");
  StripDiscretization d = disc;
  d.epsilon = eps;
  d.m = m;
  SandwichRecord rec;
  rec.epsilon = eps;
  rec.m = m;
  rec.c = c ? *c : estimate_sandwich_constant(profile, d).c;
  double e1 = transverse_energy(1, m * eps);
  rec.square_threshold = e1 * e1 / (eps * eps);

  auto values = [&](const DiscretizedForm& form) {
    auto r = lowest_eigenpairs(form, n_ev, solver);
    return std::vector<double>(r.eigenvalues.data(), r.eigenvalues.data() + n_ev);
  };
  rec.mu_minus = values(assemble_a_pm(profile, d, rec.c, SandwichSign::minus));
  rec.mu_fq = values(assemble_fqunit(profile, d));
  rec.mu_plus = values(assemble_a_pm(profile, d, rec.c, SandwichSign::plus));

  int n_eff = (n_ev + 1) / 2;
  auto qe = effective_spectrum(assemble_qe(profile, d.s_grid), n_eff, 1e-10, solver);
  for (int j = 0; j < n_ev; ++j) {
    double pair = qe.mu[j / 2];
    rec.mu_effective_pair.push_back(pair);
    rec.deviation.push_back(rec.mu_fq[j] - rec.square_threshold - pair);
  }

  std::ostringstream violations;
  for (int j = 0; j < n_ev; ++j) {
    double scale = slack * std::max({1.0, std::abs(rec.mu_fq[j])});
    if (rec.mu_minus[j] > rec.mu_fq[j] + scale)
      violations << " mu_" << j + 1 << "(a_-) = " << num17(rec.mu_minus[j]) << " > mu_" << j + 1
                 << "(fq) = " << num17(rec.mu_fq[j]) << ";";
    if (rec.mu_fq[j] > rec.mu_plus[j] + scale)
      violations << " mu_" << j + 1 << "(fq) = " << num17(rec.mu_fq[j]) << " > mu_" << j + 1
                 << "(a_+) = " << num17(rec.mu_plus[j]) << ";";
  }
  rec.ordering_ok = violations.str().empty();
  if (!rec.ordering_ok)
    throw OrderingError("sandwich ordering violated at epsilon " + num_short(eps) + ", c = " +
                        num17(rec.c) + ":" + violations.str());
  return rec;
}

ReportFormat parse_format(const std::string& name) {
  if (name == "csv") return ReportFormat::csv;
  if (name == "json") return ReportFormat::json;
  throw PreconditionError("unknown format '" + name + "' (csv|json)");
}

namespace {

using nlohmann::json;

json to_json_value(const SweepEntry& e) {
  return {{"j", e.j},           {"epsilon", e.epsilon},   {"lambda", e.lambda},
          {"threshold", e.threshold}, {"splitting", e.splitting}, {"absorbed", e.absorbed},
          {"pair_gap", e.pair_gap}, {"fit_residual", e.fit_residual}};
}

// JSON has no NaN; null stands for it.
json maybe(double x) { return std::isnan(x) ? json(nullptr) : json(x); }
double unmaybe(const json& v) {
  return v.is_null() ? std::numeric_limits<double>::quiet_NaN() : v.get<double>();
}

json to_json_value(const SlopeFit& f) {
  return {{"j", f.j},
          {"points", f.points},
          {"mu_hat", maybe(f.mu_hat)},
          {"slope", maybe(f.slope)},
          {"max_residual", f.max_residual},
          {"residual_norm", f.residual_norm},
          {"reference", f.reference},
          {"rel_error", maybe(f.rel_error)},
          {"mu_hat_without_largest", maybe(f.mu_hat_without_largest)}};
}

json to_json_value(const SandwichRecord& r) {
  return {{"epsilon", r.epsilon},
          {"m", r.m},
          {"c", r.c},
          {"square_threshold", r.square_threshold},
          {"mu_minus", r.mu_minus},
          {"mu_fq", r.mu_fq},
          {"mu_plus", r.mu_plus},
          {"mu_effective_pair", r.mu_effective_pair},
          {"deviation", r.deviation},
          {"ordering_ok", r.ordering_ok}};
}

}  // namespace

std::string format_report(const AsymptoticReport& report, ReportFormat format) {
  if (format == ReportFormat::csv) {
    std::ostringstream out;
    out << "j,epsilon,lambda,threshold,splitting,mu_hat,reference,rel_error\n";
    for (const auto& e : report.entries) {
      const SlopeFit* fit = nullptr;
      for (const auto& f : report.fits)
        if (f.j == e.j) fit = &f;
      double nan = std::numeric_limits<double>::quiet_NaN();
      out << e.j << ',' << num17(e.epsilon) << ',' << num17(e.lambda) << ',' << num17(e.threshold)
          << ',' << num17(e.splitting) << ',' << num17(fit ? fit->mu_hat : nan) << ','
          << num17(fit ? fit->reference : nan) << ',' << num17(fit ? fit->rel_error : nan) << '\n';
    }
    return out.str();
  }
  json j;
  j["profile"] = report.profile_id;
  j["m"] = report.m;
  j["j_max"] = report.j_max;
  j["epsilons"] = report.epsilons;
  j["mu_effective"] = report.mu_effective;
  j["J"] = report.J;
  j["epsilon1"] = report.epsilon1;
  j["entries"] = json::array();
  for (const auto& e : report.entries) j["entries"].push_back(to_json_value(e));
  j["fits"] = json::array();
  for (const auto& f : report.fits) j["fits"].push_back(to_json_value(f));
  j["sandwich"] = json::array();
  for (const auto& s : report.sandwich) j["sandwich"].push_back(to_json_value(s));
  j["warnings"] = report.warnings;
  j["provenance"] = report.provenance;
  return j.dump(2) + "\n";
}

void emit_report(const AsymptoticReport& report, ReportFormat format, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << format_report(report, format);
  if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

AsymptoticReport parse_report_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw PreconditionError(std::string("report: invalid JSON: ") + e.what());
  }
  try {
    AsymptoticReport r;
    r.profile_id = j.at("profile").get<std::string>();
    r.m = j.at("m").get<double>();
    r.j_max = j.at("j_max").get<int>();
    r.epsilons = j.at("epsilons").get<std::vector<double>>();
    r.mu_effective = j.at("mu_effective").get<std::vector<double>>();
    r.J = j.at("J").get<int>();
    r.epsilon1 = j.at("epsilon1").get<double>();
    for (const auto& v : j.at("entries")) {
      SweepEntry e;
      e.j = v.at("j").get<int>();
      e.epsilon = v.at("epsilon").get<double>();
      e.lambda = v.at("lambda").get<double>();
      e.threshold = v.at("threshold").get<double>();
      e.splitting = v.at("splitting").get<double>();
      e.absorbed = v.at("absorbed").get<bool>();
      e.pair_gap = v.at("pair_gap").get<double>();
      e.fit_residual = v.at("fit_residual").get<double>();
      r.entries.push_back(e);
    }
    for (const auto& v : j.at("fits")) {
      SlopeFit f;
      f.j = v.at("j").get<int>();
      f.points = v.at("points").get<int>();
      f.mu_hat = unmaybe(v.at("mu_hat"));
      f.slope = unmaybe(v.at("slope"));
      f.max_residual = v.at("max_residual").get<double>();
      f.residual_norm = v.at("residual_norm").get<double>();
      f.reference = v.at("reference").get<double>();
      f.rel_error = unmaybe(v.at("rel_error"));
      f.mu_hat_without_largest = unmaybe(v.at("mu_hat_without_largest"));
      r.fits.push_back(f);
    }
    for (const auto& v : j.at("sandwich")) {
      SandwichRecord s;
      s.epsilon = v.at("epsilon").get<double>();
      s.m = v.at("m").get<double>();
      s.c = v.at("c").get<double>();
      s.square_threshold = v.at("square_threshold").get<double>();
      s.mu_minus = v.at("mu_minus").get<std::vector<double>>();
      s.mu_fq = v.at("mu_fq").get<std::vector<double>>();
      s.mu_plus = v.at("mu_plus").get<std::vector<double>>();
      s.mu_effective_pair = v.at("mu_effective_pair").get<std::vector<double>>();
      s.deviation = v.at("deviation").get<std::vector<double>>();
      s.ordering_ok = v.at("ordering_ok").get<bool>();
      r.sandwich.push_back(s);
    }
    r.warnings = j.at("warnings").get<std::vector<std::string>>();
    r.provenance = j.at("provenance").get<std::map<std::string, std::string>>();
    return r;
  } catch (const json::exception& e) {
    throw PreconditionError(std::string("report: malformed field: ") + e.what());
  }
}

std::string report_filename(const std::string& profile_id, double m, double epsilon) {
  return profile_id + "_" + num_short(m) + "_" + num_short(epsilon) + ".csv";
}

}  // namespace relwave
