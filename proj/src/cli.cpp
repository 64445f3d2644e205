#include "relwave/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "relwave/asymptotics.hpp"
#include "relwave/curve_geometry.hpp"
#include "relwave/effective_operator.hpp"
#include "relwave/errors.hpp"
#include "relwave/run_config.hpp"
#include "relwave/strip_form.hpp"
#include "relwave/transverse_spectrum.hpp"

namespace relwave {

namespace {

std::string num17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

/// Rows of numbers under named columns, written as CSV or a JSON array of objects.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  std::string render(ReportFormat format) const {
    std::ostringstream out;
    if (format == ReportFormat::csv) {
      for (std::size_t c = 0; c < columns.size(); ++c) out << (c ? "," : "") << columns[c];
      out << '\n';
      for (const auto& row : rows) {
        for (std::size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << num17(row[c]);
        out << '\n';
      }
      return out.str();
    }
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& row : rows) {
      nlohmann::json obj;
      for (std::size_t c = 0; c < row.size(); ++c)
        obj[columns[c]] = std::isnan(row[c]) ? nlohmann::json(nullptr) : nlohmann::json(row[c]);
      arr.push_back(obj);
    }
    return arr.dump(2) + "\n";
  }
};

struct Common {
  std::string out_path;
  std::string format;  ///< empty: csv, or the [output] section for verify
  bool verbose = false;
  std::string config_path;

  void attach(CLI::App* sub) {
    sub->add_option("--out", out_path, "write the result table to this path");
    sub->add_option("--format", format, "csv|json")->check(CLI::IsMember({"csv", "json"}));
    sub->add_flag("--verbose", verbose, "print solver progress");
    sub->add_option("--config", config_path, "run configuration file");
  }

  ReportFormat report_format() const { return parse_format(format.empty() ? "csv" : format); }

  RunConfig config() const {
    RunConfig cfg = config_path.empty() ? RunConfig{} : load_run_config(config_path);
    cfg.solver.verbose = cfg.solver.verbose || verbose;
    return cfg;
  }

  void emit(const std::string& text, std::ostream& out) const {
    if (out_path.empty()) {
      out << text;
      return;
    }
    std::ofstream file(out_path);
    if (!file) throw std::runtime_error("cannot open '" + out_path + "' for writing");
    file << text;
    if (!file) throw std::runtime_error("write to '" + out_path + "' failed");
  }
};

/// Profile flags overriding the [profile] section of the config.
struct ProfileFlags {
  std::string name, path;
  double a = std::numeric_limits<double>::quiet_NaN();
  double sigma = std::numeric_limits<double>::quiet_NaN();
  double w = std::numeric_limits<double>::quiet_NaN();
  double c = std::numeric_limits<double>::quiet_NaN();

  void attach(CLI::App* sub) {
    sub->add_option("--profile", name, "gaussian|compact|zero|constant|profile-file|curve-file");
    sub->add_option("--a", a, "bump amplitude");
    sub->add_option("--sigma", sigma, "gaussian width")->check(CLI::PositiveNumber);
    sub->add_option("--w", w, "compact bump half width")->check(CLI::PositiveNumber);
    sub->add_option("--c", c, "constant curvature");
    sub->add_option("--path", path, "profile (s kappa) or curve (s x y) file");
  }

  ProfileSpec apply(ProfileSpec spec) const {
    if (!name.empty()) spec.name = name;
    if (!path.empty()) spec.path = path;
    if (!std::isnan(a)) spec.a = a;
    if (!std::isnan(sigma)) spec.sigma = sigma;
    if (!std::isnan(w)) spec.w = w;
    if (!std::isnan(c)) spec.c = c;
    return spec;
  }
};

// --- transverse --------------------------------------------------------------

struct TransverseArgs {
  Common common;
  double m = 0.0;
  int p_max = 3;
  int samples = 0;
};

int cmd_transverse(const TransverseArgs& args, std::ostream& out) {
  Table table;
  if (args.samples == 0) {
    table.columns = {"p", "k", "E"};
    for (int p = 1; p <= args.p_max; ++p)
      table.rows.push_back({double(p), transverse_root(p, args.m), transverse_energy(p, args.m)});
  } else {
    table.columns = {"p", "sign", "k", "E", "t", "u1", "u2"};
    for (int p = 1; p <= args.p_max; ++p)
      for (Branch b : {Branch::plus, Branch::minus}) {
        TransverseMode mode(p, args.m, b);
        for (int i = 0; i < args.samples; ++i) {
          double t = args.samples == 1 ? 0.0 : -1.0 + 2.0 * i / (args.samples - 1);
          auto u = eigenfunction_eval(mode, t);
          table.rows.push_back({double(p), b == Branch::plus ? 1.0 : -1.0, mode.k(), mode.energy(), t,
                                u(0).real(), u(1).real()});
        }
      }
  }
  args.common.emit(table.render(args.common.report_format()), out);
  return exit_ok;
}

// --- effective ---------------------------------------------------------------

struct EffectiveArgs {
  Common common;
  ProfileFlags profile;
  double L = std::numeric_limits<double>::quiet_NaN();
  int n = 0;
  int n_ev = 4;
  std::string oracle;
};

int cmd_effective(const EffectiveArgs& args, std::ostream& out) {
  RunConfig cfg = args.common.config();
  auto profile = make_profile(args.profile.apply(cfg.profile));
  Grid1D grid = cfg.disc.s_grid;
  if (!std::isnan(args.L)) grid.half_length = args.L;
  if (args.n > 0) grid.n = args.n;
  grid.validate();

  auto spec = effective_spectrum(assemble_qe(profile, grid), args.n_ev, 1e-10, cfg.solver);
  out << "J = " << spec.J << (spec.J_complete ? "" : " (lower bound)") << '\n';
  if (spec.provenance.count("warning")) out << "warning: " << spec.provenance.at("warning") << '\n';
  if (args.oracle == "shooting") {
    ShootingOptions opts;
    opts.half_length = grid.half_length;
    if (spec.J == 0) {
      out << "shooting: no bound state to compare\n";
    } else {
      auto shot = shooting_mu1(profile, opts);
      out << "mu1 grid = " << num17(spec.mu[0]) << ", shooting = " << num17(shot.mu)
          << ", difference = " << num17(spec.mu[0] - shot.mu) << '\n';
    }
  }
  Table table;
  table.columns = {"j", "mu", "residual"};
  for (std::size_t j = 0; j < spec.mu.size(); ++j)
    table.rows.push_back({double(j + 1), spec.mu[j], spec.residuals[j]});
  args.common.emit(table.render(args.common.report_format()), out);
  return exit_ok;
}

// --- strip -------------------------------------------------------------------

struct StripArgs {
  Common common;
  ProfileFlags profile;
  double eps = std::numeric_limits<double>::quiet_NaN();
  double m = std::numeric_limits<double>::quiet_NaN();
  std::string backend;
  int modes = 0;
  int n_t = 0;
  double L = std::numeric_limits<double>::quiet_NaN();
  int n_s = 0;
  int n_ev = 4;
  bool sandwich = false;
  std::string export_prefix;
};

int cmd_strip(const StripArgs& args, std::ostream& out) {
  RunConfig cfg = args.common.config();
  auto profile = make_profile(args.profile.apply(cfg.profile));
  StripDiscretization disc = cfg.disc;
  disc.epsilon = std::isnan(args.eps) ? cfg.epsilons.front() : args.eps;
  disc.m = std::isnan(args.m) ? cfg.m.front() : args.m;
  if (!args.backend.empty())
    disc.backend = args.backend == "tensor" ? TransverseBackend::tensor : TransverseBackend::galerkin;
  if (args.modes > 0) disc.modes = args.modes;
  if (args.n_t > 0) disc.n_t = args.n_t;
  if (!std::isnan(args.L)) disc.s_grid.half_length = args.L;
  if (args.n_s > 0) disc.s_grid.n = args.n_s;
  disc.validate(profile);

  double e1 = transverse_energy(1, disc.m * disc.epsilon);
  double threshold = e1 / disc.epsilon;
  out << "threshold E1/eps = " << num17(threshold) << '\n';
  Table table;
  if (args.sandwich) {
    auto rec = sandwich_report(profile, disc.m, disc.epsilon, disc, args.n_ev, std::nullopt, cfg.solver);
    out << "c = " << num17(rec.c) << ", ordering ok\n";
    table.columns = {"j", "mu_minus", "mu_fq", "mu_plus", "deviation"};
    for (int j = 0; j < args.n_ev; ++j)
      table.rows.push_back({double(j + 1), rec.mu_minus[j], rec.mu_fq[j], rec.mu_plus[j], rec.deviation[j]});
  } else {
    auto form = assemble_fqunit(profile, disc);
    if (!args.export_prefix.empty()) {
      export_coordinate(form.stiffness, args.export_prefix + "_stiffness.txt");
      export_coordinate(form.mass, args.export_prefix + "_mass.txt");
    }
    auto spec = lowest_eigenpairs(form, args.n_ev, cfg.solver);
    table.columns = {"j", "mu", "lambda", "splitting", "residual"};
    for (int j = 0; j < args.n_ev; ++j) {
      double mu = spec.eigenvalues[j];
      double lambda = std::sqrt(std::max(mu, 0.0));
      table.rows.push_back({double(j + 1), mu, lambda, (lambda - threshold) / disc.epsilon, spec.residuals[j]});
    }
  }
  args.common.emit(table.render(args.common.report_format()), out);
  return exit_ok;
}

// --- validate-curve ----------------------------------------------------------

struct ValidateArgs {
  Common common;
  ProfileFlags profile;
  double eps = std::numeric_limits<double>::quiet_NaN();
};

int cmd_validate_curve(const ValidateArgs& args, std::ostream& out) {
  RunConfig cfg = args.common.config();
  ProfileSpec spec = args.profile.apply(cfg.profile);
  auto profile = make_profile(spec);
  double eps = std::isnan(args.eps) ? cfg.epsilons.front() : args.eps;
  ValidationReport report;
  if (spec.name == "curve-file") {
    auto curve = PlanarCurve::from_samples(read_curve_file(spec.path));
    report = validate_assumptions(profile, curve, eps);
  } else {
    report = validate_assumptions(profile, eps);
  }
  nlohmann::json j = {{"profile", profile.id()},
                      {"epsilon", eps},
                      {"epsilon0", std::isinf(epsilon0(profile)) ? nlohmann::json(nullptr)
                                                                  : nlohmann::json(epsilon0(profile))},
                      {"decay_ok", report.decay_ok},
                      {"derivatives_ok", report.derivatives_ok},
                      {"injective_ok", report.injective_ok},
                      {"max_tail_sample", report.max_tail_sample},
                      {"max_kappa_prime_sample", report.max_kappa_prime_sample},
                      {"max_kappa_double_prime_sample", report.max_kappa_double_prime_sample},
                      {"reason", report.reason}};
  if (args.common.report_format() == ReportFormat::json) {
    args.common.emit(j.dump(2) + "\n", out);
  } else {
    std::ostringstream csv;
    csv << "decay_ok,derivatives_ok,injective_ok,max_tail_sample,max_kappa_prime_sample,"
           "max_kappa_double_prime_sample\n"
        << report.decay_ok << ',' << report.derivatives_ok << ',' << report.injective_ok << ','
        << num17(report.max_tail_sample) << ',' << num17(report.max_kappa_prime_sample) << ','
        << num17(report.max_kappa_double_prime_sample) << '\n';
    args.common.emit(csv.str(), out);
  }
  out << (report.all_ok() ? "assumptions hold" : "assumptions violated: " + report.reason) << '\n';
  return report.all_ok() ? exit_ok : exit_verification;
}

// --- verify ------------------------------------------------------------------

struct VerifyArgs {
  Common common;
};

struct CheckLog {
  std::ostream& out;
  bool all = true;

  void check(bool ok, const std::string& what) {
    out << (ok ? "PASS " : "FAIL ") << what << '\n';
    all = all && ok;
  }
};

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.4g", x);
  return buf;
}

int cmd_verify(const VerifyArgs& args, std::ostream& out) {
  if (args.common.config_path.empty()) throw PreconditionError("verify: --config is required");
  RunConfig cfg = args.common.config();
  cfg.validate();
  ReportFormat format = cfg.format;
  std::string out_dir = cfg.out_dir;
  if (!args.common.out_path.empty()) out_dir = args.common.out_path;
  if (!args.common.format.empty()) format = args.common.report_format();
  std::filesystem::create_directories(out_dir);

  auto profile = make_profile(cfg.profile);
  const auto& th = cfg.verify;
  CheckLog log{out};
  SweepOptions opts;
  opts.solver = cfg.solver;
  opts.degeneracy_tol = th.degeneracy_tol;

  for (double m : cfg.m) {
    std::vector<double> all_eps = cfg.epsilons;
    bool scaling = th.residual_scaling && cfg.epsilons.size() >= 3;
    std::vector<double> halved;
    if (scaling) {
      for (double e : cfg.epsilons) halved.push_back(0.5 * e);
      for (double e : halved)
        if (std::find(all_eps.begin(), all_eps.end(), e) == all_eps.end()) all_eps.push_back(e);
      std::sort(all_eps.begin(), all_eps.end(), std::greater<>());
    }
    auto full = run_epsilon_sweep(profile, m, all_eps, cfg.j_max, cfg.disc, opts);
    auto report = restrict_sweep(full, cfg.epsilons);
    std::string tag = "m=" + fmt(m) + ": ";

    if (!cfg.sandwich_epsilons.empty()) {
      double c = 0.0;
      for (double eps : cfg.sandwich_epsilons)
        c = std::max(c, estimate_sandwich_constant(profile, [&] {
                          StripDiscretization d = cfg.disc;
                          d.epsilon = eps;
                          d.m = m;
                          return d;
                        }()).c);
      for (double eps : cfg.sandwich_epsilons)
        report.sandwich.push_back(sandwich_report(profile, m, eps, cfg.disc, cfg.sandwich_n_ev, c, cfg.solver));
      log.check(true, tag + "sandwich ordering for j <= " + std::to_string(cfg.sandwich_n_ev) + ", c = " + fmt(c));
      if (report.sandwich.size() >= 2 && !profile.is_straight()) {
        const auto& a = report.sandwich[0];
        const auto& b = report.sandwich[1];
        double ratio = (a.mu_plus[0] - a.mu_minus[0]) / (b.mu_plus[0] - b.mu_minus[0]);
        double expected = a.epsilon / b.epsilon;
        log.check(std::abs(ratio / expected - 1.0) <= th.sandwich_ratio_tol,
                  tag + "sandwich gap ratio " + fmt(ratio) + " vs " + fmt(expected));
      }
    }

    int claimed = std::min(report.J, report.j_max);
    for (const auto& e : report.entries) {
      if (e.j <= claimed) {
        log.check(!e.absorbed, tag + "lambda_" + std::to_string(e.j) + " below threshold at eps " + fmt(e.epsilon));
      } else {
        log.check(e.lambda >= e.threshold * (1.0 - th.threshold_tol),
                  tag + "lambda_" + std::to_string(e.j) + " not below threshold at eps " + fmt(e.epsilon) +
                      " (no bound state claimed)");
      }
      log.check(e.pair_gap <= th.degeneracy_tol,
                tag + "pair degeneracy j=" + std::to_string(e.j) + " eps " + fmt(e.epsilon) + " gap " + fmt(e.pair_gap));
    }
    for (const auto& f : report.fits) {
      if (f.j > claimed) continue;
      log.check(f.rel_error <= th.slope_tol, tag + "slope mu_hat_" + std::to_string(f.j) + " = " + fmt(f.mu_hat) +
                                                 " vs (2/pi)mu_" + std::to_string(f.j) + " = " + fmt(f.reference) +
                                                 " rel " + fmt(f.rel_error));
    }
    for (const auto& f : report.fits) {
      if (f.j > claimed || f.points < 3) continue;
      double change = std::abs(f.mu_hat - f.mu_hat_without_largest);
      log.check(change < f.residual_norm, tag + "fit stability j=" + std::to_string(f.j) + ": dropping the largest eps moves mu_hat by " +
                                              fmt(change) + " (residual norm " + fmt(f.residual_norm) + ")");
    }
    if (scaling && claimed >= 1) {
      auto half = restrict_sweep(full, halved);
      double ratio = report.fits[0].max_residual / half.fits[0].max_residual;
      log.check(std::abs(ratio - th.residual_ratio) <= th.residual_ratio_tol * th.residual_ratio,
                tag + "fit residual ratio under halving " + fmt(ratio));
    }
    for (const auto& w : report.warnings) out << "warning: " << tag << w << '\n';

    std::string name = report_filename(profile.id(), m, cfg.epsilons.empty() ? 0.0 : cfg.epsilons.front());
    if (format == ReportFormat::json) name = name.substr(0, name.size() - 4) + ".json";
    auto path = (std::filesystem::path(out_dir) / name).string();
    emit_report(report, format, path);
    out << "report: " << path << '\n';
  }
  out << (log.all ? "verify: PASS" : "verify: FAIL") << '\n';
  return log.all ? exit_ok : exit_verification;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Spectral toolkit for the Dirac operator on thin curved strips", "relwave"};
  app.require_subcommand(1);

  TransverseArgs ta;
  auto* t = app.add_subcommand("transverse", "roots k_p(m) and energies E_p(m) of the transverse operator");
  ta.common.attach(t);
  t->add_option("--m", ta.m, "mass parameter")->check(CLI::NonNegativeNumber);
  t->add_option("--p-max", ta.p_max, "largest mode index")->check(CLI::Range(1, 1000));
  t->add_option("--samples", ta.samples, "eigenfunction samples per mode on [-1, 1]")->check(CLI::Range(0, 100000));

  EffectiveArgs ea;
  auto* e = app.add_subcommand("effective", "spectrum of the effective operator q_e");
  ea.common.attach(e);
  ea.profile.attach(e);
  e->add_option("--L", ea.L, "half length of the s-grid")->check(CLI::PositiveNumber);
  e->add_option("--n", ea.n, "interior s-nodes")->check(CLI::Range(3, 100000000));
  e->add_option("--n-ev", ea.n_ev, "eigenvalues to compute")->check(CLI::Range(1, 10000));
  e->add_option("--oracle", ea.oracle, "cross-check mu_1")->check(CLI::IsMember({"shooting"}));

  StripArgs sa;
  auto* s = app.add_subcommand("strip", "lowest values of the squared operator's quadratic form on the strip");
  sa.common.attach(s);
  sa.profile.attach(s);
  s->add_option("--eps", sa.eps, "strip half width")->check(CLI::PositiveNumber);
  s->add_option("--m", sa.m, "mass parameter")->check(CLI::NonNegativeNumber);
  s->add_option("--backend", sa.backend, "galerkin|tensor")->check(CLI::IsMember({"galerkin", "tensor"}));
  s->add_option("--P", sa.modes, "transverse modes (galerkin)")->check(CLI::Range(1, 1000));
  s->add_option("--n-t", sa.n_t, "transverse intervals (tensor)")->check(CLI::Range(2, 100000));
  s->add_option("--L", sa.L, "half length of the s-grid")->check(CLI::PositiveNumber);
  s->add_option("--n-s", sa.n_s, "interior s-nodes")->check(CLI::Range(3, 100000000));
  s->add_option("--n-ev", sa.n_ev, "eigenvalues to compute")->check(CLI::Range(1, 10000));
  s->add_flag("--sandwich", sa.sandwich, "also assemble a_- and a_+ and check the ordering");
  s->add_option("--export", sa.export_prefix, "write stiffness and mass in coordinate format");

  VerifyArgs va;
  auto* v = app.add_subcommand("verify", "epsilon sweep against the predicted asymptotics");
  va.common.attach(v);

  ValidateArgs la;
  auto* l = app.add_subcommand("validate-curve", "check decay, derivative bounds and injectivity");
  la.common.attach(l);
  la.profile.attach(l);
  l->add_option("--eps", la.eps, "strip half width")->check(CLI::PositiveNumber);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return exit_ok;
  } catch (const CLI::ParseError& ex) {
    err << "error: " << ex.what() << "\n\n" << app.help();
    return exit_usage;
  }

  try {
    if (t->parsed()) return cmd_transverse(ta, out);
    if (e->parsed()) return cmd_effective(ea, out);
    if (s->parsed()) return cmd_strip(sa, out);
    if (v->parsed()) return cmd_verify(va, out);
    if (l->parsed()) return cmd_validate_curve(la, out);
  } catch (const std::exception& ex) {
    err << "error: " << ex.what() << '\n';
    return exit_runtime;
  }
  return exit_usage;
}

}  // namespace relwave
