#include "relwave/run_config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "CLI11.hpp"
#include "relwave/errors.hpp"

namespace relwave {

CurveProfile make_profile(const ProfileSpec& spec) {
  if (spec.name == "gaussian") return gaussian_bump(spec.a, spec.sigma);
  if (spec.name == "compact") return compact_bump(spec.a, spec.w);
  if (spec.name == "zero") return zero_profile();
  if (spec.name == "constant") return constant_profile(spec.c);
  if (spec.name == "profile-file") return read_profile_file(spec.path);
  if (spec.name == "curve-file") return curvature_from_parametrization(read_curve_file(spec.path));
  throw PreconditionError("unknown profile '" + spec.name +
                          "' (gaussian|compact|zero|constant|profile-file|curve-file)");
}

namespace {

std::string joined(const std::vector<std::string>& inputs) {
  std::string out;
  for (std::size_t i = 0; i < inputs.size(); ++i) out += (i ? "," : "") + inputs[i];
  return out;
}

double to_double(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  double x = 0.0;
  try {
    x = std::stod(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != v.size()) throw PreconditionError("config: " + key + ": not a number: '" + v + "'");
  return x;
}

int to_int(const std::string& key, const std::string& v) {
  double x = to_double(key, v);
  if (x != std::floor(x) || std::abs(x) > 1e9) throw PreconditionError("config: " + key + ": not an integer");
  return static_cast<int>(x);
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw PreconditionError("config: " + key + ": not a boolean: '" + v + "'");
}

std::vector<double> to_list(const std::string& key, const std::vector<std::string>& inputs) {
  std::vector<double> out;
  for (const auto& item : inputs) {
    std::stringstream parts(item);
    std::string part;
    while (std::getline(parts, part, ',')) {
      auto b = part.find_first_not_of(" \t");
      auto e = part.find_last_not_of(" \t");
      if (b == std::string::npos) continue;
      out.push_back(to_double(key, part.substr(b, e - b + 1)));
    }
  }
  return out;
}

}  // namespace

RunConfig parse_run_config(const std::string& text) {
  std::istringstream in(text);
  std::vector<CLI::ConfigItem> items;
  try {
    items = CLI::ConfigTOML().from_config(in);
  } catch (const CLI::Error& e) {
    throw PreconditionError(std::string("config: ") + e.what());
  }
  RunConfig cfg;
  for (const auto& item : items) {
    if (item.name == "++" || item.name == "--") continue;
    const std::string key = item.fullname();
    const std::string v = joined(item.inputs);
    if (key == "profile.name") cfg.profile.name = v;
    else if (key == "profile.a") cfg.profile.a = to_double(key, v);
    else if (key == "profile.sigma") cfg.profile.sigma = to_double(key, v);
    else if (key == "profile.w") cfg.profile.w = to_double(key, v);
    else if (key == "profile.c") cfg.profile.c = to_double(key, v);
    else if (key == "profile.path") cfg.profile.path = v;
    else if (key == "sweep.m") cfg.m = to_list(key, item.inputs);
    else if (key == "sweep.epsilons") cfg.epsilons = to_list(key, item.inputs);
    else if (key == "sweep.j_max") cfg.j_max = to_int(key, v);
    else if (key == "sweep.sandwich_epsilons") cfg.sandwich_epsilons = to_list(key, item.inputs);
    else if (key == "sweep.sandwich_n_ev") cfg.sandwich_n_ev = to_int(key, v);
    else if (key == "grid.L") cfg.disc.s_grid.half_length = to_double(key, v);
    else if (key == "grid.n_s") cfg.disc.s_grid.n = to_int(key, v);
    else if (key == "grid.backend") {
      if (v == "galerkin") cfg.disc.backend = TransverseBackend::galerkin;
      else if (v == "tensor") cfg.disc.backend = TransverseBackend::tensor;
      else throw PreconditionError("config: grid.backend: expected galerkin or tensor");
    }
    else if (key == "grid.P") cfg.disc.modes = to_int(key, v);
    else if (key == "grid.t_points") cfg.disc.quadrature_points = to_int(key, v);
    else if (key == "grid.n_t") cfg.disc.n_t = to_int(key, v);
    else if (key == "grid.element_points") cfg.disc.element_points = to_int(key, v);
    else if (key == "solver.tol") cfg.solver.tol = to_double(key, v);
    else if (key == "solver.max_cycles") cfg.solver.max_cycles = to_int(key, v);
    else if (key == "solver.seed") cfg.solver.seed = static_cast<unsigned>(to_int(key, v));
    else if (key == "verify.slope_tol") cfg.verify.slope_tol = to_double(key, v);
    else if (key == "verify.residual_scaling") cfg.verify.residual_scaling = to_bool(key, v);
    else if (key == "verify.residual_ratio") cfg.verify.residual_ratio = to_double(key, v);
    else if (key == "verify.residual_ratio_tol") cfg.verify.residual_ratio_tol = to_double(key, v);
    else if (key == "verify.degeneracy_tol") cfg.verify.degeneracy_tol = to_double(key, v);
    else if (key == "verify.threshold_tol") cfg.verify.threshold_tol = to_double(key, v);
    else if (key == "verify.sandwich_ratio_tol") cfg.verify.sandwich_ratio_tol = to_double(key, v);
    else if (key == "output.dir") cfg.out_dir = v;
    else if (key == "output.format") cfg.format = parse_format(v);
    else throw PreconditionError("config: unknown key '" + key + "'");
  }
  return cfg;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read config '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_run_config(buf.str());
}

void RunConfig::validate() const {
  auto profile_obj = make_profile(profile);
  if (m.empty()) throw PreconditionError("config: sweep.m is empty");
  for (double mm : m)
    if (!(mm >= 0.0) || !std::isfinite(mm)) throw PreconditionError("config: m must be finite and >= 0");
  if (j_max < 1) throw PreconditionError("config: sweep.j_max must be >= 1");
  if (sandwich_n_ev < 1) throw PreconditionError("config: sweep.sandwich_n_ev must be >= 1");
  if (!(solver.tol > 0.0)) throw PreconditionError("config: solver.tol must be positive");
  if (solver.max_cycles < 1) throw PreconditionError("config: solver.max_cycles must be >= 1");
  double half_eps0 = 0.5 * epsilon0(profile_obj);
  auto check_eps = [&](const std::vector<double>& list, const char* name) {
    for (std::size_t i = 0; i < list.size(); ++i) {
      if (!(list[i] > 0.0)) throw PreconditionError(std::string("config: ") + name + ": epsilon must be positive");
      if (!(list[i] < half_eps0)) {
        std::ostringstream msg;
        msg << "config: " << name << ": epsilon " << list[i] << " not below eps0/2 = " << half_eps0;
        throw PreconditionError(msg.str());
      }
      if (i > 0 && !(list[i] < list[i - 1]))
        throw PreconditionError(std::string("config: ") + name + " must be decreasing");
    }
  };
  check_eps(epsilons, "sweep.epsilons");
  check_eps(sandwich_epsilons, "sweep.sandwich_epsilons");
  for (double mm : m) {
    StripDiscretization d = disc;
    d.m = mm;
    for (double eps : epsilons) {
      d.epsilon = eps;
      d.validate(profile_obj);
    }
  }
}

}  // namespace relwave
