#include "gstlab/config.hpp"

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "gstlab/errors.hpp"

namespace gstlab {

namespace {

void check_keys(const json& j, const std::string& path, const std::set<std::string>& allowed) {
  if (!j.is_object()) throw ConfigError(path, "expected an object");
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!allowed.count(it.key())) throw ConfigError(path + "." + it.key(), "unknown key");
}

double num(const json& j, const std::string& key, const std::string& path, double dflt) {
  if (!j.contains(key)) return dflt;
  if (!j[key].is_number()) throw ConfigError(path + "." + key, "expected a number");
  return j[key].get<double>();
}

double num_required(const json& j, const std::string& key, const std::string& path) {
  if (!j.contains(key)) throw ConfigError(path + "." + key, "missing required value");
  return num(j, key, path, 0.0);
}

long long integer(const json& j, const std::string& key, const std::string& path, long long dflt) {
  if (!j.contains(key)) return dflt;
  if (!j[key].is_number_integer()) throw ConfigError(path + "." + key, "expected an integer");
  return j[key].get<long long>();
}

template <class F>
auto rethrow_as_config(const std::string& path, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(path, e.what());
  }
}

}  // namespace

json to_json(const DensityProfile& p) {
  return json{{"d", p.d}, {"alpha", p.alpha}, {"mu", p.mu}, {"beta", p.beta}, {"gamma", p.gamma}};
}

DensityProfile density_profile_from_json(const json& j, const std::string& path) {
  check_keys(j, path, {"d", "alpha", "mu", "beta", "gamma"});
  DensityProfile p;
  p.d = static_cast<int>(integer(j, "d", path, 1));
  p.alpha = num(j, "alpha", path, p.alpha);
  p.mu = num(j, "mu", path, p.mu);
  p.beta = num(j, "beta", path, p.beta);
  p.gamma = num(j, "gamma", path, p.gamma);
  rethrow_as_config(path, [&] {
    p.validate();
    return 0;
  });
  return p;
}

json to_json(const LevyModel& m) {
  const auto& p = m.density_profile();
  json j;
  j["family"] = to_string(m.symbol_form());
  j["d"] = m.dim();
  switch (m.symbol_form()) {
    case SymbolForm::Brownian:
      break;
    case SymbolForm::Stable:
    case SymbolForm::StableDiffusion:
      j["alpha"] = p.alpha;
      break;
    case SymbolForm::Relativistic:
      j["alpha"] = p.alpha;
      j["mass"] = m.mass();
      break;
    case SymbolForm::GenericFromDensity:
      j["alpha"] = p.alpha;
      j["mu"] = p.mu;
      j["beta"] = p.beta;
      j["gamma"] = p.gamma;
      j["jump_scale"] = m.jump_scale();
      break;
  }
  j["sigma2"] = m.diffusion_coeff();
  return j;
}

LevyModel levy_model_from_json(const json& j, const std::string& path) {
  check_keys(j, path, {"family", "d", "alpha", "mu", "beta", "gamma", "sigma2", "mass", "jump_scale"});
  if (!j.contains("family") || !j["family"].is_string())
    throw ConfigError(path + ".family", "missing or not a string");
  SymbolForm form;
  try {
    form = symbol_form_from_string(j["family"].get<std::string>());
  } catch (const Error& e) {
    throw ConfigError(path + ".family", e.what());
  }
  const int d = static_cast<int>(integer(j, "d", path, 1));
  const double sigma2 = num(j, "sigma2", path, form == SymbolForm::Brownian ? 1.0 : 0.0);
  return rethrow_as_config(path, [&]() -> LevyModel {
    switch (form) {
      case SymbolForm::Brownian: return LevyModel::brownian(d, sigma2);
      case SymbolForm::Stable:
        if (sigma2 != 0.0) throw ConfigError(path + ".sigma2", "stable family has no diffusion part");
        return LevyModel::stable(d, num_required(j, "alpha", path));
      case SymbolForm::StableDiffusion:
        return LevyModel::stable_with_diffusion(d, num_required(j, "alpha", path), sigma2);
      case SymbolForm::Relativistic:
        return LevyModel::relativistic(d, num_required(j, "alpha", path),
                                       num_required(j, "mass", path));
      case SymbolForm::GenericFromDensity: {
        DensityProfile p;
        p.d = d;
        p.alpha = num_required(j, "alpha", path);
        p.mu = num(j, "mu", path, 0.0);
        p.beta = num(j, "beta", path, 0.0);
        p.gamma = num_required(j, "gamma", path);
        return LevyModel::from_density(p, sigma2, num(j, "jump_scale", path, 1.0));
      }
    }
    throw ConfigError(path + ".family", "unhandled family");
  });
}

json to_json(const Potential& v) {
  if (!v.is_radial())
    throw Error(ErrorCode::InvalidArgument, "custom potentials are not serialisable");
  json j;
  j["family"] = to_string(v.family());
  for (const auto& [k, x] : v.params()) {
    if (k == "n")
      j[k] = static_cast<int>(x);
    else
      j[k] = x;
  }
  return j;
}

Potential potential_from_json(const json& j, const std::string& path) {
  if (!j.is_object()) throw ConfigError(path, "expected an object");
  if (!j.contains("family") || !j["family"].is_string())
    throw ConfigError(path + ".family", "missing or not a string");
  const std::string fam = j["family"].get<std::string>();
  if (fam == "ornstein_uhlenbeck") {
    check_keys(j, path, {"family", "gamma"});
    return rethrow_as_config(path, [&] {
      return Potential::ornstein_uhlenbeck(num_required(j, "gamma", path));
    });
  }
  PotentialFamily family;
  try {
    family = potential_family_from_string(fam);
  } catch (const Error& e) {
    throw ConfigError(path + ".family", "unknown potential family '" + fam + "'");
  }
  std::map<std::string, double> params;
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (it.key() == "family") continue;
    if (!it.value().is_number()) throw ConfigError(path + "." + it.key(), "expected a number");
    params[it.key()] = it.value().get<double>();
  }
  Potential v = rethrow_as_config(path, [&] { return Potential::from_params(family, params); });
  const auto known = v.params();
  for (const auto& [k, x] : params)
    if (!known.count(k)) throw ConfigError(path + "." + k, "unknown parameter for family " + fam);
  return v;
}

json to_json(const Grid& g) { return json{{"d", g.d}, {"half_width", g.half_width}, {"n", g.n}}; }

Grid grid_from_json(const json& j, const std::string& path) {
  check_keys(j, path, {"d", "half_width", "n"});
  Grid g;
  g.d = static_cast<int>(integer(j, "d", path, g.d));
  g.half_width = num(j, "half_width", path, g.half_width);
  g.n = static_cast<int>(integer(j, "n", path, g.n));
  rethrow_as_config(path, [&] {
    g.validate();
    return 0;
  });
  return g;
}

std::uint64_t model_potential_hash(const LevyModel& m, const Potential& v) {
  std::string s = to_json(m).dump();
  s += v.is_radial() ? to_json(v).dump() : "custom:" + v.label();
  return fnv1a64(s.data(), s.size());
}

std::string hex64(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string ExperimentConfig::hash() const {
  json j = resolved;
  j.erase("seed");
  j.erase("threads");
  j.erase("out_dir");
  const std::string s = j.dump();
  return hex64(fnv1a64(s.data(), s.size()));
}

ExperimentConfig parse_config(const json& j) {
  check_keys(j, "config", {"model", "potential", "grid", "solve", "sampler", "profile", "envelope",
                           "seed", "threads", "out_dir"});
  ExperimentConfig c;
  if (!j.contains("model")) throw ConfigError("model", "missing required section");
  if (!j.contains("potential")) throw ConfigError("potential", "missing required section");
  c.model = levy_model_from_json(j["model"], "model");
  c.potential = potential_from_json(j["potential"], "potential");
  c.grid.d = c.model.dim();
  if (j.contains("grid")) {
    json g = j["grid"];
    if (g.is_object() && !g.contains("d")) g["d"] = c.model.dim();
    c.grid = grid_from_json(g, "grid");
  }
  if (c.grid.d != c.model.dim()) throw ConfigError("grid.d", "differs from model.d");

  if (j.contains("solve")) {
    const json& s = j["solve"];
    check_keys(s, "solve", {"n_modes", "tol", "auto_expand", "boundary_target", "max_n", "gap_tol"});
    c.solve.n_modes = static_cast<int>(integer(s, "n_modes", "solve", c.solve.n_modes));
    c.solve.tol = num(s, "tol", "solve", c.solve.tol);
    if (s.contains("auto_expand")) {
      if (!s["auto_expand"].is_boolean()) throw ConfigError("solve.auto_expand", "expected a boolean");
      c.solve.auto_expand = s["auto_expand"];
    }
    c.solve.boundary_target = num(s, "boundary_target", "solve", c.solve.boundary_target);
    c.solve.max_n = static_cast<int>(integer(s, "max_n", "solve", c.solve.max_n));
    c.solve.gap_tol = num(s, "gap_tol", "solve", c.solve.gap_tol);
    if (c.solve.n_modes < 2) throw ConfigError("solve.n_modes", "must be >= 2");
  }

  if (j.contains("sampler")) {
    const json& s = j["sampler"];
    check_keys(s, "sampler", {"kind", "count", "paths", "dt", "kernel_t", "kernel_modes", "burn_in"});
    if (s.contains("kind")) {
      if (!s["kind"].is_string()) throw ConfigError("sampler.kind", "expected a string");
      c.sampler.kind = s["kind"];
      if (c.sampler.kind != "stationary" && c.sampler.kind != "chain" && c.sampler.kind != "sde")
        throw ConfigError("sampler.kind", "must be stationary, chain or sde");
    }
    c.sampler.count = integer(s, "count", "sampler", c.sampler.count);
    c.sampler.paths = static_cast<int>(integer(s, "paths", "sampler", c.sampler.paths));
    c.sampler.dt = num(s, "dt", "sampler", c.sampler.dt);
    c.sampler.kernel_t = num(s, "kernel_t", "sampler", c.sampler.kernel_t);
    c.sampler.kernel_modes =
        static_cast<int>(integer(s, "kernel_modes", "sampler", c.sampler.kernel_modes));
    c.sampler.burn_in = num(s, "burn_in", "sampler", c.sampler.burn_in);
    if (c.sampler.count < 1) throw ConfigError("sampler.count", "must be >= 1");
    if (c.sampler.paths < 1) throw ConfigError("sampler.paths", "must be >= 1");
    if (!(c.sampler.dt > 0.0)) throw ConfigError("sampler.dt", "must be positive");
    if (!(c.sampler.kernel_t > 0.0)) throw ConfigError("sampler.kernel_t", "must be positive");
  }
  c.profile = j.contains("profile") ? j["profile"] : json();
  c.envelope = j.contains("envelope") ? j["envelope"] : json();
  if (j.contains("seed")) {
    const json& s = j["seed"];
    if (!(s.is_number_unsigned() || (s.is_number_integer() && s.get<long long>() >= 0)))
      throw ConfigError("seed", "expected a nonnegative integer");
    c.seed = j["seed"].get<std::uint64_t>();
  }
  c.threads = static_cast<int>(integer(j, "threads", "config", c.threads));
  if (c.threads < 1) throw ConfigError("threads", "must be >= 1");
  if (j.contains("out_dir")) {
    if (!j["out_dir"].is_string()) throw ConfigError("out_dir", "expected a string");
    c.out_dir = j["out_dir"];
  }

  json& r = c.resolved;
  r["model"] = to_json(c.model);
  r["potential"] = to_json(c.potential);
  r["grid"] = to_json(c.grid);
  r["solve"] = {{"n_modes", c.solve.n_modes},     {"tol", c.solve.tol},
                {"auto_expand", c.solve.auto_expand}, {"boundary_target", c.solve.boundary_target},
                {"max_n", c.solve.max_n},         {"gap_tol", c.solve.gap_tol}};
  r["sampler"] = {{"kind", c.sampler.kind},          {"count", c.sampler.count},
                  {"paths", c.sampler.paths},        {"dt", c.sampler.dt},
                  {"kernel_t", c.sampler.kernel_t},  {"kernel_modes", c.sampler.kernel_modes},
                  {"burn_in", c.sampler.burn_in}};
  r["profile"] = c.profile;
  r["envelope"] = c.envelope;
  r["seed"] = c.seed;
  r["threads"] = c.threads;
  r["out_dir"] = c.out_dir;
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("config", "cannot open " + path);
  json j;
  try {
    j = json::parse(is);
  } catch (const json::parse_error& e) {
    throw ConfigError("config", std::string("parse error: ") + e.what());
  }
  return parse_config(j);
}

}  // namespace gstlab
