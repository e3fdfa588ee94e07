// gstlab: solve, simulate, envelope, verify and report for ground-state
// transformed Levy processes. Exit status: 0 success, 1 failed checks or
// runtime error, 2 usage or configuration error.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "gstlab/acceptance.hpp"
#include "gstlab/config.hpp"
#include "gstlab/envelopes.hpp"
#include "gstlab/errors.hpp"
#include "gstlab/gst.hpp"
#include "gstlab/simulate.hpp"
#include "gstlab/spectral.hpp"

namespace fs = std::filesystem;
using gstlab::json;
using namespace gstlab;

namespace {

constexpr const char* kVersion = "0.1.0";

struct Common {
  std::string config;
  std::string out;
  std::uint64_t seed = 0;
  int threads = 0;
  bool seed_set = false;
};

std::string utc_timestamp() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_text(const fs::path& p, const std::string& s) {
  std::ofstream os(p, std::ios::binary);
  if (!os) throw Error(ErrorCode::Io, "cannot write " + p.string());
  os << s;
  if (!os) throw Error(ErrorCode::Io, "write failed for " + p.string());
}

void write_json(const fs::path& p, const json& j) { write_text(p, j.dump(2) + "\n"); }

// CSV bodies carry no timestamps; the provenance line makes every file
// self-describing.
std::string csv_preamble(const ExperimentConfig& cfg) {
  return "# config_hash=" + cfg.hash() + " seed=" + std::to_string(cfg.seed) + "\n";
}

ExperimentConfig load_with_overrides(const Common& c) {
  ExperimentConfig cfg = load_config(c.config);
  if (c.seed_set) {
    cfg.seed = c.seed;
    cfg.resolved["seed"] = c.seed;
  }
  if (c.threads > 0) {
    cfg.threads = c.threads;
    cfg.resolved["threads"] = c.threads;
  }
  if (!c.out.empty()) {
    cfg.out_dir = c.out;
    cfg.resolved["out_dir"] = c.out;
  }
  fs::create_directories(cfg.out_dir);
  return cfg;
}

void write_manifest(const ExperimentConfig& cfg, const std::string& command, const json& extra,
                    const std::vector<std::string>& outputs) {
  json m;
  m["command"] = command;
  m["version"] = kVersion;
  m["timestamp"] = utc_timestamp();
  m["config_hash"] = cfg.hash();
  m["seed"] = cfg.seed;
  m["threads"] = cfg.threads;
  m["config"] = cfg.resolved;
  m["derived"] = extra;
  m["outputs"] = outputs;
  write_json(fs::path(cfg.out_dir) / ("manifest_" + command + ".json"), m);
}

SpectralSolution solve_config(const ExperimentConfig& cfg, int min_modes = 2) {
  SolveOptions o = cfg.solve;
  o.n_modes = std::max(o.n_modes, min_modes);
  return solve(cfg.model, cfg.potential, cfg.grid, o);
}

json solution_summary(const SpectralSolution& sol) {
  return {{"lambda0", sol.lambda0},
          {"lambda1", sol.lambda1},
          {"gap", sol.gap()},
          {"eigenvalues", sol.eigenvalues},
          {"residual", sol.residual},
          {"boundary_ratio", sol.boundary_ratio},
          {"noise_floor", sol.noise_floor},
          {"certified_radius", sol.certified_radius()},
          {"sign_fixed_nodes", sol.sign_fixed_nodes},
          {"grid", to_json(sol.grid)},
          {"content_hash", hex64(solution_content_hash(sol))}};
}

// ------------------------------------------------------------------ solve

int cmd_solve(const Common& c) {
  const ExperimentConfig cfg = load_with_overrides(c);
  const SpectralSolution sol = solve_config(cfg);
  const fs::path out(cfg.out_dir);
  const json meta = {{"config_hash", cfg.hash()}, {"seed", cfg.seed}};
  save_solution(sol, (out / "solution.gst").string(), meta.dump());
  json rep = {{"config_hash", cfg.hash()}, {"seed", cfg.seed}};
  rep.update(solution_summary(sol));
  write_json(out / "solve_report.json", rep);
  std::string csv = csv_preamble(cfg) + "k,eigenvalue\n";
  for (std::size_t k = 0; k < sol.eigenvalues.size(); ++k)
    csv += std::to_string(k) + "," + g17(sol.eigenvalues[k]) + "\n";
  write_text(out / "eigenvalues.csv", csv);
  write_manifest(cfg, "solve", {{"final_grid", to_json(sol.grid)}},
                 {"solution.gst", "solve_report.json", "eigenvalues.csv"});
  std::printf("lambda0 = %.12g  lambda1 = %.12g  residual = %.3g  artifact hash %s\n", sol.lambda0,
              sol.lambda1, sol.residual, hex64(solution_content_hash(sol)).c_str());
  return 0;
}

// --------------------------------------------------------------- simulate

int cmd_simulate(const Common& c) {
  const ExperimentConfig cfg = load_with_overrides(c);
  const SamplerSpec& sp = cfg.sampler;
  const bool kernel = sp.kind == "chain";
  const SpectralSolution sol = solve_config(cfg, kernel ? sp.kernel_modes : 2);
  const fs::path out(cfg.out_dir);
  const int d = sol.grid.d;
  json summary = {{"config_hash", cfg.hash()}, {"seed", cfg.seed}, {"sampler", sp.kind}};
  std::vector<double> pooled;  // d = 1 states for the KS diagnostic
  std::ostringstream csv;
  csv << csv_preamble(cfg);

  if (sp.kind == "stationary") {
    const auto xs = sample_stationary(sol, static_cast<std::size_t>(sp.count), RngSpec{cfg.seed, 0});
    csv << (d == 1 ? "index,x\n" : "index,x1,x2\n");
    for (long long i = 0; i < sp.count; ++i) {
      csv << i;
      for (int k = 0; k < d; ++k) csv << "," << g17(xs[i * d + k]);
      csv << "\n";
    }
    if (d == 1) pooled = xs;
    write_text(out / "samples.csv", csv.str());
  } else {
    if (d != 1) throw Error(ErrorCode::InvalidArgument, "chain and sde samplers are d = 1 only");
    std::vector<GstPath> paths(sp.paths);
    long long burn = 0;
    if (kernel) {
      const auto K = intrinsic_kernel(sol, sp.kernel_t, sp.kernel_modes);
      const KernelChain chain(K, sol.grid);
      burn = static_cast<long long>(std::ceil(sp.burn_in / sp.kernel_t));
      parallel_for(paths.size(), cfg.threads, [&](std::size_t p) {
        paths[p] = chain.run(0.0, burn + sp.count, RngSpec{cfg.seed, 1}.derive(p));
      });
      summary["kernel"] = {{"t", K.t},
                           {"modes", sp.kernel_modes},
                           {"window_nodes", K.nodes.size()},
                           {"normalization_defect", K.normalization_defect},
                           {"window_leak", K.window_leak},
                           {"clamped", K.clamped}};
    } else {
      const GstFields fields(sol, cfg.model);
      const SdeSampler sampler(fields, sp.dt, SdeOptions{1.0, true});
      parallel_for(paths.size(), cfg.threads, [&](std::size_t p) {
        paths[p] = sampler.run(0.0, sp.burn_in + static_cast<double>(sp.count), RngSpec{cfg.seed, 2}.derive(p));
      });
      summary["sde"] = {{"dt", sampler.dt()},
                        {"dt_max", sampler.dt_max()},
                        {"eps_jump", fields.eps_jump()},
                        {"effective_sigma2", fields.effective_sigma2()},
                        {"certified_radius", sampler.certified_radius()}};
    }
    const double t_burn = kernel ? static_cast<double>(burn) * sp.kernel_t : sp.burn_in;
    csv << "path,time,x,jumps\n";
    long long clamps = 0, proposals = 0, accepted = 0;
    for (std::size_t p = 0; p < paths.size(); ++p) {
      const GstPath& g = paths[p];
      clamps += g.clamp_count;
      proposals += g.proposals;
      accepted += g.accepted;
      std::size_t jl = 0;
      for (std::size_t i = 0; i < g.size(); ++i) {
        // Accepted jumps in (t_{i-1}, t_i].
        int jumps = 0;
        while (jl < g.jump_log.size() && g.jump_log[jl].time <= g.times[i]) {
          jumps += g.jump_log[jl].accepted;
          ++jl;
        }
        csv << p << "," << g17(g.times[i]) << "," << g17(g.state(i)) << "," << jumps << "\n";
        if (g.times[i] > t_burn) pooled.push_back(g.state(i));
      }
    }
    summary["clamp_count"] = clamps;
    summary["proposals"] = proposals;
    summary["accepted"] = accepted;
    write_text(out / "paths.csv", csv.str());
  }
  if (!pooled.empty()) {
    const double ks = ks_statistic(pooled, grid_cdf(sol));
    summary["ks_statistic"] = ks;
    summary["ks_critical_1pct"] = ks_critical_1pct(pooled.size());
    summary["ks_samples"] = pooled.size();
    summary["ks_note"] = "occupation states after burn-in; serial correlation makes this a diagnostic";
  }
  write_json(out / "simulate_summary.json", summary);
  write_manifest(cfg, "simulate", {{"solution", solution_summary(sol)}},
                 {sp.kind == "stationary" ? "samples.csv" : "paths.csv", "simulate_summary.json"});
  std::printf("%s: wrote %s\n", sp.kind.c_str(), (out / (sp.kind == "stationary" ? "samples.csv" : "paths.csv")).c_str());
  return 0;
}

// --------------------------------------------------------------- envelope

double env_num(const json& env, const char* key, double dflt) {
  if (!env.contains(key)) return dflt;
  if (!env[key].is_number()) throw ConfigError(std::string("envelope.") + key, "expected a number");
  return env[key].get<double>();
}

// Every envelope default, resolved and echoed.
json resolve_envelope(const ExperimentConfig& cfg) {
  json env = cfg.envelope.is_null() ? json::object() : cfg.envelope;
  if (!env.is_object()) throw ConfigError("envelope", "expected an object");
  static const std::vector<std::string> keys = {"test",    "regime", "density", "kappa", "c_grid",
                                                "limsup",  "n_max",  "delta",   "theta",   "epsilon",
                                                "low_lying", "classifier"};
  for (auto it = env.begin(); it != env.end(); ++it)
    if (std::find(keys.begin(), keys.end(), it.key()) == keys.end())
      throw ConfigError("envelope." + it.key(), "unknown key");
  json r;
  r["test"] = env.value("test", cfg.model.has_jumps() ? "profile" : "stationary_tail");
  if (r["test"] != "profile" && r["test"] != "stationary_tail")
    throw ConfigError("envelope.test", "must be profile or stationary_tail");
  if (r["test"] == "profile" && !cfg.model.has_jumps() && !env.contains("density"))
    throw ConfigError("envelope.density", "the profile test needs a Levy density; the model has none");
  r["regime"] = env.value("regime", cfg.potential.kind() == PotentialKind::Decaying ? "decaying" : "confining");
  if (r["regime"] != "confining" && r["regime"] != "decaying")
    throw ConfigError("envelope.regime", "must be confining or decaying");
  r["density"] = env.contains("density") ? to_json(density_profile_from_json(env["density"], "envelope.density"))
                                         : to_json(cfg.model.density_profile());
  r["kappa"] = env.value("kappa", json("standard"));
  const json& k = r["kappa"];
  if (!(k == "standard" || (k.is_object() && k.size() == 1 && (k.contains("power") || k.contains("constant")) &&
                            k.begin()->is_number())))
    throw ConfigError("envelope.kappa", "expected \"standard\", {\"power\": p} or {\"constant\": c}");
  r["c_grid"] = env.value("c_grid", json::array({0.5, 1.0, 2.0}));
  if (!r["c_grid"].is_array() || r["c_grid"].empty()) throw ConfigError("envelope.c_grid", "expected a non-empty array");
  for (const auto& v : r["c_grid"])
    if (!v.is_number() || !(v.get<double>() > 0.0)) throw ConfigError("envelope.c_grid", "entries must be positive numbers");
  r["limsup"] = env.value("limsup", true);
  r["n_max"] = env.value("n_max", 1000000LL);
  if (!r["n_max"].is_number_integer() || r["n_max"].get<long long>() < 1000)
    throw ConfigError("envelope.n_max", "expected an integer >= 1000");
  r["delta"] = env_num(env, "delta", 1.5);
  r["theta"] = env_num(env, "theta", 1.0);
  r["epsilon"] = env_num(env, "epsilon", 0.1);
  r["low_lying"] = env.value("low_lying", true);
  const ClassifierOptions d;
  const json cls = env.value("classifier", json::object());
  if (!cls.is_object()) throw ConfigError("envelope.classifier", "expected an object");
  r["classifier"] = {{"tail_fraction", cls.value("tail_fraction", d.tail_fraction)},
                     {"window_ratio", cls.value("window_ratio", d.window_ratio)},
                     {"divergent_windows", cls.value("divergent_windows", d.divergent_windows)},
                     {"confirm_windows", cls.value("confirm_windows", d.confirm_windows)},
                     {"power_windows", cls.value("power_windows", d.power_windows)},
                     {"power_tol", cls.value("power_tol", d.power_tol)},
                     {"flat_rate", cls.value("flat_rate", d.flat_rate)},
                     {"y_cap", cls.value("y_cap", static_cast<double>(d.y_cap))},
                     {"bisection", {{"c_lo", 1e-3}, {"c_hi", 1e3}, {"iterations", 40}, {"resolution", 1e-7}}}};
  return r;
}

ClassifierOptions classifier_from(const json& r) {
  ClassifierOptions o;
  const json& c = r["classifier"];
  o.tail_fraction = c["tail_fraction"];
  o.window_ratio = c["window_ratio"];
  o.divergent_windows = c["divergent_windows"];
  o.confirm_windows = c["confirm_windows"];
  o.power_windows = c["power_windows"];
  o.power_tol = c["power_tol"];
  o.flat_rate = c["flat_rate"];
  o.y_cap = c["y_cap"].get<double>();
  return o;
}

// Closed-form catalogue entry for the configuration, or the reason there is none.
std::optional<EscapeCase> catalogue_case(const ExperimentConfig& cfg, const json& env, const SpectralSolution& sol,
                                         std::string* why) {
  const Potential& V = cfg.potential;
  const auto p = V.params();
  EscapeCase e;
  if (!cfg.model.has_jumps()) {
    const double s2 = cfg.model.diffusion_coeff();
    if (V.family() == PotentialFamily::Polynomial && p.at("n") == 1.0 && p.at("coeff") > 0.0 && cfg.grid.d == 1) {
      e.regime = "ou";  // phi0^2 ~ exp(-gamma x^2), gamma = sqrt(2 coeff / sigma2)
      e.gamma = std::sqrt(2.0 * p.at("coeff") / s2);
      return e;
    }
    if (V.family() == PotentialFamily::Well && s2 == 1.0 && sol.lambda0 < 0.0) {
      e.regime = "finite_well";
      e.lambda0 = sol.lambda0;
      return e;
    }
    *why = "no catalogued constant for a pure diffusion with this potential";
    return std::nullopt;
  }
  e.f = density_profile_from_json(env["density"], "envelope.density");
  e.regime = env["regime"];
  e.delta = env["delta"];
  if (e.regime == "confining") {
    if (V.family() == PotentialFamily::Polynomial) {
      e.rho = 2.0 * p.at("n");
    } else if (V.family() == PotentialFamily::ExpPolyLog) {
      e.eta = p.at("eta");
      e.vartheta = p.at("vartheta");
      e.rho = p.at("rho");
      e.sigma = p.at("sigma");
    } else {
      *why = std::string("no catalogued constant for the ") + to_string(V.family()) + " potential";
      return std::nullopt;
    }
  } else {
    e.lambda0 = sol.lambda0;
    e.theta = env["theta"];
    e.low_lying = env["low_lying"];
  }
  return e;
}

KappaFunction kappa_from(const json& env, const DensityProfile& f, const Potential& V) {
  const json& k = env["kappa"];
  if (k.is_object() && k.contains("power")) return KappaFunction::power(k["power"]);
  if (k.is_object() && k.contains("constant")) return KappaFunction::constant(k["constant"]);
  const auto p = V.params();
  const bool ex = V.family() == PotentialFamily::ExpPolyLog;
  return KappaFunction::standard(f, ex ? p.at("eta") : 0.0, ex ? p.at("vartheta") : 0.0);
}

json verdict_json(const IntegralClassification& r) {
  return {{"verdict", to_string(r.verdict)},
          {"reason", r.reason},
          {"windows", r.windows.size()},
          {"log_accumulated", static_cast<double>(r.log_accumulated)}};
}

json bisection_json(const BisectionResult& b) {
  return {{"kind", to_string(b.kind)},  {"value", b.kind == ConstantKind::Finite ? json(b.value) : json(nullptr)},
          {"bracket", {b.lo, b.hi}},    {"iterations", b.iterations},
          {"resolution_limited", b.resolution_limited}, {"reason", b.reason}};
}

int cmd_envelope(const Common& c) {
  const ExperimentConfig cfg = load_with_overrides(c);
  const json env = resolve_envelope(cfg);
  // Validate an explicit profile before any numerical work.
  std::optional<ProfileFunction> tau;
  if (!cfg.profile.is_null()) tau = profile_from_json(cfg.profile, "profile");

  const SpectralSolution sol = solve_config(cfg);
  std::string why;
  const auto ecase = catalogue_case(cfg, env, sol, &why);
  json catalogue;
  if (ecase) {
    try {
      const EscapeConstant ec = escape_constant(*ecase);
      catalogue = {{"regime", ec.regime},
                   {"profile", ec.profile},
                   {"value", std::isfinite(ec.value) ? json(ec.value) : json("inf")},
                   {"lower_bound_only", ec.lower_bound}};
      if (!tau) tau = ec.tau;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::UncataloguedRegime) throw;
      catalogue = {{"uncatalogued", e.what()}};
    }
  } else {
    catalogue = {{"uncatalogued", why}};
  }
  if (!tau) throw ConfigError("profile", "missing, and no catalogued default profile exists for this model");

  const ClassifierOptions copts = classifier_from(env);
  const std::vector<double> c_grid = env["c_grid"].get<std::vector<double>>();
  json summary = {{"config_hash", cfg.hash()}, {"seed", cfg.seed}, {"profile", tau->describe()},
                  {"test", env["test"]},       {"catalogue", catalogue}};
  json rows = json::array();
  int inconclusive = 0;
  if (env["test"] == "profile") {
    ProfileTestSpec spec;
    spec.f = density_profile_from_json(env["density"], "envelope.density");
    spec.V = cfg.potential;
    spec.confining = env["regime"] == "confining";
    spec.kappa = kappa_from(env, spec.f, cfg.potential);
    spec.d = cfg.grid.d;
    spec.theta = env["theta"];
    spec.lambda0 = sol.lambda0;
    spec.epsilon = env["epsilon"];
    const char* names[2] = {spec.confining ? "I_low" : "I_nu_kappa", spec.confining ? "I_up" : "I_eps"};
    for (double cc : c_grid) {
      const auto r = integral_test_profile(spec, *tau, cc, copts);
      inconclusive += (r.first.verdict == Verdict::Inconclusive) + (r.second.verdict == Verdict::Inconclusive);
      rows.push_back({{"c", cc}, {names[0], verdict_json(r.first)}, {names[1], verdict_json(r.second)}});
    }
    const auto k = profile_constants(spec, *tau, copts);
    summary["kappa"] = spec.kappa.label;
    summary["constants"] = {{spec.confining ? "c_low" : "c_nu_kappa", bisection_json(k.first)},
                            {spec.confining ? "c_up" : "c_eps", bisection_json(k.second)}};
  } else {
    const StationaryTail tail(sol);
    for (double cc : c_grid) {
      const auto r = integral_test_general(tail, *tau, cc, copts);
      inconclusive += r.verdict == Verdict::Inconclusive;
      rows.push_back({{"c", cc}, {"I", verdict_json(r)}});
    }
    summary["tail_model"] = tail.label();
    summary["constants"] = {{"c_star", bisection_json(escape_constant_general(tail, *tau, copts))}};
  }
  summary["classifications"] = rows;
  summary["inconclusive_count"] = inconclusive;
  summary["tolerances"] = env["classifier"];

  const fs::path out(cfg.out_dir);
  std::vector<std::string> outputs = {"envelope_summary.json"};
  if (env["limsup"].get<bool>()) {
    const long long n_max = env["n_max"];
    auto xs = sample_stationary(sol, static_cast<std::size_t>(n_max), RngSpec{cfg.seed, 3});
    const int d = sol.grid.d;
    std::vector<double> abs(n_max);
    for (long long i = 0; i < n_max; ++i) {
      double s = 0.0;
      for (int k = 0; k < d; ++k) s += xs[i * d + k] * xs[i * d + k];
      abs[i] = std::sqrt(s);
    }
    const auto el = empirical_limsup(abs, *tau, c_grid);
    summary["empirical"] = {{"n_max", n_max}, {"n_start", el.n_start}, {"c_hat", el.c_hat},
                            {"band", {el.band_lo, el.band_hi}}, {"band_note", "Gumbel-scale heuristic"}};
    std::string trace = csv_preamble(cfg) + "n,running_max_over_tau\n";
    for (std::size_t i = 0; i < el.trace_n.size(); ++i)
      trace += std::to_string(el.trace_n[i]) + "," + g17(el.trace_ratio[i]) + "\n";
    write_text(out / "envelope_trace.csv", trace);
    std::string exc = csv_preamble(cfg) + "c,exceed_count,last_exceed\n";
    for (std::size_t i = 0; i < el.c_grid.size(); ++i)
      exc += g17(el.c_grid[i]) + "," + std::to_string(el.exceed_count[i]) + "," + std::to_string(el.last_exceed[i]) + "\n";
    write_text(out / "envelope_exceedance.csv", exc);
    outputs.push_back("envelope_trace.csv");
    outputs.push_back("envelope_exceedance.csv");
  }
  write_json(out / "envelope_summary.json", summary);
  write_manifest(cfg, "envelope", {{"envelope", env}, {"solution", solution_summary(sol)}}, outputs);
  std::printf("profile %s; %d inconclusive classification(s)\n", tau->label().c_str(), inconclusive);
  if (catalogue.contains("value")) std::printf("catalogued constant: %s\n", catalogue["value"].dump().c_str());
  if (summary.contains("empirical")) std::printf("empirical c_hat: %.6g\n", summary["empirical"]["c_hat"].get<double>());
  return 0;
}

// ----------------------------------------------------------------- verify

int cmd_verify(const Common& c, const std::string& suite) {
  AcceptanceOptions opts;
  if (c.seed_set) opts.seed = c.seed;
  opts.threads = c.threads > 0 ? c.threads : 1;
  const auto ids = suite_criteria(suite);
  json matrix = json::array();
  int failures = 0;
  for (int id : ids) {
    const auto r = run_criterion(id, opts);
    std::printf("%s\n", format_line(r).c_str());
    std::fflush(stdout);
    failures += !r.pass();
    matrix.push_back(to_json(r));
  }
  std::printf("%s: %d/%zu passed\n", suite.c_str(), static_cast<int>(ids.size()) - failures, ids.size());
  if (!c.out.empty()) {
    fs::create_directories(c.out);
    write_json(fs::path(c.out) / "verify.json",
               {{"suite", suite}, {"seed", opts.seed}, {"pass", failures == 0}, {"criteria", matrix}});
    write_json(fs::path(c.out) / "manifest_verify.json",
               {{"command", "verify"}, {"version", kVersion}, {"timestamp", utc_timestamp()}, {"suite", suite},
                {"seed", opts.seed}, {"threads", opts.threads}, {"outputs", {"verify.json"}}});
  }
  return failures == 0 ? 0 : 1;
}

// ----------------------------------------------------------------- report

int cmd_report(const Common& c) {
  if (c.out.empty()) throw ConfigError("--out", "report needs the output directory to summarise");
  const fs::path dir(c.out);
  if (!fs::is_directory(dir)) throw Error(ErrorCode::Io, "no such directory " + dir.string());
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.path().extension() == ".json" && e.path().filename() != "report.json") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  json report = json::object();
  std::ostringstream md;
  md << "# gstlab report\n\n";
  for (const auto& f : files) {
    std::ifstream is(f);
    json j;
    try {
      j = json::parse(is);
    } catch (const json::parse_error& e) {
      throw Error(ErrorCode::Io, f.string() + ": " + e.what());
    }
    const std::string name = f.filename().string();
    report[name] = j;
    md << "## " << name << "\n\n";
    for (const char* key : {"command", "config_hash", "seed", "timestamp", "lambda0", "gap", "certified_radius",
                            "ks_statistic", "ks_critical_1pct", "inconclusive_count", "suite", "pass"})
      if (j.contains(key)) md << "- " << key << ": " << j[key].dump() << "\n";
    if (j.contains("catalogue")) md << "- catalogue: " << j["catalogue"].dump() << "\n";
    if (j.contains("constants")) md << "- constants: " << j["constants"].dump() << "\n";
    if (j.contains("empirical")) md << "- empirical: " << j["empirical"].dump() << "\n";
    if (j.contains("criteria"))
      for (const auto& r : j["criteria"])
        md << "- criterion " << r["id"].get<int>() << " " << r["name"].get<std::string>() << ": "
           << (r["pass"].get<bool>() ? "pass" : "FAIL") << "\n";
    md << "\n";
  }
  write_text(dir / "report.md", md.str());
  write_json(dir / "report.json", report);
  std::cout << md.str();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gstlab: ground-state transformed Levy processes"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);
  Common common;
  std::string suite = "all";

  auto add_common = [&](CLI::App* s, bool config_required) {
    auto* opt = s->add_option("--config", common.config, "experiment configuration (JSON)");
    if (config_required) opt->required()->check(CLI::ExistingFile);
    s->add_option("--out", common.out, "output directory (overrides out_dir)");
    s->add_option("--seed", common.seed, "master seed (overrides seed)");
    s->add_option("--threads", common.threads, "worker threads")->check(CLI::PositiveNumber);
  };
  auto* solve_cmd = app.add_subcommand("solve", "ground state and spectral gap; writes the solution artifact");
  add_common(solve_cmd, true);
  auto* sim_cmd = app.add_subcommand("simulate", "stationary draws, kernel chain or SDE paths");
  add_common(sim_cmd, true);
  auto* env_cmd = app.add_subcommand("envelope", "integral tests, escape constants and empirical limsup");
  add_common(env_cmd, true);
  auto* ver_cmd = app.add_subcommand("verify", "run an acceptance suite");
  add_common(ver_cmd, false);
  ver_cmd->add_option("--suite", suite, "suite tag")->check(CLI::IsMember(suite_names()));
  auto* rep_cmd = app.add_subcommand("report", "summarise the outputs in --out");
  add_common(rep_cmd, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  for (auto* s : {solve_cmd, sim_cmd, env_cmd, ver_cmd, rep_cmd})
    if (s->get_option("--seed")->count() > 0) common.seed_set = true;

  try {
    if (*solve_cmd) return cmd_solve(common);
    if (*sim_cmd) return cmd_simulate(common);
    if (*env_cmd) return cmd_envelope(common);
    if (*ver_cmd) return cmd_verify(common, suite);
    if (*rep_cmd) return cmd_report(common);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "configuration error at %s\n", e.what());
    return 2;
  } catch (const Error& e) {
    std::fprintf(stderr, "error (%s): %s\n", to_string(e.code()), e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 2;
}
