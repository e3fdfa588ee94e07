#pragma once

#include <cstdint>
#include <string>

#include <json.hpp>

#include "gstlab/levy.hpp"
#include "gstlab/potentials.hpp"
#include "gstlab/spectral.hpp"

namespace gstlab {

using json = nlohmann::ordered_json;

// Model keys: family, d, alpha, mu, beta, gamma, sigma2 (+ mass, jump_scale).
json to_json(const LevyModel& m);
LevyModel levy_model_from_json(const json& j, const std::string& path = "model");
json to_json(const DensityProfile& p);
DensityProfile density_profile_from_json(const json& j, const std::string& path = "profile");

// Potential keys: family plus the family's named parameters.
json to_json(const Potential& v);
Potential potential_from_json(const json& j, const std::string& path = "potential");

json to_json(const Grid& g);
Grid grid_from_json(const json& j, const std::string& path = "grid");

std::uint64_t model_potential_hash(const LevyModel& m, const Potential& v);
std::string hex64(std::uint64_t h);

struct SamplerSpec {
  std::string kind = "stationary";  // stationary | chain | sde
  long long count = 100000;         // draws (stationary) or integer-time steps
  int paths = 1;
  double dt = 1e-3;
  double kernel_t = 1.0;
  int kernel_modes = 60;
  double burn_in = 0.0;
};

// One experiment = one file. Every default is written back into `resolved`
// so manifests echo the complete configuration.
struct ExperimentConfig {
  LevyModel model;
  Potential potential = Potential::polynomial(1);
  Grid grid;
  SolveOptions solve;
  SamplerSpec sampler;
  json profile;    // envelope profile spec (may be null)
  json envelope;   // envelope run options (may be null)
  std::uint64_t seed = 1;
  int threads = 1;
  std::string out_dir = "out";
  json resolved;

  std::string hash() const;  // hash of `resolved` minus seed/threads/out_dir
};

ExperimentConfig parse_config(const json& j);
ExperimentConfig load_config(const std::string& path);

}  // namespace gstlab
