#include <cstring>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "gstlab/errors.hpp"
#include "gstlab/spectral.hpp"

namespace gstlab {

namespace {

constexpr char kMagic[8] = {'G', 'S', 'T', 'L', 'A', 'B', '0', '1'};

using ojson = nlohmann::ordered_json;

ojson header_of(const SpectralSolution& sol) {
  ojson h;
  h["grid"] = {{"d", sol.grid.d}, {"half_width", sol.grid.half_width}, {"n", sol.grid.n}};
  h["lambda0"] = sol.lambda0;
  h["lambda1"] = sol.lambda1;
  h["eigenvalues"] = sol.eigenvalues;
  h["residual"] = sol.residual;
  h["boundary_ratio"] = sol.boundary_ratio;
  h["noise_floor"] = sol.noise_floor;
  h["sign_fixed_nodes"] = sol.sign_fixed_nodes;
  h["model_hash"] = sol.model_hash;
  h["n_modes"] = sol.modes.size();
  return h;
}

template <class T>
void put(std::string& buf, const T& v) {
  buf.append(reinterpret_cast<const char*>(&v), sizeof(T));
}

}  // namespace

std::uint64_t solution_content_hash(const SpectralSolution& sol) {
  std::string h = header_of(sol).dump();
  std::uint64_t x = fnv1a64(h.data(), h.size());
  x = fnv1a64(sol.phi0.data(), sol.phi0.size() * sizeof(double), x);
  for (const auto& m : sol.modes) x = fnv1a64(m.data(), m.size() * sizeof(double), x);
  return x;
}

void save_solution(const SpectralSolution& sol, const std::string& path, const std::string& meta) {
  ojson h = header_of(sol);
  h["meta"] = ojson::parse(meta);
  h["content_hash"] = solution_content_hash(sol);
  const std::string hs = h.dump();
  std::string buf(kMagic, sizeof(kMagic));
  put(buf, static_cast<std::uint64_t>(hs.size()));
  buf += hs;
  auto put_array = [&](const std::vector<double>& v) {
    buf.append(reinterpret_cast<const char*>(v.data()), v.size() * sizeof(double));
  };
  put_array(sol.phi0);
  for (const auto& m : sol.modes) put_array(m);
  put(buf, fnv1a64(buf.data(), buf.size()));
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error(ErrorCode::Io, "cannot write artifact " + path);
  os.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!os) throw Error(ErrorCode::Io, "write failed for artifact " + path);
}

SpectralSolution load_solution(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error(ErrorCode::Io, "cannot read artifact " + path);
  std::stringstream ss;
  ss << is.rdbuf();
  const std::string buf = ss.str();
  auto corrupt = [&](const char* why) {
    return Error(ErrorCode::Io, "artifact " + path + ": " + why);
  };
  if (buf.size() < sizeof(kMagic) + 16 || std::memcmp(buf.data(), kMagic, sizeof(kMagic)) != 0)
    throw corrupt("bad magic");
  std::uint64_t tail;
  std::memcpy(&tail, buf.data() + buf.size() - 8, 8);
  if (fnv1a64(buf.data(), buf.size() - 8) != tail) throw corrupt("checksum mismatch");
  std::uint64_t hl;
  std::memcpy(&hl, buf.data() + sizeof(kMagic), 8);
  std::size_t pos = sizeof(kMagic) + 8;
  if (pos + hl > buf.size() - 8) throw corrupt("truncated header");
  ojson h = ojson::parse(buf.substr(pos, hl));
  pos += hl;

  SpectralSolution sol;
  sol.grid.d = h["grid"]["d"];
  sol.grid.half_width = h["grid"]["half_width"];
  sol.grid.n = h["grid"]["n"];
  sol.grid.validate();
  sol.lambda0 = h["lambda0"];
  sol.lambda1 = h["lambda1"];
  sol.eigenvalues = h["eigenvalues"].get<std::vector<double>>();
  sol.residual = h["residual"];
  sol.boundary_ratio = h["boundary_ratio"];
  sol.noise_floor = h["noise_floor"];
  sol.sign_fixed_nodes = h["sign_fixed_nodes"];
  sol.model_hash = h["model_hash"];
  const std::size_t nm = h["n_modes"];
  const std::size_t N = sol.grid.size();
  if (pos + (nm + 1) * N * sizeof(double) != buf.size() - 8) throw corrupt("array size mismatch");
  auto get_array = [&]() {
    std::vector<double> v(N);
    std::memcpy(v.data(), buf.data() + pos, N * sizeof(double));
    pos += N * sizeof(double);
    return v;
  };
  sol.phi0 = get_array();
  for (std::size_t k = 0; k < nm; ++k) sol.modes.push_back(get_array());
  if (solution_content_hash(sol) != h["content_hash"].get<std::uint64_t>())
    throw corrupt("content hash mismatch");
  return sol;
}

}  // namespace gstlab
