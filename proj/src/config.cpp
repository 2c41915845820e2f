// Copyright 2026 The fermix Authors
// SPDX-License-Identifier: Apache-2.0

#include "fermix/config.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "fermix/errors.hpp"

namespace fermix {

using nlohmann::json;

namespace {

std::string solver_name(SolverKind s) {
  switch (s) {
    case SolverKind::HF: return "hf";
    case SolverKind::CI: return "ci";
    case SolverKind::Both: return "both";
  }
  return "both";
}

SolverKind parse_solver(const std::string& s) {
  if (s == "hf" || s == "HF") return SolverKind::HF;
  if (s == "ci" || s == "CI") return SolverKind::CI;
  if (s == "both") return SolverKind::Both;
  throw ConfigError("solver must be one of hf, ci, both (got '" + s + "')");
}

SpeciesOrder parse_order(const std::string& s) {
  if (s == "A-then-B") return SpeciesOrder::AThenB;
  if (s == "B-then-A") return SpeciesOrder::BThenA;
  throw ConfigError("shots.species_order must be A-then-B or B-then-A (got '" + s + "')");
}

// Recursively overlays `user` onto `base`, rejecting keys unknown to `base`.
void overlay(json& base, const json& user, const std::string& where) {
  if (!user.is_object()) throw ConfigError("config: expected an object at '" + where + "'");
  for (auto it = user.begin(); it != user.end(); ++it) {
    const std::string key = where.empty() ? it.key() : where + "." + it.key();
    if (!base.contains(it.key())) throw ConfigError("config: unknown key '" + key + "'");
    json& slot = base[it.key()];
    if (slot.is_object()) overlay(slot, it.value(), key);
    else slot = it.value();
  }
}

template <class T>
T field(const json& j, const char* section, const char* key) {
  try {
    return j.at(section).at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string("config: bad value for '") + section + "." + key + "'");
  }
}

template <class T>
T top(const json& j, const char* key) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string("config: bad value for '") + key + "'");
  }
}

}  // namespace

void RunConfig::validate() const {
  trap.validate();
  if (grid_points < 2) throw ConfigError("grid.n_points must be >= 2");
  if (!(x_min < x_max)) throw ConfigError("grid: x_min must be below x_max");
  if (basis_M < 1 || basis_M > 63) throw ConfigError("basis.M must lie in [1, 63]");
  if (n_a < 0 || n_b < 0) throw ConfigError("particles must be nonnegative");
  if (n_a > basis_M || n_b > basis_M) throw ConfigError("more particles than basis orbitals");
  if (n_a < n_b) throw ConfigError("N_A >= N_B by convention");
  if (!std::isfinite(g_initial) || !std::isfinite(g_final)) throw ConfigError("couplings must be finite");
  propagation.validate();
  if (lanczos.subspace < 2 || lanczos.max_restarts < 1 || !(lanczos.residual_tol > 0.0))
    throw ConfigError("lanczos settings out of range");
  if (!(hf.tau > 0.0) || hf.max_iterations < 1) throw ConfigError("hf settings out of range");
  for (double t : snapshot_times)
    if (t < 0.0 || t > propagation.t_final) throw ConfigError("snapshot times must lie in [0, t_final]");
  if (!std::is_sorted(snapshot_times.begin(), snapshot_times.end()))
    throw ConfigError("snapshot times must be sorted");
  if (!(filament_prominence > 0.0 && filament_prominence < 1.0))
    throw ConfigError("analysis.filament_prominence must lie in (0, 1)");
  for (int m : converge_M)
    if (m < std::max(n_a, n_b) || m > 63) throw ConfigError("converge.M values out of range");
  if (shots.enabled) {
    if (shots.n_shots < 1) throw ConfigError("shots.n_shots must be >= 1");
    if (!(shots.psf_width > 0.0)) throw ConfigError("shots.psf_width must be positive");
    for (double t : shots.times)
      if (t < 0.0 || t > propagation.t_final) throw ConfigError("shot times must lie in [0, t_final]");
  }
  if (output_dir.empty()) throw ConfigError("output_dir must not be empty");
}

json to_json(const RunConfig& c) {
  json j;
  j["trap"] = {{"omega", c.trap.omega},
               {"barrier_height", c.trap.barrier_height},
               {"barrier_width", c.trap.barrier_width},
               {"mass", c.trap.mass}};
  j["grid"] = {{"n_points", c.grid_points}, {"x_min", c.x_min}, {"x_max", c.x_max}};
  j["basis"] = {{"M", c.basis_M}};
  j["particles"] = {{"N_A", c.n_a}, {"N_B", c.n_b}};
  j["interaction"] = {{"g_initial", c.g_initial}, {"g_final", c.g_final}};
  j["solver"] = solver_name(c.solver);
  j["propagation"] = {{"dt", c.propagation.dt},
                      {"t_final", c.propagation.t_final},
                      {"krylov_dim", c.propagation.krylov_dim},
                      {"tol", c.propagation.tol},
                      {"record_stride", c.propagation.record_stride},
                      {"max_substep", c.propagation.max_substep}};
  j["lanczos"] = {{"subspace", c.lanczos.subspace},
                  {"max_restarts", c.lanczos.max_restarts},
                  {"residual_tol", c.lanczos.residual_tol}};
  j["hf"] = {{"seed_asymmetry", c.hf.seed_asymmetry},
             {"tau", c.hf.tau},
             {"max_iterations", c.hf.max_iterations}};
  j["snapshot_times"] = c.snapshot_times;
  j["shots"] = {{"enabled", c.shots.enabled},
                {"times", c.shots.times},
                {"n_shots", c.shots.n_shots},
                {"psf_width", c.shots.psf_width},
                {"species_order", std::string(to_string(c.shots.species_order))},
                {"running_average_at", c.shots.running_average_at},
                {"keep_images", c.shots.keep_images}};
  j["analysis"] = {{"filament_prominence", c.filament_prominence}};
  j["converge"] = {{"M", c.converge_M}};
  j["output_dir"] = c.output_dir;
  j["rng_seed"] = c.rng_seed;
  return j;
}

RunConfig config_from_json(const json& user) {
  json j = to_json(RunConfig{});
  overlay(j, user, "");
  RunConfig c;
  c.trap.omega = field<double>(j, "trap", "omega");
  c.trap.barrier_height = field<double>(j, "trap", "barrier_height");
  c.trap.barrier_width = field<double>(j, "trap", "barrier_width");
  c.trap.mass = field<double>(j, "trap", "mass");
  c.grid_points = field<int>(j, "grid", "n_points");
  c.x_min = field<double>(j, "grid", "x_min");
  c.x_max = field<double>(j, "grid", "x_max");
  c.basis_M = field<int>(j, "basis", "M");
  c.n_a = field<int>(j, "particles", "N_A");
  c.n_b = field<int>(j, "particles", "N_B");
  c.g_initial = field<double>(j, "interaction", "g_initial");
  c.g_final = field<double>(j, "interaction", "g_final");
  c.solver = parse_solver(top<std::string>(j, "solver"));
  c.propagation.dt = field<double>(j, "propagation", "dt");
  c.propagation.t_final = field<double>(j, "propagation", "t_final");
  c.propagation.krylov_dim = field<int>(j, "propagation", "krylov_dim");
  c.propagation.tol = field<double>(j, "propagation", "tol");
  c.propagation.record_stride = field<int>(j, "propagation", "record_stride");
  c.propagation.max_substep = field<double>(j, "propagation", "max_substep");
  c.lanczos.subspace = field<int>(j, "lanczos", "subspace");
  c.lanczos.max_restarts = field<int>(j, "lanczos", "max_restarts");
  c.lanczos.residual_tol = field<double>(j, "lanczos", "residual_tol");
  c.hf.seed_asymmetry = field<double>(j, "hf", "seed_asymmetry");
  c.hf.tau = field<double>(j, "hf", "tau");
  c.hf.max_iterations = field<int>(j, "hf", "max_iterations");
  c.snapshot_times = top<std::vector<double>>(j, "snapshot_times");
  c.shots.enabled = field<bool>(j, "shots", "enabled");
  c.shots.times = field<std::vector<double>>(j, "shots", "times");
  c.shots.n_shots = field<int>(j, "shots", "n_shots");
  c.shots.psf_width = field<double>(j, "shots", "psf_width");
  c.shots.species_order = parse_order(field<std::string>(j, "shots", "species_order"));
  c.shots.running_average_at = field<std::vector<int>>(j, "shots", "running_average_at");
  c.shots.keep_images = field<bool>(j, "shots", "keep_images");
  c.filament_prominence = field<double>(j, "analysis", "filament_prominence");
  c.converge_M = field<std::vector<int>>(j, "converge", "M");
  c.output_dir = top<std::string>(j, "output_dir");
  c.rng_seed = top<std::uint64_t>(j, "rng_seed");
  if (c.n_b > c.n_a) {
    std::swap(c.n_a, c.n_b);
    c.relabeled = true;
  }
  c.validate();
  return c;
}

void apply_override(json& j, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0)
    throw ConfigError("override must look like key=value (got '" + assignment + "')");
  const std::string key = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  json value;
  try {
    value = json::parse(text);
  } catch (const json::parse_error&) {
    value = text;
  }
  json* node = &j;
  std::stringstream ks(key);
  std::vector<std::string> parts;
  for (std::string part; std::getline(ks, part, '.');) {
    if (part.empty()) throw ConfigError("override key has an empty component: '" + key + "'");
    parts.push_back(part);
  }
  for (std::size_t k = 0; k + 1 < parts.size(); ++k) {
    json& next = (*node)[parts[k]];
    if (next.is_null()) next = json::object();
    if (!next.is_object()) throw ConfigError("override path '" + key + "' crosses a value");
    node = &next;
  }
  (*node)[parts.back()] = value;
}

RunConfig load_config(const std::optional<std::filesystem::path>& path,
                      const std::vector<std::string>& overrides) {
  json j = json::object();
  if (path) {
    std::ifstream in(*path);
    if (!in) throw ConfigError("cannot open config file " + path->string());
    try {
      j = json::parse(in, nullptr, true, true);
    } catch (const json::parse_error& e) {
      throw ConfigError("config: " + path->string() + ": " + e.what());
    }
  }
  for (const std::string& o : overrides) apply_override(j, o);
  return config_from_json(j);
}

std::string sha256_hex(const std::string& data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw Error("sha256 failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int k = 0; k < len; ++k) {
    out += hex[digest[k] >> 4];
    out += hex[digest[k] & 15];
  }
  return out;
}

std::string config_hash(const RunConfig& cfg) { return sha256_hex(to_json(cfg).dump()); }

}  // namespace fermix
