/* Copyright 2026 The rfspec Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 *
 */

#include "rfs/io.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

#include "rfs/error.hpp"

namespace rfs::io {
namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream os(path);
  if (!os) throw Error("cannot write " + path.string());
  os << std::setprecision(17);
  return os;
}

}  // namespace

json to_json(const ThetaParams& t) {
  return {{"theta1", t.theta1},
          {"theta1b", t.theta1b},
          {"theta2", t.theta2},
          {"sigma_tilde", t.sigma_tilde}};
}

json to_json(const ModelParams& p) {
  json j = {{"theta1_eff", p.theta1_eff},
            {"theta2", p.theta2},
            {"theta1b", p.theta1b},
            {"phi", p.phi},
            {"psi", p.psi}};
  j["n1"] = p.n1 ? json(*p.n1) : json(nullptr);
  return j;
}

json to_json(const NetworkShape& s) {
  json widths = json::array();
  for (int l = 1; l <= s.layers; ++l) widths.push_back(s.width(l));
  return {{"n0", s.n0}, {"n1", s.n1}, {"m", s.m}, {"layers", s.layers}, {"widths", widths}};
}

json to_json(const CumulantReport& r) {
  json entries = json::array();
  for (const auto& e : r.entries) {
    entries.push_back({{"label", e.label},
                       {"estimate", e.estimate},
                       {"std_error", e.std_error},
                       {"target", e.target},
                       {"target_source", e.target_source},
                       {"band", e.band},
                       {"pass", e.pass()}});
  }
  return {{"entries", entries},
          {"n0", r.n0},
          {"n1", r.n1},
          {"m", r.m},
          {"n_samples", r.n_samples},
          {"sigma_w", r.sigma_w},
          {"sigma_x", r.sigma_x},
          {"sigma_b", r.sigma_b},
          {"activation", r.activation}};
}

json to_json(const CycleCheck& c) {
  return {{"k", c.k}, {"estimate", c.estimate}, {"std_error", c.std_error}, {"target", c.target}};
}

json density_meta(const SpectralDensity& d, const ModelParams& p) {
  json support = json::array();
  for (const auto& iv : d.support) support.push_back({iv.lo, iv.hi});
  json j = {{"atom_at_zero", d.atom_at_zero},
            {"support", support},
            {"eps", d.eps},
            {"total_mass", d.total_mass()},
            {"params", to_json(p)}};
  j["outlier"] = d.outlier ? json(*d.outlier) : json(nullptr);
  return j;
}

json spectrum_meta(const EmpiricalSpectrum& s, const SimulationConfig& cfg) {
  return {{"shape", to_json(s.shape)},
          {"seed", s.seed},
          {"layer", s.layer},
          {"activation", cfg.activation.name},
          {"sigma_w", cfg.activation.sigma_w},
          {"sigma_x", cfg.activation.sigma_x},
          {"sigma_b", cfg.activation.sigma_b},
          {"dist_x", std::string(entry_kind_name(cfg.dist_x.kind))},
          {"dist_w", std::string(entry_kind_name(cfg.dist_w.kind))},
          {"batch_norm", cfg.batch_norm}};
}

void write_density_csv(const std::filesystem::path& path, const SpectralDensity& d) {
  auto os = open_out(path);
  os << "lambda,density\n";
  for (std::size_t i = 0; i < d.grid.size(); ++i) os << d.grid[i] << ',' << d.density[i] << '\n';
}

void write_spectrum_csv(const std::filesystem::path& path, const EmpiricalSpectrum& s) {
  auto os = open_out(path);
  os << "index,eigenvalue\n";
  for (std::size_t i = 0; i < s.eigenvalues.size(); ++i) os << i << ',' << s.eigenvalues[i] << '\n';
}

void write_wasserstein_csv(const std::filesystem::path& path,
                           const std::vector<WassersteinRow>& rows) {
  auto os = open_out(path);
  os << "n1,layer,wasserstein\n";
  for (const auto& r : rows) os << r.n1 << ',' << r.layer << ',' << r.wasserstein << '\n';
}

void write_json(const std::filesystem::path& path, const json& j) {
  auto os = open_out(path);
  os << j.dump(2) << '\n';
}

std::vector<double> read_spectrum_csv(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw Error("cannot read " + path.string());
  std::string line;
  std::getline(is, line);
  if (line != "index,eigenvalue") throw Error(path.string() + ": unexpected header '" + line + "'");
  std::vector<double> out;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw Error(path.string() + ": malformed row '" + line + "'");
    out.push_back(std::stod(line.substr(comma + 1)));
  }
  return out;
}

}  // namespace rfs::io
