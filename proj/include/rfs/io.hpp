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

#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "rfs/activation.hpp"
#include "rfs/cumulants.hpp"
#include "rfs/selfconsistent.hpp"
#include "rfs/simulate.hpp"

namespace rfs::io {

using nlohmann::json;

struct WassersteinRow {
  long n1 = 0;
  int layer = 1;
  double wasserstein = 0.0;
};

json to_json(const ThetaParams& t);
json to_json(const ModelParams& p);
json to_json(const NetworkShape& s);
json to_json(const CumulantReport& r);
json to_json(const CycleCheck& c);

/// Atom, outlier and support of a density; `params` is stored verbatim.
json density_meta(const SpectralDensity& d, const ModelParams& p);
json spectrum_meta(const EmpiricalSpectrum& s, const SimulationConfig& cfg);

// `lambda,density`
void write_density_csv(const std::filesystem::path& path, const SpectralDensity& d);
// `index,eigenvalue`
void write_spectrum_csv(const std::filesystem::path& path, const EmpiricalSpectrum& s);
// `n1,layer,wasserstein`
void write_wasserstein_csv(const std::filesystem::path& path,
                           const std::vector<WassersteinRow>& rows);
void write_json(const std::filesystem::path& path, const json& j);

std::vector<double> read_spectrum_csv(const std::filesystem::path& path);

}  // namespace rfs::io
