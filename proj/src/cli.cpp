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

#include "rfs/cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "rfs/activation.hpp"
#include "rfs/cumulants.hpp"
#include "rfs/error.hpp"
#include "rfs/io.hpp"
#include "rfs/metrics.hpp"

namespace rfs::cli {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kSeriesTerms = 30;

ActivationSpec activation_of(const RunConfig& c) {
  return make_activation(c.activation, c.sigma_w, c.sigma_x, c.sigma_b);
}

EntryDistribution dist_of(const RunConfig& c, double variance) {
  return {parse_entry_kind(c.dist), variance};
}

SimulationConfig simulation_of(const RunConfig& c, const ActivationSpec& spec, long n1) {
  SimulationConfig sc;
  sc.shape = c.shape_for(n1);
  sc.activation = spec;
  sc.dist_x = dist_of(c, c.sigma_x * c.sigma_x);
  sc.dist_w = dist_of(c, c.sigma_w * c.sigma_w);
  sc.batch_norm = c.batch_norm;
  return sc;
}

long single_n1(const RunConfig& c, const char* cmd) {
  if (c.n1.size() > 1) throw UsageError(std::string(cmd) + " takes a single --n1 value");
  return c.n1.empty() ? 50 : c.n1.front();
}

DensityOptions density_options(const RunConfig& c) {
  DensityOptions opt;
  opt.eps = c.eps;
  opt.points = c.grid_points;
  opt.grid_min = c.grid_min;
  opt.grid_max = c.grid_max;
  return opt;
}

void print_support(std::ostream& out, const SpectralDensity& d) {
  out << "support     ";
  for (const auto& iv : d.support) out << " [" << iv.lo << ", " << iv.hi << "]";
  out << '\n';
}

int cmd_theta(const RunConfig& c, std::ostream& out) {
  const auto spec = activation_of(c);
  const auto t = compute_theta(spec);
  const auto series = theta_series(spec, kSeriesTerms);
  const double residual =
      std::max(std::abs(series.theta1b - t.theta1b), std::abs(series.theta2 - t.theta2));
  out << std::setprecision(12);
  out << "activation   " << spec.name << "  (sigma_w=" << c.sigma_w << ", sigma_x=" << c.sigma_x
      << ", sigma_b=" << c.sigma_b << ")\n";
  out << "theta1       " << t.theta1 << '\n';
  out << "theta1b      " << t.theta1b << '\n';
  out << "theta2       " << t.theta2 << '\n';
  out << "sigma_tilde  " << t.sigma_tilde << '\n';
  out << "series_residual " << std::setprecision(3) << residual << "  (" << kSeriesTerms
      << " Hermite terms)\n";
  const bool mp = t.theta2 <= 1e-12 * std::max(1.0, t.theta1);
  if (mp)
    out << "note: theta2 = 0, so the limiting spectrum is Marchenko-Pastur with parameter "
           "phi/psi\n";
  json j = {{"config", to_json(c)},
            {"theta", io::to_json(t)},
            {"series_residual", residual},
            {"centering_residual", centering_residual(spec)},
            {"marchenko_pastur", mp}};
  io::write_json(fs::path(c.out) / "theta.json", j);
  return kExitOk;
}

int cmd_density(const RunConfig& c, std::ostream& out) {
  const auto spec = activation_of(c);
  const auto t = compute_theta(spec);
  const auto p = c.model_params(t);
  const auto d = theoretical_density(p, density_options(c));
  const fs::path dir(c.out);
  io::write_density_csv(dir / "density.csv", d);
  json meta = io::density_meta(d, p);
  meta["config"] = to_json(c);
  meta["theta"] = io::to_json(t);
  io::write_json(dir / "meta.json", meta);
  out << std::setprecision(8);
  out << "atom_at_zero " << d.atom_at_zero << '\n';
  out << "total_mass   " << d.total_mass() << '\n';
  print_support(out, d);
  if (d.outlier) out << "outlier      " << *d.outlier << '\n';
  out << "wrote " << (dir / "density.csv").string() << '\n';
  return kExitOk;
}

int cmd_simulate(const RunConfig& c, std::ostream& out) {
  const auto spec = activation_of(c);
  const auto sc = simulation_of(c, spec, single_n1(c, "simulate"));
  const auto spectra = replicate(sc, c.replicas, c.seed);
  const fs::path dir(c.out);
  out << std::setprecision(8);
  out << "replica layer n1 min max mean\n";
  for (std::size_t i = 0; i < spectra.size(); ++i) {
    const auto& s = spectra[i];
    const std::size_t r = i / static_cast<std::size_t>(c.layers);
    std::ostringstream stem;
    stem << "spectrum_r" << r << "_l" << s.layer;
    io::write_spectrum_csv(dir / (stem.str() + ".csv"), s);
    io::write_json(dir / (stem.str() + ".json"), io::spectrum_meta(s, sc));
    double mean = 0.0;
    for (double e : s.eigenvalues) mean += e;
    mean /= static_cast<double>(s.eigenvalues.size());
    out << r << ' ' << s.layer << ' ' << s.eigenvalues.size() << ' ' << s.eigenvalues.front()
        << ' ' << s.eigenvalues.back() << ' ' << mean << '\n';
  }
  io::write_json(dir / "meta.json", {{"config", to_json(c)}, {"shape", io::to_json(sc.shape)}});
  return kExitOk;
}

int cmd_compare(const RunConfig& c, std::ostream& out) {
  if (c.n1.empty()) throw UsageError("compare needs at least one --n1 value");
  const auto spec = activation_of(c);
  const auto t = compute_theta(spec);
  const bool exclude = !c.include_outlier && t.theta1b > 0.0;
  std::vector<io::WassersteinRow> rows;
  for (long n1 : c.n1) {
    const auto sc = simulation_of(c, spec, n1);
    const auto p = ModelParams::from_shape(t, sc.shape.n0, sc.shape.n1, sc.shape.m);
    const auto d = theoretical_density(p, density_options(c));
    std::optional<double> outlier_mass;
    if (c.include_outlier && d.outlier) outlier_mass = 1.0 / static_cast<double>(n1);
    const DistributionView theory = density_view(d, outlier_mass);
    std::vector<double> sum(static_cast<std::size_t>(c.layers), 0.0);
    if (!c.self) {
      const auto spectra =
          replicate(sc, c.replicas, derive_seed(c.seed, static_cast<std::uint64_t>(n1)));
      for (const auto& s : spectra)
        sum[static_cast<std::size_t>(s.layer - 1)] += wasserstein1(esd_view(s, exclude), theory);
    } else {
      for (auto& v : sum) v = wasserstein1(theory, theory) * c.replicas;
    }
    for (int l = 1; l <= c.layers; ++l)
      rows.push_back({n1, l, sum[static_cast<std::size_t>(l - 1)] / c.replicas});
  }
  const fs::path dir(c.out);
  io::write_wasserstein_csv(dir / "wasserstein.csv", rows);
  out << std::setprecision(8) << "n1,layer,wasserstein\n";
  for (const auto& r : rows) out << r.n1 << ',' << r.layer << ',' << r.wasserstein << '\n';

  json slopes = json::object();
  if (c.n1.size() >= 2) {
    for (int l = 1; l <= c.layers; ++l) {
      std::vector<double> x, y;
      for (const auto& r : rows)
        if (r.layer == l) {
          x.push_back(static_cast<double>(r.n1));
          y.push_back(r.wasserstein);
        }
      const bool positive = std::all_of(y.begin(), y.end(), [](double v) { return v > 0.0; });
      if (!positive) continue;
      const double slope = loglog_slope(x, y);
      slopes[std::to_string(l)] = slope;
      out << "slope layer " << l << ' ' << slope << '\n';
    }
  }
  io::write_json(dir / "meta.json",
                 {{"config", to_json(c)}, {"theta", io::to_json(t)}, {"slopes", slopes},
                  {"outlier_excluded", exclude}});
  return kExitOk;
}

int cmd_cumulants(const RunConfig& c, std::ostream& out) {
  const auto spec = activation_of(c);
  NetworkShape shape = c.shape_for(single_n1(c, "cumulants"));
  shape.layers = 1;
  const auto dx = dist_of(c, c.sigma_x * c.sigma_x);
  const auto dw = dist_of(c, c.sigma_w * c.sigma_w);
  const auto rep = estimate_entry_cumulants(spec, shape, c.samples, c.seed, dx, dw);
  const auto cyc = wx_cycle_cumulant_check(shape, dx, dw, 2, c.samples, derive_seed(c.seed, 0xC7C));

  out << std::setprecision(6);
  out << std::left << std::setw(12) << "entry" << std::setw(14) << "estimate" << std::setw(14)
      << "std_error" << std::setw(14) << "target" << std::setw(12) << "source" << "result\n";
  auto row = [&](const std::string& label, double est, double se, double target,
                 const std::string& src, bool pass) {
    out << std::setw(12) << label << std::setw(14) << est << std::setw(14) << se << std::setw(14)
        << target << std::setw(12) << src << (pass ? "PASS" : "FAIL") << '\n';
  };
  for (const auto& e : rep.entries)
    row(e.label, e.estimate, e.std_error, e.target, e.target_source, e.pass());
  const bool cyc_pass = std::abs(cyc.estimate - cyc.target) <= 3.0 * cyc.std_error;
  row("wx_cycle2", cyc.estimate, cyc.std_error, cyc.target, "sw^4sx^4/n0", cyc_pass);
  out << std::right;

  json j = io::to_json(rep);
  j["wx_cycle"] = io::to_json(cyc);
  j["wx_cycle"]["pass"] = cyc_pass;
  j["config"] = to_json(c);
  io::write_json(fs::path(c.out) / "cumulants.json", j);
  return kExitOk;
}

// Turns flat config keys into flag tokens, skipping keys already given on
// the command line.
std::vector<std::string> merge_config(std::vector<std::string> args) {
  std::string path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      path = args[i + 1];
      args.erase(args.begin() + static_cast<long>(i), args.begin() + static_cast<long>(i) + 2);
      break;
    }
    if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
      args.erase(args.begin() + static_cast<long>(i));
      break;
    }
  }
  if (path.empty()) return args;

  std::ifstream is(path);
  if (!is) throw UsageError("cannot read config file " + path);
  json j;
  try {
    j = json::parse(is);
  } catch (const json::parse_error& e) {
    throw UsageError("config file " + path + ": " + e.what());
  }
  if (!j.is_object()) throw UsageError("config file must hold a flat JSON object");

  auto given = [&](const std::string& flag) {
    return std::any_of(args.begin(), args.end(), [&](const std::string& a) {
      return a == flag || a.rfind(flag + "=", 0) == 0;
    });
  };
  auto scalar = [](const json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number_unsigned()) return std::to_string(v.get<std::uint64_t>());
    if (v.is_number_integer()) return std::to_string(v.get<long long>());
    if (v.is_number_float()) {
      std::ostringstream os;
      os << std::setprecision(17) << v.get<double>();
      return os.str();
    }
    throw UsageError("config values must be strings, numbers, booleans or arrays");
  };
  for (const auto& [key, value] : j.items()) {
    std::string flag = "--" + key;
    std::replace(flag.begin(), flag.end(), '_', '-');
    if (given(flag)) continue;
    // compare-only switches are ignored by the other subcommands
    if ((flag == "--self" || flag == "--include-outlier") && !given("compare")) continue;
    if (value.is_boolean()) {
      if (value.get<bool>()) args.push_back(flag);
    } else if (value.is_array()) {
      args.push_back(flag);
      for (const auto& v : value) args.push_back(scalar(v));
    } else if (!value.is_null()) {
      args.push_back(flag);
      args.push_back(scalar(value));
    }
  }
  return args;
}

}  // namespace

void RunConfig::validate() const {
  std::ostringstream os;
  if (n0.has_value() != m.has_value()) os << "give both --n0 and --m or neither; ";
  if (has_shape() && (phi || psi)) os << "give either a shape (--n0/--m) or limits (--phi/--psi); ";
  if (phi && !(*phi > 0.0)) os << "--phi must be positive; ";
  if (psi && !(*psi > 0.0)) os << "--psi must be positive; ";
  for (long w : n1)
    if (w < 2) os << "--n1 must be >= 2; ";
  if (layers < 1) os << "--layers must be >= 1; ";
  if (replicas < 1) os << "--replicas must be >= 1; ";
  if (samples < 2) os << "--samples must be >= 2; ";
  if (grid_points < 2) os << "--grid-points must be >= 2; ";
  if (!(eps > 0.0)) os << "--eps must be positive; ";
  if (grid_min && grid_max && !(*grid_min < *grid_max)) os << "--grid-min must be < --grid-max; ";
  const auto msg = os.str();
  if (!msg.empty()) throw UsageError(msg.substr(0, msg.size() - 2));
  parse_entry_kind(dist);
}

NetworkShape RunConfig::shape_for(long width) const {
  NetworkShape s;
  s.n1 = width;
  s.layers = layers;
  if (has_shape()) {
    s.n0 = *n0;
    s.m = *m;
  } else {
    s.n0 = std::max(2L, std::lround(psi.value_or(1.0) * static_cast<double>(width)));
    s.m = std::max(2L, std::lround(static_cast<double>(s.n0) / phi.value_or(1.0)));
  }
  s.validate();
  return s;
}

ModelParams RunConfig::model_params(const ThetaParams& t) const {
  if (n1.size() > 1) throw UsageError("the theory takes a single --n1 value");
  if (has_shape()) {
    if (n1.empty()) throw UsageError("a shape needs --n1 together with --n0 and --m");
    return ModelParams::from_shape(t, *n0, n1.front(), *m);
  }
  std::optional<long> width;
  if (!n1.empty()) width = n1.front();
  return ModelParams::from_limits(t, phi.value_or(1.0), psi.value_or(1.0), width);
}

json to_json(const RunConfig& c) {
  auto opt = [](const auto& v) { return v ? json(*v) : json(nullptr); };
  return {{"activation", c.activation},
          {"sigma_w", c.sigma_w},
          {"sigma_x", c.sigma_x},
          {"sigma_b", c.sigma_b},
          {"n0", opt(c.n0)},
          {"n1", c.n1},
          {"m", opt(c.m)},
          {"phi", opt(c.phi)},
          {"psi", opt(c.psi)},
          {"layers", c.layers},
          {"batch_norm", c.batch_norm},
          {"dist", c.dist},
          {"seed", c.seed},
          {"replicas", c.replicas},
          {"samples", c.samples},
          {"grid_min", opt(c.grid_min)},
          {"grid_max", opt(c.grid_max)},
          {"grid_points", c.grid_points},
          {"eps", c.eps},
          {"out", c.out},
          {"self", c.self},
          {"include_outlier", c.include_outlier}};
}

int run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
  RunConfig c;
  long n0 = 0, m = 0;
  double phi = 0.0, psi = 0.0, grid_min = 0.0, grid_max = 0.0;

  CLI::App app{"Spectra of random feature matrices Y = f(WX/sqrt(n0) + B)", "rfspec"};
  app.fallthrough();
  app.require_subcommand(1, 1);
  app.set_help_all_flag("--help-all", "Show help for every subcommand");
  app.add_option("--config", "Flat JSON file of flag values; command-line flags win");
  app.add_option("--activation", c.activation, "Activation: identity, tanh, cube, he2, abslin")
      ->capture_default_str();
  app.add_option("--sigma-w", c.sigma_w, "Weight standard deviation")->capture_default_str();
  app.add_option("--sigma-x", c.sigma_x, "Data standard deviation")->capture_default_str();
  app.add_option("--sigma-b", c.sigma_b, "Bias standard deviation")->capture_default_str();
  auto* o_n0 = app.add_option("--n0", n0, "Input dimension");
  app.add_option("--n1", c.n1, "Width; compare accepts several")->expected(1, -1);
  auto* o_m = app.add_option("--m", m, "Number of samples");
  auto* o_phi = app.add_option("--phi", phi, "Limit of n0/m");
  auto* o_psi = app.add_option("--psi", psi, "Limit of n0/n1");
  app.add_option("--layers", c.layers, "Number of layers")->capture_default_str();
  app.add_flag("--batch-norm", c.batch_norm, "Rescale each layer to unit mean square");
  app.add_option("--dist", c.dist, "Entry law of W and X: gaussian, rademacher, uniform")
      ->capture_default_str();
  app.add_option("--seed", c.seed, "Master seed")->capture_default_str();
  app.add_option("--replicas", c.replicas, "Independent replicas")->capture_default_str();
  app.add_option("--samples", c.samples, "Draws for cumulant estimates")->capture_default_str();
  auto* o_gmin = app.add_option("--grid-min", grid_min, "Density grid lower end");
  auto* o_gmax = app.add_option("--grid-max", grid_max, "Density grid upper end");
  app.add_option("--grid-points", c.grid_points, "Density grid size")->capture_default_str();
  app.add_option("--eps", c.eps, "Imaginary part used for Stieltjes inversion")
      ->capture_default_str();
  app.add_option("--out", c.out, "Output directory")->capture_default_str();

  auto* theta = app.add_subcommand("theta", "Print theta1, theta1b, theta2 and sigma_tilde");
  auto* density = app.add_subcommand("density", "Write the limiting density to density.csv");
  auto* simulate = app.add_subcommand("simulate", "Sample networks and write their spectra");
  auto* compare = app.add_subcommand("compare", "Wasserstein distance of simulation to theory");
  compare->add_flag("--self", c.self, "Compare the theory with itself");
  compare->add_flag("--include-outlier", c.include_outlier,
                    "Keep the top eigenvalue and give the theory an outlier atom");
  auto* cumulants = app.add_subcommand("cumulants", "Monte Carlo check of entry cumulants");

  try {
    std::vector<std::string> args = merge_config(raw_args);
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  if (*o_n0) c.n0 = n0;
  if (*o_m) c.m = m;
  if (*o_phi) c.phi = phi;
  if (*o_psi) c.psi = psi;
  if (*o_gmin) c.grid_min = grid_min;
  if (*o_gmax) c.grid_max = grid_max;

  try {
    c.validate();
    if (theta->parsed()) return cmd_theta(c, out);
    if (density->parsed()) return cmd_density(c, out);
    if (simulate->parsed()) return cmd_simulate(c, out);
    if (compare->parsed()) return cmd_compare(c, out);
    if (cumulants->parsed()) return cmd_cumulants(c, out);
    return kExitUsage;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const QuadratureError& e) {
    err << "quadrature did not converge: " << e.what() << '\n';
    return kExitQuadrature;
  } catch (const BranchError& e) {
    err << "solver error: " << e.what();
    if (e.index() >= 0) err << " (grid index " << e.index() << ')';
    err << '\n';
    return kExitSolver;
  } catch (const MassError& e) {
    err << "solver error: " << e.what() << '\n';
    return kExitSolver;
  } catch (const NoOutlierError& e) {
    err << "solver error: " << e.what() << '\n';
    return kExitSolver;
  } catch (const DivergenceError& e) {
    err << "divergence at layer " << e.layer() << ": " << e.what() << '\n';
    return kExitDivergence;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
}

}  // namespace rfs::cli
