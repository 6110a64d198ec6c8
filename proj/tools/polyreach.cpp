// polyreach command-line front end.

#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "polyreach/polyreach.hpp"

using namespace polyreach;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitInput = 1;

void emit(const json& j, const std::string& out) {
  if (out.empty() || out == "-") std::cout << j.dump(2) << '\n';
  else write_json(out, j);
}

template <std::size_t D>
void sample_cmd(const RegionSpec& region, std::size_t n, std::uint64_t seed, const std::string& out) {
  const auto cloud = sample_uniform<D>(region, n, seed);
  write_cloud_csv(out, cloud);
}

template <std::size_t D>
VolumeCurve curve_from_cloud(const std::string& path, double r_max, std::size_t mc_points, double padding,
                             std::uint64_t seed, unsigned workers) {
  const auto cloud = read_cloud_csv<D>(path);
  const auto index = build_index(cloud);
  const AxisBox box = cloud.bounding_box().padded(r_max + padding);
  const auto dt = mc_distance_transform(index, box, mc_points, seed, workers);
  return empirical_volume_curve(dt, lattice(0.0, r_max));
}

struct ReachOptions {
  std::string grid = "gr1";
  std::string family = "standard";
  std::size_t n = 0;
  int degree = 2;
  int ell = 8;
  double eta = 0.1;
  double floor = ReachConfig{}.numerator_floor;

  ReachConfig build() const {
    if (family != "standard" && family != "frame") fail(ErrorKind::invalid_config, "--family is standard or frame");
    ReachConfig cfg;
    cfg.grid = resolve_grid(grid, family == "frame" ? RegionSpec{Frame{}} : RegionSpec{Pacman{}});
    cfg.n = n;
    cfg.degree = degree;
    cfg.ell = ell;
    cfg.eta = eta;
    cfg.numerator_floor = floor;
    cfg.validate();
    return cfg;
  }

  void attach(CLI::App* cmd, bool needs_n) {
    cmd->add_option("--grid", grid, "gr1 | gr2 | gr3 | explicit:<r1,r2,...>");
    cmd->add_option("--family", family, "preset grid family: standard or frame");
    auto* opt = cmd->add_option("--n", n, "sample size behind the curve");
    if (needs_n) opt->required();
    cmd->add_option("--degree", degree, "ambient dimension d");
    cmd->add_option("--ell", ell, "denominator degree");
    cmd->add_option("--eta", eta, "threshold exponent slack");
    cmd->add_option("--numerator-floor", floor, "left end of the ratio numerators");
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Polynomial reach and volume-polynomial estimation from point clouds"};
  app.require_subcommand(1);

  std::uint64_t seed = 1;
  unsigned workers = 1;
  std::size_t mc_points = 1'000'000;
  std::string out;

  // sample
  auto* sample = app.add_subcommand("sample", "draw a uniform sample from a region");
  std::string region_text = "pacman";
  std::size_t n = 1000;
  sample->add_option("--region", region_text, "pacman | union[:half_gap] | frame[:side] | disk[:radius[:dim]] | box:lo:hi");
  sample->add_option("--n", n, "sample size")->required();
  sample->add_option("--seed", seed);
  sample->add_option("--out", out, "cloud CSV")->required();

  // volume-curve
  auto* vcurve = app.add_subcommand("volume-curve", "volume curve of a cloud (Monte Carlo) or an exact region");
  std::string cloud_path;
  bool exact = false;
  double r_max = 1.98;
  double padding = 0.1;
  auto* cloud_opt = vcurve->add_option("--cloud", cloud_path, "cloud CSV");
  auto* exact_opt = vcurve->add_flag("--exact", exact, "exact curve of --region instead");
  cloud_opt->excludes(exact_opt);
  vcurve->add_option("--region", region_text);
  vcurve->add_option("--r-max", r_max, "last radius; the curve covers [0, r-max] in steps of 0.001");
  vcurve->add_option("--padding", padding, "extra probe-box margin beyond r-max");
  vcurve->add_option("--mc-points", mc_points);
  vcurve->add_option("--seed", seed);
  vcurve->add_option("--workers", workers);
  vcurve->add_option("--out", out, "curve CSV")->required();

  // fit
  auto* fit = app.add_subcommand("fit", "L2 polynomial fit of a curve on an interval");
  std::string curve_path;
  std::vector<double> interval;
  int degree = 2;
  fit->add_option("--curve", curve_path)->required();
  fit->add_option("--interval", interval, "a,b")->required()->expected(2)->delimiter(',');
  fit->add_option("--degree", degree);
  fit->add_option("--out", out, "fit JSON (stdout when omitted)");

  // reach
  auto* reach = app.add_subcommand("reach", "lower-bound reach estimate of a curve");
  ReachOptions reach_opts;
  reach->add_option("--curve", curve_path)->required();
  reach_opts.attach(reach, true);
  reach->add_option("--out", out, "estimate JSON (stdout when omitted)");

  // coeffs
  auto* coeffs = app.add_subcommand("coeffs", "volume-polynomial coefficients on [0.1, R-hat]");
  ReachOptions coeff_opts;
  double r_hat = 0.0;
  coeffs->add_option("--curve", curve_path)->required();
  coeffs->add_option("--r-hat", r_hat)->required();
  coeff_opts.attach(coeffs, false);
  coeffs->add_option("--out", out, "fit JSON (stdout when omitted)");

  // replicate
  auto* replicate = app.add_subcommand("replicate", "run an experiment from a key=value config file");
  std::string config_path;
  std::string grid_override;
  int ell_override = -1;
  double eta_override = -1.0;
  replicate->add_option("config", config_path)->required();
  auto* seed_opt = replicate->add_option("--seed", seed);
  auto* workers_opt = replicate->add_option("--workers", workers);
  auto* mc_opt = replicate->add_option("--mc-points", mc_points);
  replicate->add_option("--grid", grid_override);
  replicate->add_option("--ell", ell_override);
  replicate->add_option("--eta", eta_override);
  replicate->add_option("--out", out, "report prefix (<out>.csv, <out>.json)");

  // tables
  auto* tables = app.add_subcommand("tables", "desk-scale reproductions of the simulation tables");
  std::vector<int> which;
  std::size_t replications = 100;
  tables->add_option("--table", which, "table numbers 1..10 (default: all)")->delimiter(',');
  tables->add_option("--replications", replications);
  tables->add_option("--mc-points", mc_points);
  tables->add_option("--seed", seed);
  tables->add_option("--workers", workers);
  tables->add_option("--out", out, "directory prefix for per-row reports");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*sample) {
      const RegionSpec region = parse_region(region_text);
      switch (dimension(region)) {
        case 1: sample_cmd<1>(region, n, seed, out); break;
        case 2: sample_cmd<2>(region, n, seed, out); break;
        case 3: sample_cmd<3>(region, n, seed, out); break;
        default: fail(ErrorKind::unsupported_region, "only dimensions 1 to 3 are supported");
      }
    } else if (*vcurve) {
      VolumeCurve curve;
      if (exact) {
        curve = exact_volume_curve(parse_region(region_text), lattice(0.0, r_max));
      } else {
        if (cloud_path.empty()) fail(ErrorKind::invalid_config, "volume-curve needs --cloud or --exact");
        switch (cloud_csv_dimension(cloud_path)) {
          case 1: curve = curve_from_cloud<1>(cloud_path, r_max, mc_points, padding, seed, workers); break;
          case 2: curve = curve_from_cloud<2>(cloud_path, r_max, mc_points, padding, seed, workers); break;
          case 3: curve = curve_from_cloud<3>(cloud_path, r_max, mc_points, padding, seed, workers); break;
          default: fail(ErrorKind::unsupported_region, "only dimensions 1 to 3 are supported");
        }
      }
      write_curve_csv(out, curve);
    } else if (*fit) {
      const VolumeCurve curve = read_curve_csv(curve_path);
      emit(polyfit_to_json(l2_project(curve, Interval{interval[0], interval[1]}, degree)), out);
    } else if (*reach) {
      const VolumeCurve curve = read_curve_csv(curve_path);
      emit(reach_estimate_to_json(reach_lower_bound(curve, reach_opts.build())), out);
    } else if (*coeffs) {
      if (coeff_opts.n == 0) coeff_opts.n = 2;  // U_n plays no part here
      const VolumeCurve curve = read_curve_csv(curve_path);
      emit(coefficient_estimate_to_json(estimate_coefficients(curve, r_hat, coeff_opts.build())), out);
    } else if (*replicate) {
      KeyValues kv = read_key_values(config_path);
      if (*seed_opt) kv["seed"] = std::to_string(seed);
      if (*workers_opt) kv["workers"] = std::to_string(workers);
      if (*mc_opt) kv["mc_points"] = std::to_string(mc_points);
      if (!grid_override.empty()) kv["grid"] = grid_override;
      if (ell_override >= 0) kv["ell"] = std::to_string(ell_override);
      if (eta_override > 0.0) kv["eta"] = detail::format_double(eta_override);
      if (!out.empty()) kv["out"] = out;
      const ExperimentConfig cfg = config_from_key_values(kv);
      const ReplicationReport rep = run_experiment(cfg);
      for (const auto& w : rep.warnings) std::cerr << "warning: " << w << '\n';
      std::cout << format_summary(rep);
      if (!cfg.out.empty()) write_report(rep, cfg.out);
    } else if (*tables) {
      if (which.empty())
        for (int t = 1; t <= 10; ++t) which.push_back(t);
      for (int t : which) {
        const auto presets = table_presets(t, replications, mc_points, seed);
        std::cout << "== table " << t << '\n';
        for (std::size_t k = 0; k < presets.size(); ++k) {
          ExperimentConfig cfg = presets[k].config;
          cfg.workers = workers;
          const ReplicationReport rep = run_experiment(cfg);
          std::cout << "-- " << presets[k].label << '\n' << format_summary(rep);
          if (!out.empty()) write_report(rep, out + "table" + std::to_string(t) + "_" + std::to_string(k));
        }
      }
    }
  } catch (const NumericalFailure& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    switch (e.kind()) {
      case ErrorKind::invalid_config:
      case ErrorKind::unsupported_region: return kExitConfig;
      case ErrorKind::numerical_failure: return kExitNumerical;
      default: return kExitInput;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  }
  return kExitOk;
}
