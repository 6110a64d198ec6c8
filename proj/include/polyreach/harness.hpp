#pragma once

// Replication engine: sample -> Monte Carlo volume curve -> reach estimate ->
// coefficients, repeated under derived seeds, with aggregate statistics and
// CSV/JSON reports.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <limits>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "polyreach/error.hpp"
#include "polyreach/io.hpp"
#include "polyreach/neighbor_index.hpp"
#include "polyreach/point_cloud.hpp"
#include "polyreach/reach.hpp"
#include "polyreach/region.hpp"
#include "polyreach/rng.hpp"
#include "polyreach/volume.hpp"

namespace polyreach {

/// True polynomial reach used for overestimation counts.
inline double true_reach(const RegionSpec& region) { return polynomial_reach(region); }

inline GridFamily grid_family(const RegionSpec& region) {
  return std::holds_alternative<Frame>(region) ? GridFamily::frame : GridFamily::standard;
}

/// gr1 | gr2 | gr3 | explicit:<r1,r2,...>
inline std::vector<double> resolve_grid(const std::string& id, const RegionSpec& region) {
  constexpr std::string_view prefix = "explicit:";
  if (id.rfind(prefix, 0) == 0) {
    auto g = detail::parse_list(id.substr(prefix.size()), ErrorKind::invalid_config);
    for (double& r : g) r = std::round(r / kNormStep) * kNormStep;
    return g;
  }
  return preset_grid(id, grid_family(region));
}

struct ExperimentConfig {
  RegionSpec region = Pacman{};
  std::size_t n = 4000;
  std::size_t replications = 100;
  std::string grid_id = "gr1";
  ReachConfig reach;  ///< grid and n are filled by finalize()
  std::size_t mc_points = 1'000'000;
  double probe_padding = 0.1;  ///< probe box = region box padded by r_K + this
  std::uint64_t seed = 1;
  unsigned workers = 1;
  bool exact_oracle = false;  ///< use exact V in place of the Monte Carlo curve
  std::string out;            ///< report prefix; empty means no files

  /// Resolves the grid and sample size into `reach`, then validates.
  void finalize() {
    reach.grid = resolve_grid(grid_id, region);
    reach.n = n;
    validate();
  }

  void validate() const {
    polyreach::validate(region);
    if (replications < 1) fail(ErrorKind::invalid_config, "replications must be >= 1");
    if (n < 2) fail(ErrorKind::invalid_config, "n must be >= 2");
    if (mc_points < 1) fail(ErrorKind::invalid_config, "mc_points must be >= 1");
    if (!(probe_padding >= 0.0)) fail(ErrorKind::invalid_config, "probe_padding must be >= 0");
    if (workers < 1) fail(ErrorKind::invalid_config, "workers must be >= 1");
    if (dimension(region) < 1 || dimension(region) > 3)
      fail(ErrorKind::unsupported_region, "only dimensions 1 to 3 are supported");
    reach.validate();
    if (reach.n != n) fail(ErrorKind::invalid_config, "reach config sample size differs from n");
  }
};

inline json config_to_json(const ExperimentConfig& c) {
  return json{{"region", region_to_json(c.region)},
              {"n", c.n},
              {"replications", c.replications},
              {"grid", c.grid_id},
              {"grid_radii", c.reach.grid},
              {"degree", c.reach.degree},
              {"ell", c.reach.ell},
              {"eta", c.reach.eta},
              {"numerator_floor", c.reach.numerator_floor},
              {"mc_points", c.mc_points},
              {"probe_padding", c.probe_padding},
              {"seed", c.seed},
              {"workers", c.workers},
              {"exact_oracle", c.exact_oracle},
              {"out", c.out}};
}

inline ExperimentConfig config_from_json(const json& j) {
  try {
    ExperimentConfig c;
    c.region = region_from_json(j.at("region"));
    c.n = j.at("n").get<std::size_t>();
    c.replications = j.at("replications").get<std::size_t>();
    c.grid_id = j.at("grid").get<std::string>();
    c.reach.degree = j.at("degree").get<int>();
    c.reach.ell = j.at("ell").get<int>();
    c.reach.eta = j.at("eta").get<double>();
    c.reach.numerator_floor = j.at("numerator_floor").get<double>();
    c.mc_points = j.at("mc_points").get<std::size_t>();
    c.probe_padding = j.at("probe_padding").get<double>();
    c.seed = j.at("seed").get<std::uint64_t>();
    c.workers = j.at("workers").get<unsigned>();
    c.exact_oracle = j.at("exact_oracle").get<bool>();
    c.out = j.at("out").get<std::string>();
    c.finalize();
    return c;
  } catch (const json::exception& e) {
    fail(ErrorKind::invalid_config, std::string("bad config JSON: ") + e.what());
  }
}

namespace detail {

inline bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  fail(ErrorKind::invalid_config, key + ": expected true or false");
}

inline std::uint64_t parse_count(const std::string& key, const std::string& v) {
  const double x = parse_double(v, ErrorKind::invalid_config);
  if (!(x >= 0.0) || x != std::floor(x) || x > 1.8e19)
    fail(ErrorKind::invalid_config, key + ": expected a non-negative integer");
  return static_cast<std::uint64_t>(x);
}

}  // namespace detail

/// Builds a config from key=value pairs. Unknown keys are rejected.
inline ExperimentConfig config_from_key_values(const KeyValues& kv) {
  ExperimentConfig c;
  for (const auto& [key, value] : kv) {
    if (key == "region") c.region = parse_region(value);
    else if (key == "n") c.n = detail::parse_count(key, value);
    else if (key == "replications") c.replications = detail::parse_count(key, value);
    else if (key == "grid") c.grid_id = value;
    else if (key == "degree") c.reach.degree = static_cast<int>(detail::parse_count(key, value));
    else if (key == "ell") c.reach.ell = static_cast<int>(detail::parse_count(key, value));
    else if (key == "eta") c.reach.eta = detail::parse_double(value, ErrorKind::invalid_config);
    else if (key == "numerator_floor") c.reach.numerator_floor = detail::parse_double(value, ErrorKind::invalid_config);
    else if (key == "mc_points") c.mc_points = detail::parse_count(key, value);
    else if (key == "probe_padding") c.probe_padding = detail::parse_double(value, ErrorKind::invalid_config);
    else if (key == "seed") c.seed = detail::parse_count(key, value);
    else if (key == "workers") c.workers = static_cast<unsigned>(detail::parse_count(key, value));
    else if (key == "exact_oracle") c.exact_oracle = detail::parse_bool(key, value);
    else if (key == "out") c.out = value;
    else fail(ErrorKind::invalid_config, "unknown config key '" + key + "'");
  }
  if (!kv.count("degree")) c.reach.degree = static_cast<int>(dimension(c.region));
  c.finalize();
  return c;
}

struct ReplicationRecord {
  std::size_t index = 0;
  std::uint64_t seed = 0;
  double r_hat = std::numeric_limits<double>::quiet_NaN();
  bool stopped_at_step0 = false;
  std::vector<double> theta;  ///< empty when skipped or failed
  SkipReason skip = SkipReason::none;
  std::size_t sandwich_violations = 0;  ///< grid radii with V_n > V + 3 SE
  bool failed = false;
  std::string error;
};

namespace detail {

template <std::size_t D>
VolumeCurve replication_curve(const ExperimentConfig& cfg, std::uint64_t seed, unsigned mc_workers) {
  const auto radii = lattice(0.0, cfg.reach.grid.back());
  if (cfg.exact_oracle) return exact_volume_curve(cfg.region, radii);
  const auto cloud = sample_uniform<D>(cfg.region, cfg.n, derive_seed(seed, 1));
  const auto index = build_index(cloud);
  const AxisBox box = bounding_box(cfg.region).padded(cfg.reach.grid.back() + cfg.probe_padding);
  const auto dt = mc_distance_transform(index, box, cfg.mc_points, derive_seed(seed, 2), mc_workers);
  return empirical_volume_curve(dt, radii);
}

inline std::size_t count_sandwich_violations(const ExperimentConfig& cfg, const VolumeCurve& curve) {
  if (curve.std_errors.empty()) return 0;
  std::size_t bad = 0;
  for (double r : cfg.reach.grid) {
    const std::size_t k = find_radius(curve, r);
    if (k == static_cast<std::size_t>(-1)) continue;
    if (curve.values[k] > exact_volume(cfg.region, r) + 3.0 * curve.std_errors[k]) ++bad;
  }
  return bad;
}

}  // namespace detail

/// One replication; deterministic in (cfg.seed, index). Errors are recorded,
/// not thrown.
inline ReplicationRecord run_replication(const ExperimentConfig& cfg, std::size_t index, unsigned mc_workers = 1) {
  ReplicationRecord rec;
  rec.index = index;
  rec.seed = derive_seed(cfg.seed, index);
  try {
    VolumeCurve curve;
    switch (dimension(cfg.region)) {
      case 1: curve = detail::replication_curve<1>(cfg, rec.seed, mc_workers); break;
      case 2: curve = detail::replication_curve<2>(cfg, rec.seed, mc_workers); break;
      case 3: curve = detail::replication_curve<3>(cfg, rec.seed, mc_workers); break;
      default: fail(ErrorKind::unsupported_region, "only dimensions 1 to 3 are supported");
    }
    rec.sandwich_violations = detail::count_sandwich_violations(cfg, curve);
    const ReachEstimate est = reach_lower_bound(curve, cfg.reach);
    rec.r_hat = est.r_hat;
    rec.stopped_at_step0 = est.stopped_at_step0;
    const CoefficientEstimate coef = estimate_coefficients(curve, est.r_hat, cfg.reach);
    rec.skip = coef.reason;
    if (coef.fit) rec.theta = coef.fit->coefficients;
  } catch (const Error& e) {
    rec.failed = true;
    rec.error = e.what();
    rec.r_hat = std::numeric_limits<double>::quiet_NaN();
    rec.theta.clear();
  }
  return rec;
}

struct Moments {
  std::size_t count = 0;
  double mean = std::numeric_limits<double>::quiet_NaN();
  double sd = std::numeric_limits<double>::quiet_NaN();
  double mad = std::numeric_limits<double>::quiet_NaN();
  bool sd_defined = false;  ///< false for a single value, where sd is reported as 0
};

inline double median(std::vector<double> v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  const std::size_t h = v.size() / 2;
  return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

/// Raw median absolute deviation, median |x - median(x)|.
inline double median_absolute_deviation(const std::vector<double>& v) {
  const double m = median(v);
  std::vector<double> dev;
  dev.reserve(v.size());
  for (double x : v) dev.push_back(std::abs(x - m));
  return median(dev);
}

inline Moments moments(const std::vector<double>& v) {
  Moments out;
  out.count = v.size();
  if (v.empty()) return out;
  double s = 0.0;
  for (double x : v) s += x;
  out.mean = s / static_cast<double>(v.size());
  if (v.size() == 1) {
    out.sd = 0.0;
  } else {
    double q = 0.0;
    for (double x : v) q += (x - out.mean) * (x - out.mean);
    out.sd = std::sqrt(q / static_cast<double>(v.size() - 1));
    out.sd_defined = true;
  }
  out.mad = median_absolute_deviation(v);
  return out;
}

struct ReplicationReport {
  ExperimentConfig config;
  std::vector<ReplicationRecord> records;
  double true_reach = 0.0;
  Moments r_hat;
  std::vector<Moments> theta;  ///< one per coefficient, over non-skipped runs
  std::size_t overestimations = 0;
  std::size_t step0_stops = 0;
  std::size_t skipped = 0;
  std::size_t failed = 0;
  std::size_t sandwich_violations = 0;
  std::vector<std::string> warnings;
};

/// Recomputes every aggregate from the records. Failed runs are left out of
/// the moments and counted separately.
inline ReplicationReport aggregate(const ExperimentConfig& cfg, std::vector<ReplicationRecord> records) {
  ReplicationReport rep;
  rep.config = cfg;
  rep.records = std::move(records);
  rep.true_reach = true_reach(cfg.region);

  std::vector<double> r;
  std::vector<std::vector<double>> th(static_cast<std::size_t>(cfg.reach.degree) + 1);
  for (const auto& rec : rep.records) {
    rep.sandwich_violations += rec.sandwich_violations;
    if (rec.failed) {
      ++rep.failed;
      rep.warnings.push_back("replication " + std::to_string(rec.index) + " failed: " + rec.error);
      continue;
    }
    r.push_back(rec.r_hat);
    if (rec.r_hat > rep.true_reach + 1e-9) ++rep.overestimations;
    if (rec.stopped_at_step0) ++rep.step0_stops;
    if (rec.skip != SkipReason::none) ++rep.skipped;
    for (std::size_t k = 0; k < rec.theta.size() && k < th.size(); ++k) th[k].push_back(rec.theta[k]);
  }
  rep.r_hat = moments(r);
  for (const auto& v : th) rep.theta.push_back(moments(v));
  if (rep.r_hat.count == 1) rep.warnings.push_back("single replication: sd reported as 0");
  return rep;
}

/// Runs all replications on up to cfg.workers threads. The report does not
/// depend on the worker count.
inline ReplicationReport run_experiment(ExperimentConfig cfg) {
  if (cfg.reach.grid.empty()) cfg.finalize();
  cfg.validate();
  std::vector<ReplicationRecord> records(cfg.replications);
  const unsigned threads = static_cast<unsigned>(std::min<std::size_t>(cfg.workers, cfg.replications));
  // Spare workers go to the distance transform when replications are few.
  const unsigned mc_workers = std::max(1u, cfg.workers / std::max(1u, threads));
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < cfg.replications;) records[i] = run_replication(cfg, i, mc_workers);
  };
  if (threads <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  return aggregate(cfg, std::move(records));
}

struct SummaryRow {
  std::string label;
  Moments stats;
  double true_value = std::numeric_limits<double>::quiet_NaN();
};

/// Rows for R-hat and each coefficient, in table order.
inline std::vector<SummaryRow> summarize(const ReplicationReport& rep) {
  std::vector<SummaryRow> rows;
  rows.push_back({"r_hat", rep.r_hat, rep.true_reach});
  for (std::size_t k = 0; k < rep.theta.size(); ++k)
    rows.push_back({"theta" + std::to_string(k), rep.theta[k], std::numeric_limits<double>::quiet_NaN()});
  return rows;
}

inline std::string format_summary(const ReplicationReport& rep) {
  std::string s;
  char buf[160];
  std::snprintf(buf, sizeof buf, "%-8s %10s %10s %10s %6s\n", "", "mean", "sd", "MAD", "runs");
  s += buf;
  for (const auto& row : summarize(rep)) {
    std::snprintf(buf, sizeof buf, "%-8s %10.4f %10.4f %10.4f %6zu\n", row.label.c_str(), row.stats.mean,
                  row.stats.sd, row.stats.mad, row.stats.count);
    s += buf;
  }
  std::snprintf(buf, sizeof buf,
                "true R %.4g; overestimations %zu; step-0 stops %zu; skipped %zu; failed %zu; sandwich violations %zu\n",
                rep.true_reach, rep.overestimations, rep.step0_stops, rep.skipped, rep.failed,
                rep.sandwich_violations);
  s += buf;
  return s;
}

inline json moments_to_json(const Moments& m) {
  return json{{"count", m.count},
              {"mean", number_to_json(m.mean)},
              {"sd", number_to_json(m.sd)},
              {"mad", number_to_json(m.mad)},
              {"sd_defined", m.sd_defined}};
}

inline json report_to_json(const ReplicationReport& rep) {
  json theta = json::array();
  for (const auto& m : rep.theta) theta.push_back(moments_to_json(m));
  return json{{"config", config_to_json(rep.config)},
              {"true_reach", number_to_json(rep.true_reach)},
              {"r_hat", moments_to_json(rep.r_hat)},
              {"theta", theta},
              {"overestimations", rep.overestimations},
              {"step0_stops", rep.step0_stops},
              {"skipped", rep.skipped},
              {"failed", rep.failed},
              {"sandwich_violations", rep.sandwich_violations},
              {"warnings", rep.warnings}};
}

/// `<prefix>.csv` holds one row per replication, `<prefix>.json` the
/// aggregates and the config.
inline void write_report(const ReplicationReport& rep, const std::string& prefix) {
  if (prefix.empty()) fail(ErrorKind::invalid_input, "empty report path");
  auto out = detail::open_out(prefix + ".csv");
  const std::size_t width = static_cast<std::size_t>(rep.config.reach.degree) + 1;
  out << "index,seed,r_hat,step0,skip,sandwich_violations,failed";
  for (std::size_t k = 0; k < width; ++k) out << ",theta" << k;
  out << ",error\n";
  for (const auto& r : rep.records) {
    out << r.index << ',' << r.seed << ',' << detail::format_double(r.r_hat) << ',' << r.stopped_at_step0 << ','
        << to_string(r.skip) << ',' << r.sandwich_violations << ',' << r.failed;
    for (std::size_t k = 0; k < width; ++k) out << ',' << (k < r.theta.size() ? detail::format_double(r.theta[k]) : "");
    std::string err = r.error;
    std::replace(err.begin(), err.end(), ',', ';');
    std::replace(err.begin(), err.end(), '\n', ' ');
    out << ',' << err << '\n';
  }
  if (!out) fail(ErrorKind::invalid_input, "write failed for '" + prefix + ".csv'");
  write_json(prefix + ".json", report_to_json(rep));
}

/// Reads both files back and recomputes the aggregates from the CSV rows.
inline ReplicationReport read_report(const std::string& prefix) {
  const json j = read_json(prefix + ".json");
  const ExperimentConfig cfg = config_from_json(j.at("config"));
  auto in = detail::open_in(prefix + ".csv");
  std::string line;
  std::getline(in, line);
  const std::size_t width = static_cast<std::size_t>(cfg.reach.degree) + 1;
  std::vector<ReplicationRecord> records;
  while (std::getline(in, line)) {
    if (detail::trim(line).empty()) continue;
    const auto cols = detail::split(line, ',');
    if (cols.size() != 8 + width) fail(ErrorKind::invalid_input, "report row has the wrong column count");
    ReplicationRecord r;
    r.index = detail::parse_count("index", cols[0]);
    r.seed = std::stoull(cols[1]);
    r.r_hat = detail::parse_double(cols[2]);
    r.stopped_at_step0 = cols[3] == "1";
    r.skip = skip_reason_from_string(cols[4]);
    r.sandwich_violations = detail::parse_count("sandwich_violations", cols[5]);
    r.failed = cols[6] == "1";
    for (std::size_t k = 0; k < width; ++k)
      if (!cols[7 + k].empty()) r.theta.push_back(detail::parse_double(cols[7 + k]));
    r.error = cols[7 + width];
    records.push_back(std::move(r));
  }
  return aggregate(cfg, std::move(records));
}

struct TablePreset {
  std::string label;
  ExperimentConfig config;
};

/// Desk-scale versions of the simulation tables, numbered 1 to 10. The
/// union-of-squares tables use two squares one unit of gap apart on each
/// side (half gap 1), so that their true reach is 1.
inline std::vector<TablePreset> table_presets(int table, std::size_t replications = 100,
                                              std::size_t mc_points = 1'000'000, std::uint64_t seed = 1) {
  std::vector<TablePreset> out;
  auto add = [&](std::string label, RegionSpec region, std::size_t n, std::string grid, int ell) {
    ExperimentConfig c;
    c.region = std::move(region);
    c.n = n;
    c.replications = replications;
    c.grid_id = std::move(grid);
    c.reach.ell = ell;
    c.mc_points = mc_points;
    c.seed = derive_seed(seed, static_cast<std::uint64_t>(table) * 1000 + out.size());
    c.finalize();
    out.push_back({std::move(label), std::move(c)});
  };
  auto reach_table = [&](const char* name, RegionSpec region, std::vector<std::size_t> ns, std::vector<int> ells) {
    for (int ell : ells)
      for (std::size_t n : ns)
        for (const char* g : {"gr1", "gr2", "gr3"})
          add(std::string(name) + " n=" + std::to_string(n) + " " + g + " ell=" + std::to_string(ell), region, n, g,
              ell);
  };
  auto coef_table = [&](const char* name, RegionSpec region, std::size_t n, int ell) {
    for (const char* g : {"gr1", "gr2", "gr3"})
      add(std::string(name) + " n=" + std::to_string(n) + " " + g, region, n, g, ell);
  };
  const RegionSpec wide_union = UnionOfSquares{1.0};
  switch (table) {
    case 1: reach_table("pacman", Pacman{}, {2000, 3000, 4000}, {8, 10}); break;
    case 2: reach_table("union", wide_union, {2000, 3000, 4000}, {8, 10}); break;
    case 3: reach_table("frame", Frame{}, {5000, 7000, 9000}, {30, 50}); break;
    case 4: {
      struct Cell { double lam; std::size_t n; double r1; };
      for (Cell c : {Cell{0.1, 1000, 0.15}, Cell{0.1, 1000, 0.2}, Cell{0.1, 1000, 0.25}, Cell{0.05, 1500, 0.12},
                     Cell{0.05, 1500, 0.15}, Cell{0.05, 1500, 0.2}, Cell{0.05, 1800, 0.12}, Cell{0.05, 1800, 0.15},
                     Cell{0.05, 1800, 0.2}}) {
        std::string grid = "explicit:";
        const auto radii = arithmetic_grid(c.r1, 0.4, 1.98);
        for (std::size_t k = 0; k < radii.size(); ++k) grid += (k ? "," : "") + detail::format_double(radii[k]);
        char label[96];
        std::snprintf(label, sizeof label, "union lambda=%g n=%zu r1=%g", c.lam, c.n, c.r1);
        add(label, UnionOfSquares{c.lam}, c.n, grid, 8);
      }
      break;
    }
    case 5: coef_table("pacman", Pacman{}, 5000, 8); break;
    case 6: coef_table("pacman", Pacman{}, 7000, 8); break;
    case 7: coef_table("union", wide_union, 5000, 8); break;
    case 8: coef_table("union", wide_union, 7000, 8); break;
    case 9: coef_table("frame", Frame{}, 5000, 30); break;
    case 10: coef_table("frame", Frame{}, 7000, 30); break;
    default: fail(ErrorKind::invalid_config, "tables are numbered 1 to 10");
  }
  return out;
}

}  // namespace polyreach
