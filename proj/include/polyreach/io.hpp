#pragma once

// File formats: clouds and curves as CSV, fits and estimates as JSON, region
// specs as short strings ("union:0.05") or JSON objects, and flat key=value
// config files.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "polyreach/error.hpp"
#include "polyreach/point_cloud.hpp"
#include "polyreach/polyfit.hpp"
#include "polyreach/reach.hpp"
#include "polyreach/region.hpp"
#include "polyreach/volume.hpp"

namespace polyreach {

using json = nlohmann::json;

namespace detail {

inline std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return {};
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(trim(cur));
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

inline double parse_double(const std::string& s, ErrorKind kind = ErrorKind::invalid_input) {
  const std::string t = trim(s);
  if (t == "inf" || t == "+inf") return std::numeric_limits<double>::infinity();
  if (t == "-inf") return -std::numeric_limits<double>::infinity();
  if (t == "nan") return std::numeric_limits<double>::quiet_NaN();
  try {
    std::size_t used = 0;
    const double v = std::stod(t, &used);
    if (used != t.size()) throw std::invalid_argument(t);
    return v;
  } catch (const std::exception&) {
    fail(kind, "not a number: '" + s + "'");
  }
}

inline std::vector<double> parse_list(const std::string& s, ErrorKind kind = ErrorKind::invalid_input) {
  std::vector<double> out;
  for (const auto& part : split(s, ',')) out.push_back(parse_double(part, kind));
  return out;
}

inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::ofstream open_out(const std::string& path) {
  if (path.empty()) fail(ErrorKind::invalid_input, "empty output path");
  std::ofstream out(path);
  if (!out) fail(ErrorKind::invalid_input, "cannot write '" + path + "'");
  return out;
}

inline std::ifstream open_in(const std::string& path) {
  if (path.empty()) fail(ErrorKind::invalid_input, "empty input path");
  std::ifstream in(path);
  if (!in) fail(ErrorKind::invalid_input, "cannot read '" + path + "'");
  return in;
}

}  // namespace detail

// JSON has no infinities; non-finite values travel as strings.
inline json number_to_json(double v) {
  if (std::isfinite(v)) return v;
  return detail::format_double(v);
}

inline double number_from_json(const json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) return detail::parse_double(j.get<std::string>());
  fail(ErrorKind::invalid_input, "expected a number in JSON");
}

inline json numbers_to_json(const std::vector<double>& v) {
  json a = json::array();
  for (double x : v) a.push_back(number_to_json(x));
  return a;
}

inline std::vector<double> numbers_from_json(const json& j) {
  std::vector<double> out;
  for (const auto& x : j) out.push_back(number_from_json(x));
  return out;
}

// ---- regions

/// pacman | union[:half_gap] | frame[:side] | disk[:radius[:dim]] | box:lo1,lo2:hi1,hi2
inline RegionSpec parse_region(const std::string& text) {
  const auto parts = detail::split(detail::trim(text), ':');
  if (parts.empty() || parts[0].empty()) fail(ErrorKind::invalid_config, "empty region spec");
  const std::string& kind = parts[0];
  auto arg = [&](std::size_t i) { return detail::parse_double(parts.at(i), ErrorKind::invalid_config); };
  RegionSpec region;
  if (kind == "pacman" && parts.size() == 1) {
    region = Pacman{};
  } else if ((kind == "union" || kind == "union-of-squares") && parts.size() <= 2) {
    region = UnionOfSquares{parts.size() == 2 ? arg(1) : 0.5};
  } else if (kind == "frame" && parts.size() <= 2) {
    region = Frame{parts.size() == 2 ? arg(1) : 1.0};
  } else if (kind == "disk" && parts.size() <= 3) {
    Disk d;
    if (parts.size() >= 2) d.radius = arg(1);
    if (parts.size() == 3) {
      const double dim = arg(2);
      if (dim != std::floor(dim) || dim < 1) fail(ErrorKind::invalid_config, "disk dimension must be a positive integer");
      d.dim = static_cast<std::size_t>(dim);
    }
    region = d;
  } else if (kind == "box" && parts.size() == 3) {
    region = Box{detail::parse_list(parts[1], ErrorKind::invalid_config),
                 detail::parse_list(parts[2], ErrorKind::invalid_config)};
  } else {
    fail(ErrorKind::invalid_config, "unrecognised region spec '" + text + "'");
  }
  validate(region);
  return region;
}

inline std::string format_region(const RegionSpec& region) {
  using detail::format_double;
  return std::visit(
      detail::overloaded{
          [](const Pacman&) { return std::string("pacman"); },
          [](const UnionOfSquares& u) { return "union:" + format_double(u.half_gap); },
          [](const Frame& f) { return "frame:" + format_double(f.side); },
          [](const Disk& d) { return "disk:" + format_double(d.radius) + ":" + std::to_string(d.dim); },
          [](const Box& b) {
            std::string s = "box:";
            for (std::size_t j = 0; j < b.lo.size(); ++j) s += (j ? "," : "") + format_double(b.lo[j]);
            s += ":";
            for (std::size_t j = 0; j < b.hi.size(); ++j) s += (j ? "," : "") + format_double(b.hi[j]);
            return s;
          },
      },
      region);
}

inline json region_to_json(const RegionSpec& region) {
  json j = std::visit(detail::overloaded{
                          [](const Pacman&) { return json::object(); },
                          [](const UnionOfSquares& u) { return json{{"half_gap", u.half_gap}}; },
                          [](const Frame& f) { return json{{"side", f.side}}; },
                          [](const Disk& d) { return json{{"radius", d.radius}, {"dim", d.dim}}; },
                          [](const Box& b) { return json{{"lo", b.lo}, {"hi", b.hi}}; },
                      },
                      region);
  j["kind"] = region_name(region);
  return j;
}

inline RegionSpec region_from_json(const json& j) {
  try {
    const std::string kind = j.at("kind").get<std::string>();
    RegionSpec region;
    if (kind == "pacman") region = Pacman{};
    else if (kind == "union-of-squares") region = UnionOfSquares{j.at("half_gap").get<double>()};
    else if (kind == "frame") region = Frame{j.at("side").get<double>()};
    else if (kind == "disk") region = Disk{j.at("radius").get<double>(), j.at("dim").get<std::size_t>()};
    else if (kind == "box") region = Box{j.at("lo").get<std::vector<double>>(), j.at("hi").get<std::vector<double>>()};
    else fail(ErrorKind::invalid_config, "unknown region kind '" + kind + "'");
    validate(region);
    return region;
  } catch (const json::exception& e) {
    fail(ErrorKind::invalid_config, std::string("bad region JSON: ") + e.what());
  }
}

// ---- point clouds

template <std::size_t D>
void write_cloud_csv(const std::string& path, const PointCloud<D>& cloud) {
  auto out = detail::open_out(path);
  for (std::size_t j = 0; j < D; ++j) out << (j ? "," : "") << 'x' << j + 1;
  out << '\n';
  for (const auto& p : cloud.points) {
    for (std::size_t j = 0; j < D; ++j) out << (j ? "," : "") << detail::format_double(p[j]);
    out << '\n';
  }
  if (!out) fail(ErrorKind::invalid_input, "write failed for '" + path + "'");
}

/// Number of columns in a cloud CSV header.
inline std::size_t cloud_csv_dimension(const std::string& path) {
  auto in = detail::open_in(path);
  std::string header;
  if (!std::getline(in, header)) fail(ErrorKind::invalid_input, "'" + path + "' is empty");
  const auto cols = detail::split(detail::trim(header), ',');
  for (std::size_t j = 0; j < cols.size(); ++j)
    if (cols[j] != "x" + std::to_string(j + 1))
      fail(ErrorKind::invalid_input, "cloud header must read x1,...,xd");
  return cols.size();
}

template <std::size_t D>
PointCloud<D> read_cloud_csv(const std::string& path) {
  if (cloud_csv_dimension(path) != D) fail(ErrorKind::invalid_input, "cloud dimension mismatch in '" + path + "'");
  auto in = detail::open_in(path);
  std::string line;
  std::getline(in, line);
  PointCloud<D> cloud;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (detail::trim(line).empty()) continue;
    const auto cols = detail::split(line, ',');
    if (cols.size() != D)
      fail(ErrorKind::invalid_input, path + ":" + std::to_string(lineno) + ": expected " + std::to_string(D) + " columns");
    Point<D> p{};
    for (std::size_t j = 0; j < D; ++j) {
      p[j] = detail::parse_double(cols[j]);
      if (!std::isfinite(p[j])) fail(ErrorKind::invalid_input, path + ":" + std::to_string(lineno) + ": non-finite coordinate");
    }
    cloud.points.push_back(p);
  }
  if (cloud.empty()) fail(ErrorKind::invalid_input, "'" + path + "' has no points");
  return cloud;
}

// ---- volume curves

inline json provenance_to_json(const CurveProvenance& prov) {
  return std::visit(detail::overloaded{
                        [](const EmpiricalProvenance& e) {
                          return json{{"kind", "empirical"}, {"probes", e.probes}, {"box_measure", e.box_measure},
                                      {"seed", e.seed}, {"box_lo", e.box.lo}, {"box_hi", e.box.hi}};
                        },
                        [](const ExactProvenance& e) { return json{{"kind", "exact"}, {"region", e.region}}; },
                    },
                    prov);
}

inline CurveProvenance provenance_from_json(const json& j) {
  try {
    if (j.at("kind") == "exact") return ExactProvenance{j.at("region").get<std::string>()};
    EmpiricalProvenance e;
    e.probes = j.at("probes").get<std::size_t>();
    e.box_measure = j.at("box_measure").get<double>();
    e.seed = j.at("seed").get<std::uint64_t>();
    e.box = AxisBox{j.at("box_lo").get<std::vector<double>>(), j.at("box_hi").get<std::vector<double>>()};
    return e;
  } catch (const json::exception& e) {
    fail(ErrorKind::invalid_input, std::string("bad curve provenance: ") + e.what());
  }
}

/// Columns r,volume[,std_error]; provenance goes to `<path>.json`.
inline void write_curve_csv(const std::string& path, const VolumeCurve& curve) {
  auto out = detail::open_out(path);
  const bool se = !curve.std_errors.empty();
  out << "r,volume" << (se ? ",std_error" : "") << '\n';
  for (std::size_t i = 0; i < curve.size(); ++i) {
    out << detail::format_double(curve.radii[i]) << ',' << detail::format_double(curve.values[i]);
    if (se) out << ',' << detail::format_double(curve.std_errors[i]);
    out << '\n';
  }
  auto side = detail::open_out(path + ".json");
  side << provenance_to_json(curve.provenance).dump(2) << '\n';
}

/// Without a sidecar the curve is taken as exact input of unknown origin.
inline VolumeCurve read_curve_csv(const std::string& path) {
  auto in = detail::open_in(path);
  std::string line;
  if (!std::getline(in, line)) fail(ErrorKind::invalid_input, "'" + path + "' is empty");
  const auto header = detail::split(detail::trim(line), ',');
  if (header.size() < 2 || header[0] != "r" || header[1] != "volume")
    fail(ErrorKind::invalid_input, "curve header must start with r,volume");
  const bool se = header.size() == 3 && header[2] == "std_error";
  if (header.size() > 2 && !se) fail(ErrorKind::invalid_input, "unexpected curve columns");

  VolumeCurve curve;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (detail::trim(line).empty()) continue;
    const auto cols = detail::split(line, ',');
    if (cols.size() != header.size())
      fail(ErrorKind::invalid_input, path + ":" + std::to_string(lineno) + ": wrong column count");
    curve.radii.push_back(detail::parse_double(cols[0]));
    curve.values.push_back(detail::parse_double(cols[1]));
    if (se) curve.std_errors.push_back(detail::parse_double(cols[2]));
  }
  std::ifstream side(path + ".json");
  if (side) {
    try {
      curve.provenance = provenance_from_json(json::parse(side));
    } catch (const json::exception& e) {
      fail(ErrorKind::invalid_input, std::string("bad curve sidecar: ") + e.what());
    }
  } else {
    curve.provenance = ExactProvenance{"unknown"};
  }
  curve.validate();
  return curve;
}

// ---- fits and estimates

inline json polyfit_to_json(const PolyFit& fit) {
  json j{{"interval", {fit.interval.lo, fit.interval.hi}},
         {"degree", fit.degree},
         {"coefficients", numbers_to_json(fit.coefficients)},
         {"residual", number_to_json(fit.residual)}};
  if (!fit.legendre.empty()) j["legendre"] = numbers_to_json(fit.legendre);
  return j;
}

inline PolyFit polyfit_from_json(const json& j) {
  try {
    PolyFit fit;
    fit.interval = Interval{j.at("interval").at(0).get<double>(), j.at("interval").at(1).get<double>()};
    fit.degree = j.at("degree").get<int>();
    fit.coefficients = numbers_from_json(j.at("coefficients"));
    fit.residual = number_from_json(j.at("residual"));
    if (j.contains("legendre")) fit.legendre = numbers_from_json(j.at("legendre"));
    return fit;
  } catch (const json::exception& e) {
    fail(ErrorKind::invalid_input, std::string("bad fit JSON: ") + e.what());
  }
}

inline json reach_estimate_to_json(const ReachEstimate& est) {
  return json{{"r_hat", est.r_hat},
              {"stopped_at_step0", est.stopped_at_step0},
              {"step0_residual", number_to_json(est.step0_residual)},
              {"threshold", number_to_json(est.threshold)},
              {"break_index", est.break_index},
              {"ratios", numbers_to_json(est.ratios)},
              {"numerators", numbers_to_json(est.numerators)},
              {"denominators", numbers_to_json(est.denominators)}};
}

inline ReachEstimate reach_estimate_from_json(const json& j) {
  try {
    ReachEstimate est;
    est.r_hat = j.at("r_hat").get<double>();
    est.stopped_at_step0 = j.at("stopped_at_step0").get<bool>();
    est.step0_residual = number_from_json(j.at("step0_residual"));
    est.threshold = number_from_json(j.at("threshold"));
    est.break_index = j.at("break_index").get<std::size_t>();
    est.ratios = numbers_from_json(j.at("ratios"));
    est.numerators = numbers_from_json(j.at("numerators"));
    est.denominators = numbers_from_json(j.at("denominators"));
    return est;
  } catch (const json::exception& e) {
    fail(ErrorKind::invalid_input, std::string("bad estimate JSON: ") + e.what());
  }
}

inline json coefficient_estimate_to_json(const CoefficientEstimate& c) {
  if (c.skipped()) return json{{"skipped", true}, {"reason", to_string(c.reason)}};
  json j = polyfit_to_json(*c.fit);
  j["skipped"] = false;
  return j;
}

inline void write_json(const std::string& path, const json& j) {
  auto out = detail::open_out(path);
  out << j.dump(2) << '\n';
}

inline json read_json(const std::string& path) {
  auto in = detail::open_in(path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    fail(ErrorKind::invalid_input, "'" + path + "': " + e.what());
  }
}

// ---- key=value config files

using KeyValues = std::map<std::string, std::string>;

/// One `key = value` per line; `#` starts a comment. Duplicate keys are an error.
inline KeyValues parse_key_values(std::istream& in, const std::string& source = "config") {
  KeyValues kv;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const std::string where = source + ":" + std::to_string(lineno);
    if (eq == std::string::npos) fail(ErrorKind::invalid_config, where + ": expected key = value");
    const std::string key = detail::trim(line.substr(0, eq));
    if (key.empty()) fail(ErrorKind::invalid_config, where + ": empty key");
    if (!kv.emplace(key, detail::trim(line.substr(eq + 1))).second)
      fail(ErrorKind::invalid_config, where + ": duplicate key '" + key + "'");
  }
  return kv;
}

inline KeyValues read_key_values(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::invalid_config, "cannot read config '" + path + "'");
  return parse_key_values(in, path);
}

}  // namespace polyreach
