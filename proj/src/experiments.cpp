#include "sbrsp/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "sbrsp/error.hpp"
#include "sbrsp/metrics.hpp"

namespace sbrsp {

std::vector<AblationConfig> standard_ablation_configs() {
  std::vector<AblationConfig> out;
  out.push_back({"Base", {}});
  FeatureFlags f;
  f.euclidean_kmeans = false;
  f.size_reduction = false;
  out.push_back({"1. No Euclidean constrained k-means & no size reduction", f});
  f = {};
  f.road_network_awareness = false;
  out.push_back({"2. No road network-awareness", f});
  f = {};
  f.size_reduction = false;
  out.push_back({"3. No clustering problem size reduction", f});
  f = {};
  f.a5_removal = false;
  out.push_back({"4. No removal of school-to-stop arcs", f});
  f = {};
  f.objective_modification = false;
  out.push_back({"5. No modification to the routing objective", f});
  f = {};
  f.preassignment = false;
  out.push_back({"6. No student-to-stop pre-assignment", f});
  f = {};
  f.reduced_routing = false;
  out.push_back({"7. No reduced routing", f});
  f.preassignment = false;
  out.push_back({"8. No pre-assignment & no reduced routing", f});
  return out;
}

namespace {

std::string fmt(double v, const char* spec = "%.4f") {
  if (std::isnan(v)) return "";
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

std::string describe(const milp::SolveOptions& s) {
  std::ostringstream os;
  os << fmt(s.time_limit_s, "%.17g") << "/" << fmt(s.mip_rel_gap, "%.17g") << "/" << fmt(s.mip_abs_gap, "%.17g") << "/"
     << s.threads << "/" << (s.node_limit ? std::to_string(*s.node_limit) : "-") << "/" << s.backend;
  return os.str();
}

std::string status_of(const Error& e) {
  switch (e.kind()) {
    case ErrorKind::no_solution:
      return "No sol.";
    case ErrorKind::infeasible:
    case ErrorKind::capacity:
    case ErrorKind::stranded_student:
      return "Infeasible";
    default:
      return "error: " + std::string(error_kind_name(e.kind()));
  }
}

}  // namespace

std::string config_hash(const PipelineOptions& opts) {
  const auto& f = opts.features;
  std::ostringstream os;
  os << f.euclidean_kmeans << f.size_reduction << f.road_network_awareness << f.a5_removal << f.objective_modification
     << f.preassignment << f.reduced_routing << "|" << describe(opts.cluster_solve) << "|" << describe(opts.stopmin_solve)
     << "|" << describe(opts.reduced_solve) << "|" << describe(opts.full_solve) << "|" << opts.seed;
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : os.str()) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::vector<AblationRow> run_ablation(const Scenario& sc, std::span<const AblationConfig> configs,
                                      const PipelineOptions& opts) {
  const auto base = std::find_if(configs.begin(), configs.end(), [](const AblationConfig& c) { return c.features == FeatureFlags{}; });
  if (base == configs.end()) throw Error(ErrorKind::usage, "ablation needs the Base configuration (every feature on)");
  std::vector<AblationRow> rows;
  for (const auto& cfg : configs) {
    PipelineOptions o = opts;
    o.features = cfg.features;
    AblationRow row;
    row.name = cfg.name;
    row.features = cfg.features;
    row.config_hash = config_hash(o);
    row.seed = o.seed;
    const auto start = std::chrono::steady_clock::now();
    try {
      const auto res = run_hracssas4(sc, o);
      row.status = res.solution.status();
      if (row.status == "ok") {
        row.objective = res.solution.total_ride_time;
      } else {
        for (const auto& r : res.solution.routes) {
          if (r.status != "ok") {
            row.message = "bus " + std::to_string(r.bus_id) + ": " + r.message;
            break;
          }
        }
      }
    } catch (const Error& e) {
      row.status = status_of(e);
      row.message = e.what();
    }
    row.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    rows.push_back(std::move(row));
  }
  const auto& b = rows[static_cast<std::size_t>(base - configs.begin())];
  if (b.objective && *b.objective > 0.0) {
    for (auto& r : rows) {
      if (r.objective) r.gap_percent = (*r.objective - *b.objective) / *b.objective * 100.0;
    }
  }
  return rows;
}

namespace {

void fill_point(SweepPoint& pt, const Instance& inst, const PipelineOptions& opts) {
  try {
    const Scenario sc = make_scenario(inst, inst.status_quo_riders());
    const auto res = run_hracssas4(sc, opts);
    pt.status = res.solution.status();
    if (pt.status != "ok") {
      for (const auto& r : res.solution.routes) {
        if (r.status != "ok") {
          pt.message = "bus " + std::to_string(r.bus_id) + ": " + r.message;
          break;
        }
      }
      return;
    }
    MetricsInputs mi;
    mi.walk_speed_mps = inst.params.walk_speed_mps;
    const auto m = compute_metrics(sc, res.solution, mi);
    pt.avg_brts_min = m.avg_brts_min;
    pt.avg_stt_min = m.avg_stt_min;
    pt.avg_walk_min = m.avg_stt_min - m.avg_brts_min;
    pt.stop_count = m.stop_count;
  } catch (const Error& e) {
    pt.status = e.kind() == ErrorKind::stranded_student ? "stranded" : status_of(e);
    pt.message = e.what();
  }
}

// Longest conceivable simple route: every node once over its slowest arc,
// plus the largest service time at each node.
double unbounded_route_time(const Instance& inst, const Scenario& sc) {
  const auto& D = sc.matrix;
  const int k = D.stop_count() + static_cast<int>(inst.schools.size());
  double longest = 0.0;
  for (int a = 0; a < k; ++a) {
    for (int b = 0; b < k; ++b) longest = std::max(longest, D.physical(a, b));
  }
  const auto& p = inst.params;
  const double riders = static_cast<double>(inst.students.size());
  return 2.0 * (k * (longest + p.board_intercept_s + p.deboard_intercept_s) +
                riders * (p.board_slope_s + p.deboard_slope_s)) + 1.0;
}

}  // namespace

std::vector<SweepPoint> run_fleet_sweep(const Instance& inst, std::span<const int> sizes, bool include_unbounded,
                                        const PipelineOptions& opts) {
  if (inst.buses.empty()) throw Error(ErrorKind::validation, "fleet sweep needs at least one bus to copy", "buses");
  std::optional<double> free_T;
  std::vector<SweepPoint> out;
  for (int size : sizes) {
    if (size < 1) throw Error(ErrorKind::usage, "fleet sizes must be at least 1");
    for (bool bounded : {true, false}) {
      if (!bounded && !include_unbounded) continue;
      Instance copy = inst;
      copy.buses.clear();
      for (int k = 0; k < size; ++k) {
        Bus b = inst.buses.front();
        b.id = k + 1;
        copy.buses.push_back(b);
      }
      if (!bounded) {
        if (!free_T) free_T = unbounded_route_time(inst, make_scenario(inst, {}));
        copy.params.max_route_time_s = *free_T;
      }
      SweepPoint pt;
      pt.setting = size;
      pt.time_bound = bounded;
      fill_point(pt, copy, opts);
      out.push_back(std::move(pt));
    }
  }
  return out;
}

std::vector<SweepPoint> run_walk_sweep(const Instance& inst, std::span<const double> distances_m,
                                       const PipelineOptions& opts) {
  if (!std::is_sorted(distances_m.begin(), distances_m.end()) ||
      std::any_of(distances_m.begin(), distances_m.end(), [](double d) { return d < 0.0; })) {
    throw Error(ErrorKind::usage, "walk distances must be non-negative and ascending");
  }
  std::vector<SweepPoint> out;
  for (double d : distances_m) {
    SweepPoint pt;
    pt.setting = d;
    Instance copy = inst;
    copy.params.max_walk_m = d;
    try {
      validate_instance(copy);
      fill_point(pt, copy, opts);
    } catch (const Error& e) {
      pt.status = e.kind() == ErrorKind::stranded_student ? "stranded" : status_of(e);
      pt.message = e.what();
    }
    out.push_back(std::move(pt));
  }
  return out;
}

namespace {

std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::string ablation_csv(const std::vector<AblationRow>& rows) {
  std::ostringstream os;
  os << "config,status,objective_s,gap_percent,wall_time_s,config_hash,seed,message\n";
  for (const auto& r : rows) {
    os << csv_quote(r.name) << "," << r.status << "," << (r.objective ? fmt(*r.objective) : "") << ","
       << (r.gap_percent ? fmt(*r.gap_percent, "%.2f") : (r.status == "ok" ? "" : r.status)) << ","
       << fmt(r.wall_time_s, "%.3f") << "," << r.config_hash << "," << r.seed << "," << csv_quote(r.message) << "\n";
  }
  return os.str();
}

std::string fleet_csv(const std::vector<SweepPoint>& points) {
  std::ostringstream os;
  os << "buses,time_bound,status,avg_brts_min,avg_stt_min,message\n";
  for (const auto& p : points) {
    os << static_cast<int>(p.setting) << "," << (p.time_bound ? "yes" : "no") << "," << p.status << ","
       << fmt(p.avg_brts_min) << "," << fmt(p.avg_stt_min) << "," << csv_quote(p.message) << "\n";
  }
  return os.str();
}

std::string walk_csv(const std::vector<SweepPoint>& points) {
  std::ostringstream os;
  os << "max_walk_m,status,avg_brts_min,avg_walk_min,avg_stt_min,stop_count,message\n";
  for (const auto& p : points) {
    os << fmt(p.setting, "%.2f") << "," << p.status << "," << fmt(p.avg_brts_min) << "," << fmt(p.avg_walk_min) << ","
       << fmt(p.avg_stt_min) << "," << p.stop_count << "," << csv_quote(p.message) << "\n";
  }
  return os.str();
}

}  // namespace sbrsp
