#include "sbrsp/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

#include "sbrsp/error.hpp"

namespace sbrsp {

double percentile(std::vector<double> values, double level) {
  if (values.empty()) return NAN;
  std::sort(values.begin(), values.end());
  const double pos = level / 100.0 * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = static_cast<std::size_t>(std::ceil(pos));
  return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

std::vector<std::string> check_route_solution(const Scenario& sc, const RouteSolution& sol) {
  const auto& inst = sc.inst();
  std::vector<std::string> out;
  std::set<int> seen;
  for (const auto& leg : sol.legs) {
    if (!seen.insert(leg.student).second) out.push_back("student " + std::to_string(leg.student_id) + " has two legs");
  }
  for (int s : sc.riders) {
    if (!seen.count(s)) out.push_back("rider " + std::to_string(inst.students[s].id) + " has no leg");
  }
  for (const auto& r : sol.routes) {
    if (r.status != "ok") {
      out.push_back("bus " + std::to_string(r.bus_id) + " has no route (" + r.status + ")");
      continue;
    }
    if (r.end_time > inst.params.max_route_time_s + 1e-6) out.push_back("bus " + std::to_string(r.bus_id) + " exceeds T");
    double prev = -1.0;
    for (const auto& v : r.visits) {
      if (v.load_after > inst.buses[r.bus].capacity) out.push_back("bus " + std::to_string(r.bus_id) + " over capacity");
      if (v.time < prev) out.push_back("bus " + std::to_string(r.bus_id) + " goes back in time");
      prev = v.time;
    }
    for (const auto& leg : sol.legs) {
      if (leg.bus_id != r.bus_id) continue;
      const RouteVisit* stop = nullptr;
      const RouteVisit* school = nullptr;
      for (const auto& v : r.visits) {
        if (!v.is_school && v.id == leg.stop_id) stop = &v;
        if (v.is_school && v.id == leg.school_id) school = &v;
      }
      const std::string who = "student " + std::to_string(leg.student_id);
      if (!stop || !school) {
        out.push_back(who + " rides a bus that skips its stop or school");
        continue;
      }
      if (std::abs(stop->time - leg.pick_time) > 1e-6 || std::abs(school->time - leg.drop_time) > 1e-6) {
        out.push_back(who + " times disagree with the route");
      }
      if (leg.drop_time < leg.pick_time) out.push_back(who + " is dropped before pick-up");
      if (inst.students[leg.student].id != leg.student_id ||
          inst.schools[inst.students[leg.student].school].id != leg.school_id) {
        out.push_back(who + " goes to the wrong school");
      }
    }
  }
  return out;
}

MetricsReport compute_metrics(const Scenario& sc, const RouteSolution& sol, const MetricsInputs& in) {
  const auto problems = check_route_solution(sc, sol);
  if (!problems.empty()) throw Error(ErrorKind::validation, "solution rejected: " + problems.front());
  const auto& inst = sc.inst();
  const auto& D = sc.matrix;
  const int n = D.stop_count();
  MetricsReport rep;
  rep.instance = inst.name;
  rep.riders = static_cast<int>(sol.legs.size());

  std::map<Id, int> stop_index, school_index;
  for (std::size_t i = 0; i < inst.stops.size(); ++i) stop_index[inst.stops[i].id] = static_cast<int>(i);
  for (std::size_t m = 0; m < inst.schools.size(); ++m) school_index[inst.schools[m].id] = static_cast<int>(m);

  std::map<Id, std::vector<const StudentLeg*>> by_bus;
  for (const auto& leg : sol.legs) by_bus[leg.bus_id].push_back(&leg);
  std::map<const StudentLeg*, double> order;
  for (auto& [bus, legs] : by_bus) {
    std::sort(legs.begin(), legs.end(), [](const StudentLeg* a, const StudentLeg* b) {
      return a->pick_time != b->pick_time ? a->pick_time < b->pick_time : a->student_id < b->student_id;
    });
    for (std::size_t q = 0; q < legs.size(); ++q) {
      order[legs[q]] = static_cast<double>(q + 1) / static_cast<double>(legs.size());
    }
  }

  std::set<Id> stops_used;
  std::map<Id, std::vector<double>> school_brts;
  for (const auto& leg : sol.legs) {
    StudentMetrics m;
    m.student_id = leg.student_id;
    m.bus_id = leg.bus_id;
    m.school_id = leg.school_id;
    m.brts_s = leg.drop_time - leg.pick_time;
    m.walk_s = leg.walk_m / in.walk_speed_mps;
    m.stt_s = m.brts_s + m.walk_s;
    const double direct = D(D.stop(stop_index.at(leg.stop_id)), 1 + n + school_index.at(leg.school_id));
    m.detour_ratio = direct > 0.0 ? m.brts_s / direct : 1.0;
    m.pickup_order = order.at(&leg);
    rep.total_brts_min += m.brts_s / 60.0;
    rep.total_stt_min += m.stt_s / 60.0;
    stops_used.insert(leg.stop_id);
    school_brts[leg.school_id].push_back(m.brts_s / 60.0);
    auto& worst = rep.bus_max_brts_min[leg.bus_id][leg.school_id];
    worst = std::max(worst, m.brts_s / 60.0);
    rep.students.push_back(m);
  }
  if (rep.riders > 0) {
    rep.avg_brts_min = rep.total_brts_min / rep.riders;
    rep.avg_stt_min = rep.total_stt_min / rep.riders;
  }
  rep.stop_count = static_cast<int>(stops_used.size());
  rep.students_per_stop = rep.stop_count > 0 ? static_cast<double>(rep.riders) / rep.stop_count : 0.0;
  int routes = 0;
  for (const auto& r : sol.routes) {
    if (r.visits.empty()) continue;
    rep.total_btt_min += (r.end_time - r.visits.front().time) / 60.0;
    routes += 1;
  }
  rep.avg_btt_min = routes > 0 ? rep.total_btt_min / routes : 0.0;
  const int cap = inst.total_capacity();
  rep.utilization = cap > 0 ? static_cast<double>(rep.riders) / cap : 0.0;
  for (const auto& [school, values] : school_brts) {
    for (int level : kPercentileLevels) rep.school_percentiles_min[school][level] = percentile(values, level);
  }
  if (!in.car_time_s.empty()) {
    double pcts = 0.0;
    for (const auto& [s, t] : in.car_time_s) pcts += t;
    rep.total_pcts_min = pcts / 60.0;
    rep.car_commuters = static_cast<int>(in.car_time_s.size());
  }
  return rep;
}

MetricDelta delta_of(const std::string& metric, double a, double b, bool lower_is_better) {
  MetricDelta d;
  d.metric = metric;
  d.a = a;
  d.b = b;
  d.diff = lower_is_better ? a - b : b - a;
  d.percent = a != 0.0 ? d.diff / a * 100.0 : 0.0;
  return d;
}

std::vector<MetricDelta> compare(const MetricsReport& a, const MetricsReport& b) {
  if (a.instance != b.instance) {
    throw Error(ErrorKind::validation, "cannot compare reports of instances '" + a.instance + "' and '" + b.instance + "'");
  }
  std::vector<MetricDelta> out = {
      delta_of("total_brts_min", a.total_brts_min, b.total_brts_min),
      delta_of("avg_brts_min", a.avg_brts_min, b.avg_brts_min),
      delta_of("total_stt_min", a.total_stt_min, b.total_stt_min),
      delta_of("avg_stt_min", a.avg_stt_min, b.avg_stt_min),
      delta_of("stop_count", a.stop_count, b.stop_count),
      delta_of("total_btt_min", a.total_btt_min, b.total_btt_min),
      delta_of("avg_btt_min", a.avg_btt_min, b.avg_btt_min),
      delta_of("utilization", a.utilization, b.utilization, false),
  };
  if (a.total_pcts_min && b.total_pcts_min) out.push_back(delta_of("total_pcts_min", *a.total_pcts_min, *b.total_pcts_min));
  return out;
}

namespace {

std::string num(double v) {
  if (std::isnan(v)) return "";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

}  // namespace

std::string metrics_csv(const std::vector<std::pair<std::string, MetricsReport>>& reports) {
  std::ostringstream os;
  os << "metric";
  for (const auto& [name, r] : reports) os << "," << name;
  os << "\n";
  auto row = [&](const std::string& metric, auto get) {
    os << metric;
    for (const auto& [name, r] : reports) os << "," << num(get(r));
    os << "\n";
  };
  row("riders", [](const MetricsReport& r) { return static_cast<double>(r.riders); });
  row("total_brts_min", [](const MetricsReport& r) { return r.total_brts_min; });
  row("avg_brts_min", [](const MetricsReport& r) { return r.avg_brts_min; });
  row("total_stt_min", [](const MetricsReport& r) { return r.total_stt_min; });
  row("avg_stt_min", [](const MetricsReport& r) { return r.avg_stt_min; });
  row("stop_count", [](const MetricsReport& r) { return static_cast<double>(r.stop_count); });
  row("students_per_stop", [](const MetricsReport& r) { return r.students_per_stop; });
  row("total_btt_min", [](const MetricsReport& r) { return r.total_btt_min; });
  row("avg_btt_min", [](const MetricsReport& r) { return r.avg_btt_min; });
  row("utilization", [](const MetricsReport& r) { return r.utilization; });
  row("total_pcts_min", [](const MetricsReport& r) { return r.total_pcts_min.value_or(NAN); });
  std::set<Id> schools;
  for (const auto& [name, r] : reports) {
    for (const auto& [school, levels] : r.school_percentiles_min) schools.insert(school);
  }
  for (Id school : schools) {
    for (int level : kPercentileLevels) {
      row("school_" + std::to_string(school) + "_p" + std::to_string(level) + "_brts_min", [&](const MetricsReport& r) {
        auto it = r.school_percentiles_min.find(school);
        return it == r.school_percentiles_min.end() ? NAN : it->second.at(level);
      });
    }
  }
  return os.str();
}

std::string compare_csv(const std::vector<MetricDelta>& deltas) {
  std::ostringstream os;
  os << "metric,a,b,diff,percent\n";
  for (const auto& d : deltas) os << d.metric << "," << num(d.a) << "," << num(d.b) << "," << num(d.diff) << "," << num(d.percent) << "\n";
  return os.str();
}

}  // namespace sbrsp
