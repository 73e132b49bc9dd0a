#include "sbrsp/routing.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <thread>

#include "sbrsp/error.hpp"
#include "sbrsp/milp/clustering_models.hpp"
#include "sbrsp/milp/solver.hpp"

namespace sbrsp {

namespace {

LocalProblem make_local(const Scenario& sc, const std::vector<int>& students, const std::vector<int>& stops,
                        const std::vector<int>& buses) {
  const auto& inst = sc.inst();
  LocalProblem lp;
  lp.buses = buses;
  lp.stop_index = stops;
  lp.rider_index = students;
  for (int s : students) lp.school_index.push_back(inst.students[s].school);
  std::sort(lp.school_index.begin(), lp.school_index.end());
  lp.school_index.erase(std::unique(lp.school_index.begin(), lp.school_index.end()), lp.school_index.end());

  auto& p = lp.problem;
  std::map<int, int> local_stop;
  for (std::size_t i = 0; i < stops.size(); ++i) {
    local_stop[stops[i]] = static_cast<int>(i);
    p.stop_ids.push_back(inst.stops[stops[i]].id);
  }
  for (int m : lp.school_index) p.school_ids.push_back(inst.schools[m].id);
  for (int s : students) {
    RoutingProblem::Rider r;
    r.id = inst.students[s].id;
    r.school = static_cast<int>(std::lower_bound(lp.school_index.begin(), lp.school_index.end(), inst.students[s].school) -
                                lp.school_index.begin());
    for (const auto& reach : inst.catchments[s]) {
      auto it = local_stop.find(reach.stop);
      if (it == local_stop.end()) continue;
      r.stops.push_back(it->second);
      r.walk_m.push_back(reach.walk_m);
    }
    p.riders.push_back(std::move(r));
  }
  for (int b : buses) p.buses.push_back({inst.buses[b].id, inst.buses[b].capacity});
  p.delta = sc.matrix.restrict(stops, lp.school_index);
  p.board_intercept = inst.params.board_intercept_s;
  p.board_slope = inst.params.board_slope_s;
  p.deboard_intercept = inst.params.deboard_intercept_s;
  p.deboard_slope = inst.params.deboard_slope_s;
  p.max_time = inst.params.max_route_time_s;
  return lp;
}

StageReport report_of(const milp::MiloSolution& sol) {
  StageReport r;
  r.status = std::string(milp::status_name(sol.status));
  r.objective = sol.has_values() ? sol.objective : NAN;
  r.best_bound = sol.best_bound;
  r.wall_time_s = sol.wall_time_s;
  return r;
}

void require_values(const milp::MiloSolution& sol, const std::string& stage) {
  if (sol.status == milp::SolveStatus::infeasible || sol.status == milp::SolveStatus::unbounded) {
    throw Error(ErrorKind::infeasible, stage + " model is infeasible: no route fits the time budget and capacity");
  }
  if (!sol.has_values()) {
    std::string msg = stage + " solve hit its limit without a solution";
    if (std::isfinite(sol.best_bound)) msg += " (best bound " + std::to_string(sol.best_bound) + ")";
    throw Error(ErrorKind::no_solution, msg);
  }
}

milp::SolveOptions seeded(milp::SolveOptions o, std::uint64_t seed) {
  o.seed = seed;
  return o;
}

}  // namespace

LocalProblem make_cluster_problem(const Scenario& sc, const ClusterAssignment& ca, int bus) {
  const auto& inst = sc.inst();
  std::vector<int> students;
  std::set<int> reachable;
  for (int s : ca.members(bus)) {
    students.push_back(sc.riders[s]);
    for (const auto& reach : inst.catchments[sc.riders[s]]) reachable.insert(reach.stop);
  }
  // A visited stop must serve a rider, so stops nobody can walk to never
  // appear in a feasible route.
  std::vector<int> stops;
  for (int i : ca.stops.at(bus)) {
    if (reachable.count(i)) stops.push_back(i);
  }
  return make_local(sc, students, stops, {bus});
}

LocalProblem make_full_problem(const Scenario& sc) {
  const auto& inst = sc.inst();
  std::vector<int> stops;
  for (int s : sc.riders) {
    for (const auto& reach : inst.catchments[s]) stops.push_back(reach.stop);
  }
  std::sort(stops.begin(), stops.end());
  stops.erase(std::unique(stops.begin(), stops.end()), stops.end());
  std::vector<int> buses(inst.buses.size());
  for (std::size_t k = 0; k < buses.size(); ++k) buses[k] = static_cast<int>(k);
  return make_local(sc, sc.riders, stops, buses);
}

PreassignResult stop_min_preassign(const RoutingProblem& p, const milp::SolveOptions& opts) {
  std::vector<std::vector<int>> catchments;
  for (const auto& r : p.riders) {
    if (r.stops.empty()) {
      throw Error(ErrorKind::stranded_student, "student " + std::to_string(r.id) + " has no reachable stop",
                  "student " + std::to_string(r.id));
    }
    catchments.push_back(r.stops);
  }
  const int n = p.stop_count();
  const auto model = milp::build_stop_min_model(n, catchments);
  const auto sol = milp::solve(model, opts);
  require_values(sol, "stop selection");
  PreassignResult out;
  out.report = report_of(sol);
  std::vector<char> chosen(n, 0);
  for (int i = 0; i < n; ++i) chosen[i] = sol.values[model.index(milp::cluster_names::r(i))] > 0.5;
  std::vector<int> used(n, 0);
  for (const auto& r : p.riders) {
    int best = -1;
    double best_walk = INFINITY;
    for (std::size_t q = 0; q < r.stops.size(); ++q) {
      const int i = r.stops[q];
      if (!chosen[i]) continue;
      const double walk = q < r.walk_m.size() ? r.walk_m[q] : 0.0;
      if (best < 0 || walk < best_walk || (walk == best_walk && p.stop_ids[i] < p.stop_ids[best])) {
        best = i;
        best_walk = walk;
      }
    }
    if (best < 0) throw Error(ErrorKind::backend, "stop selection left student " + std::to_string(r.id) + " uncovered");
    out.pre.stop_of.push_back(best);
    used[best] += 1;
  }
  for (int i = 0; i < n; ++i) {
    if (used[i] > 0) out.pre.selected.push_back(i);
  }
  return out;
}

RoutingResult solve_reduced_routing(const RoutingProblem& p, const StopPreassignment* pre, const FeatureFlags& features,
                                    const milp::SolveOptions& opts) {
  RoutingVariant variant;
  variant.school_to_stop_arcs = !features.a5_removal;
  variant.objective = features.objective_modification ? RoutingObjective::load_travel : RoutingObjective::ride_time;
  variant.fixed = pre;
  if (p.buses.size() != 1 || p.riders.empty()) {
    throw Error(ErrorKind::validation, "reduced routing needs one bus and at least one student");
  }
  const auto model = build_routing_model(p, variant);
  const auto sol = milp::solve(model, opts);
  require_values(sol, "reduced routing");
  RoutingResult out;
  out.values = model.to_map(sol.values);
  out.tours = extract_tours(p, variant, out.values);
  out.report = report_of(sol);
  return out;
}

LiftResult lift_to_warm_start(const RoutingProblem& p, const std::vector<Tour>& tours) {
  LiftResult out;
  for (const auto& t : tours) {
    const auto sch = schedule_tour(p, t);
    if (!sch.feasible && out.reason.empty()) out.reason = sch.reason;
  }
  out.values = tour_values(p, tours);
  out.violations = validate_solution(p, full_variant(), out.values);
  if (out.reason.empty() && !out.violations.empty()) out.reason = "violates " + out.violations.front().constraint;
  out.ok = out.reason.empty();
  out.objective = ride_time_objective(p, out.values);
  return out;
}

RoutingResult solve_full_routing(const RoutingProblem& p, const milp::ValueMap* warm, const milp::SolveOptions& opts) {
  auto model = build_full_model(p);
  if (warm) model.set_warm_start(*warm);
  const auto sol = milp::solve(model, opts);
  require_values(sol, "full routing");
  RoutingResult out;
  out.values = model.to_map(sol.values);
  out.tours = extract_tours(p, full_variant(), out.values);
  out.report = report_of(sol);
  return out;
}

void fill_route(const Scenario& sc, const LocalProblem& lp, const Tour& tour, BusRoute& route,
                std::vector<StudentLeg>& legs) {
  const auto& inst = sc.inst();
  const auto& p = lp.problem;
  const auto& D = p.delta;
  const auto sch = schedule_tour(p, tour);
  if (!sch.feasible) throw Error(ErrorKind::infeasible, "extracted route is inconsistent: " + sch.reason);
  route.bus = lp.buses.at(tour.bus);
  route.bus_id = inst.buses[route.bus].id;
  route.visits.clear();
  std::map<int, double> time_at;
  for (std::size_t q = 0; q < tour.nodes.size(); ++q) {
    const int node = tour.nodes[q];
    RouteVisit v;
    v.is_school = D.is_school(node);
    v.index = v.is_school ? lp.school_index[node - 1 - D.stop_count()] : lp.stop_index[node - 1];
    v.id = v.is_school ? inst.schools[v.index].id : inst.stops[v.index].id;
    v.time = sch.arrival[q];
    v.boarded = sch.boarded[q];
    v.alighted = sch.alighted[q];
    v.load_after = sch.load_after[q];
    time_at[node] = v.time;
    route.visits.push_back(v);
  }
  route.end_time = sch.end_time;
  route.ride_time = sch.ride_time;
  for (std::size_t s = 0; s < p.riders.size(); ++s) {
    const int i = tour.stop_of[s];
    if (i < 0) continue;
    const auto& r = p.riders[s];
    StudentLeg leg;
    leg.student = lp.rider_index[s];
    leg.student_id = r.id;
    leg.bus_id = route.bus_id;
    leg.stop_id = p.stop_ids[i];
    leg.school_id = p.school_ids[r.school];
    leg.pick_time = time_at.at(D.stop(i));
    leg.drop_time = time_at.at(D.school(r.school));
    const auto pos = std::find(r.stops.begin(), r.stops.end(), i) - r.stops.begin();
    leg.walk_m = r.walk_m.at(pos);
    legs.push_back(leg);
  }
}

namespace {

// Pre-assigned stops in id order, then the needed schools in id order.
Tour preassigned_tour(const RoutingProblem& p, const StopPreassignment& pre) {
  Tour t;
  t.bus = 0;
  for (int i : pre.selected) t.nodes.push_back(p.delta.stop(i));
  for (int m = 0; m < p.school_count(); ++m) t.nodes.push_back(p.delta.school(m));
  t.stop_of = pre.stop_of;
  return t;
}

}  // namespace

ClusterOutcome route_cluster(const Scenario& sc, const ClusterAssignment& ca, int bus, const PipelineOptions& opts) {
  const auto& inst = sc.inst();
  const auto& f = opts.features;
  ClusterOutcome out;
  auto& route = out.route;
  route.bus = bus;
  route.bus_id = inst.buses[bus].id;
  auto& st = route.stages;
  st.stopmin.status = st.reduced.status = st.full.status = "skipped";
  const std::uint64_t seed = opts.seed + static_cast<std::uint64_t>(bus);
  try {
    const LocalProblem lp = make_cluster_problem(sc, ca, bus);
    const auto& p = lp.problem;
    st.riders = static_cast<int>(p.riders.size());
    st.candidate_stops = p.stop_count();
    std::optional<PreassignResult> pre;
    if (f.preassignment) {
      pre = stop_min_preassign(p, seeded(opts.stopmin_solve, seed));
      st.stopmin = pre->report;
      st.selected_stops = static_cast<int>(pre->pre.selected.size());
    }
    std::optional<LiftResult> lift;
    if (f.reduced_routing) {
      const auto red = solve_reduced_routing(p, pre ? &pre->pre : nullptr, f, seeded(opts.reduced_solve, seed));
      st.reduced = red.report;
      lift = lift_to_warm_start(p, red.tours);
    } else if (pre) {
      lift = lift_to_warm_start(p, {preassigned_tour(p, pre->pre)});
    }
    if (lift) {
      st.lift_failed = !lift->ok;
      st.lift_reason = lift->reason;
      if (lift->ok) st.lifted_objective = lift->objective;
    }
    const auto full = solve_full_routing(p, lift && lift->ok ? &lift->values : nullptr, seeded(opts.full_solve, seed));
    st.full = full.report;
    st.warm_start_kept = lift && lift->ok && full.report.objective >= lift->objective - 1e-9;
    fill_route(sc, lp, full.tours.at(0), route, out.legs);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::infeasible) {
      route.status = "Infeasible";
    } else if (e.kind() == ErrorKind::no_solution) {
      route.status = "No sol.";
    } else {
      throw Error(e.kind(), "bus " + std::to_string(route.bus_id) + ": " + e.what(), e.subject());
    }
    route.message = e.what();
  }
  return out;
}

RouteSolution route_all_clusters(const Scenario& sc, const ClusterAssignment& ca, const PipelineOptions& opts) {
  const int K = ca.bus_count();
  std::vector<ClusterOutcome> results(K);
  std::vector<std::exception_ptr> errors(K);
  const int jobs = std::max(1, std::min(opts.jobs, K));
  auto work = [&](int worker) {
    for (int k = worker; k < K; k += jobs) {
      try {
        results[k] = route_cluster(sc, ca, k, opts);
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  };
  if (jobs == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < jobs; ++w) pool.emplace_back(work, w);
    for (auto& t : pool) t.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  RouteSolution sol;
  sol.pipeline = "hracssas4";
  for (auto& r : results) {
    sol.total_ride_time += r.route.ride_time;
    sol.legs.insert(sol.legs.end(), r.legs.begin(), r.legs.end());
    sol.routes.push_back(std::move(r.route));
  }
  std::sort(sol.legs.begin(), sol.legs.end(), [](const StudentLeg& a, const StudentLeg& b) { return a.student < b.student; });
  return sol;
}

std::string RouteSolution::status() const {
  int failed = 0;
  bool infeasible = false;
  for (const auto& r : routes) {
    if (r.status != "ok") failed += 1;
    infeasible = infeasible || r.status == "Infeasible";
  }
  if (failed == 0) return "ok";
  if (infeasible) return "Infeasible";
  return failed == static_cast<int>(routes.size()) ? "No sol." : "No sol.*";
}

void RouteSolution::require_ok() const {
  for (const auto& r : routes) {
    if (r.status == "ok") continue;
    const ErrorKind kind = r.status == "Infeasible" ? ErrorKind::infeasible : ErrorKind::no_solution;
    throw Error(kind, "bus " + std::to_string(r.bus_id) + ": " + r.message, "bus " + std::to_string(r.bus_id));
  }
}

std::vector<milp::Violation> validate_route_solution(const Scenario& sc, const RouteSolution& sol) {
  const LocalProblem lp = make_full_problem(sc);
  const auto& p = lp.problem;
  const auto& D = p.delta;
  std::map<int, int> stop_local, school_local, rider_local;
  for (std::size_t i = 0; i < lp.stop_index.size(); ++i) stop_local[lp.stop_index[i]] = static_cast<int>(i);
  for (std::size_t m = 0; m < lp.school_index.size(); ++m) school_local[lp.school_index[m]] = static_cast<int>(m);
  for (std::size_t s = 0; s < lp.rider_index.size(); ++s) rider_local[lp.rider_index[s]] = static_cast<int>(s);
  std::map<Id, int> stop_by_id;
  for (std::size_t i = 0; i < sc.inst().stops.size(); ++i) stop_by_id[sc.inst().stops[i].id] = static_cast<int>(i);

  std::vector<milp::Violation> out;
  std::vector<Tour> tours;
  for (std::size_t k = 0; k < lp.buses.size(); ++k) {
    Tour t;
    t.bus = static_cast<int>(k);
    t.stop_of.assign(p.riders.size(), -1);
    for (const auto& r : sol.routes) {
      if (r.bus != lp.buses[k]) continue;
      for (const auto& v : r.visits) {
        if (v.is_school) {
          auto it = school_local.find(v.index);
          if (it == school_local.end()) {
            out.push_back({"route visits a school no rider attends", 1.0});
            continue;
          }
          t.nodes.push_back(D.school(it->second));
        } else {
          auto it = stop_local.find(v.index);
          if (it == stop_local.end()) {
            out.push_back({"route visits a stop no rider can reach", 1.0});
            continue;
          }
          t.nodes.push_back(D.stop(it->second));
        }
      }
      for (const auto& leg : sol.legs) {
        if (leg.bus_id != r.bus_id) continue;
        auto rs = rider_local.find(leg.student);
        auto ss = stop_by_id.find(leg.stop_id);
        if (rs == rider_local.end() || ss == stop_by_id.end() || !stop_local.count(ss->second)) {
          out.push_back({"leg of student " + std::to_string(leg.student_id) + " does not map to the model", 1.0});
          continue;
        }
        t.stop_of[rs->second] = stop_local.at(ss->second);
      }
    }
    tours.push_back(std::move(t));
  }
  if (!out.empty()) return out;
  return validate_solution(p, full_variant(), tour_values(p, tours));
}

}  // namespace sbrsp
