#include "sbrsp/modechoice.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <set>

#include "sbrsp/error.hpp"

namespace sbrsp {

namespace {

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double choice_sum(std::span<const double> deltas, double A) {
  double sum = 0.0;
  for (double d : deltas) sum += sigmoid(A * d);
  return sum;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

}  // namespace

double choice_probability(double A, double car_s, double bus_s) {
  if (!std::isfinite(bus_s)) return 0.0;
  if (!std::isfinite(car_s)) return 1.0;
  return sigmoid(A * (car_s - bus_s));
}

Calibration calibrate_A(std::span<const double> deltas, double target) {
  Calibration out;
  out.target = target;
  auto f = [&](double A) { return choice_sum(deltas, A) - target; };
  double dmax = 0.0;
  for (double d : deltas) dmax = std::max(dmax, std::abs(d));
  if (dmax == 0.0) {
    out.achieved = 0.5 * static_cast<double>(deltas.size());
    if (std::abs(out.achieved - target) > 0.5) {
      throw Error(ErrorKind::calibration, "calibration infeasible: no A reaches " + fmt(target) + " riders, every probability is 0.5 (sum " +
                                              fmt(out.achieved) + ")");
    }
    return out;
  }

  // The sum need not be monotone in A, so reaching its large-A limit once
  // proves nothing; widen until every term is saturated.
  double dmin = dmax;
  for (double d : deltas) {
    if (d != 0.0) dmin = std::min(dmin, std::abs(d));
  }
  dmin = std::max(dmin, dmax * 1e-9);
  const double a_lo = 1e-3 / dmax;
  double a_max = 1.0 / dmax;
  while (a_max * dmin < 40.0) a_max *= 2.0;

  constexpr int kPerDecade = 40;
  const int points = static_cast<int>(std::ceil(std::log10(a_max / a_lo) * kPerDecade)) + 1;
  std::vector<double> grid = {0.0};
  for (int i = 0; i < points; ++i) grid.push_back(a_lo * std::pow(a_max / a_lo, static_cast<double>(i) / (points - 1)));

  double best_A = 0.0, best_err = INFINITY, lo_sum = INFINITY, hi_sum = -INFINITY;
  double prev_A = 0.0, prev_f = 0.0;
  for (std::size_t g = 0; g < grid.size(); ++g) {
    const double A = grid[g];
    const double fa = f(A);
    lo_sum = std::min(lo_sum, fa + target);
    hi_sum = std::max(hi_sum, fa + target);
    if (std::abs(fa) < best_err) {
      best_err = std::abs(fa);
      best_A = A;
    }
    if (fa == 0.0) {
      out.A = A;
      out.achieved = choice_sum(deltas, A);
      return out;
    }
    if (g > 0 && (prev_f < 0.0) != (fa < 0.0)) {
      double lo = prev_A, hi = A, flo = prev_f;
      for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        const double fm = f(mid);
        if ((fm < 0.0) == (flo < 0.0)) {
          lo = mid;
          flo = fm;
        } else {
          hi = mid;
        }
      }
      out.A = std::abs(f(lo)) <= std::abs(f(hi)) ? lo : hi;
      out.achieved = choice_sum(deltas, out.A);
      return out;
    }
    prev_A = A;
    prev_f = fa;
  }
  if (best_err <= 0.5) {
    out.A = best_A;
    out.achieved = choice_sum(deltas, best_A);
    return out;
  }
  throw Error(ErrorKind::calibration, "calibration infeasible: no A >= 0 reaches " + fmt(target) +
                                          " riders; reachable sums lie in [" + fmt(lo_sum) + ", " + fmt(hi_sum) + "]");
}

Selection select_riders(std::span<const double> probability, std::span<const Id> ids, int quota) {
  if (quota < 0 || quota > static_cast<int>(probability.size())) {
    throw Error(ErrorKind::calibration, "cannot admit " + std::to_string(quota) + " of " +
                                            std::to_string(probability.size()) + " optional riders");
  }
  std::vector<int> order(probability.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return probability[a] != probability[b] ? probability[a] > probability[b] : ids[a] < ids[b];
  });
  Selection out;
  out.chosen.assign(order.begin(), order.begin() + quota);
  if (quota > 0) out.cutoff = probability[out.chosen.back()];
  return out;
}

double bpr_time(double freeflow_s, double flow, double capacity, double alpha, double beta) {
  if (flow <= 0.0) return freeflow_s;
  if (capacity <= 0.0) return INFINITY;
  return freeflow_s * (1.0 + alpha * std::pow(flow / capacity, beta));
}

CongestionState load_car_trips(const Instance& inst, std::span<const int> car_commuters) {
  const auto& net = inst.network;
  const auto ff = net.freeflow_times();
  CongestionState out;
  out.flows.assign(ff.size(), 0.0);
  for (int s : car_commuters) {
    const auto& st = inst.students[s];
    ShortestPathTree tree(net, st.home, ff, SearchMode::forward);
    const auto& school = inst.schools[st.school].location;
    if (!std::isfinite(tree.cost_to(school))) {
      throw Error(ErrorKind::disconnected, "student " + std::to_string(st.id) + " cannot drive to school",
                  "student " + std::to_string(st.id));
    }
    for (int a : tree.path_arcs(school)) out.flows[a] += 1.0;
  }
  const auto& p = inst.params;
  out.arc_times.resize(ff.size());
  for (std::size_t a = 0; a < ff.size(); ++a) {
    const double cap = inst.arc_capacity_vph(static_cast<int>(a)) * p.peak_window_min / 60.0;
    out.arc_times[a] = bpr_time(ff[a], out.flows[a], cap, p.bpr_alpha, p.bpr_beta);
  }
  return out;
}

double car_time(const Instance& inst, int student, std::span<const double> arc_times) {
  const auto& st = inst.students[student];
  const auto& school = inst.schools[st.school].location;
  const double t = shortest_time(inst.network, st.home, school, arc_times);
  if (!std::isfinite(t)) {
    throw Error(ErrorKind::disconnected, "student " + std::to_string(st.id) + " cannot drive to school",
                "student " + std::to_string(st.id));
  }
  if (!st.car_time_s) return t;
  const double free = shortest_time(inst.network, st.home, school);
  return free > 0.0 ? *st.car_time_s * t / free : *st.car_time_s;
}

std::vector<double> bus_times(const Scenario& sc, const RouteSolution& sol, std::span<const int> students) {
  const auto& inst = sc.inst();
  const double speed = inst.params.walk_speed_mps;
  std::map<int, const StudentLeg*> leg_of;
  for (const auto& leg : sol.legs) leg_of[leg.student] = &leg;
  std::vector<double> out;
  for (int s : students) {
    if (auto it = leg_of.find(s); it != leg_of.end()) {
      out.push_back(it->second->walk_m / speed + it->second->drop_time - it->second->pick_time);
      continue;
    }
    const auto& st = inst.students[s];
    const Id school_id = inst.schools[st.school].id;
    // Nearest visited stop whose route reaches the school afterwards.
    double best = INFINITY, best_walk = INFINITY;
    for (const auto& reach : inst.catchments[s]) {
      const Id stop_id = inst.stops[reach.stop].id;
      for (const auto& r : sol.routes) {
        std::optional<double> boarded;
        for (const auto& v : r.visits) {
          if (!v.is_school && v.id == stop_id) boarded = v.time;
          if (v.is_school && v.id == school_id && boarded) {
            const double ride = v.time - *boarded;
            if (reach.walk_m < best_walk || (reach.walk_m == best_walk && reach.walk_m / speed + ride < best)) {
              best_walk = reach.walk_m;
              best = reach.walk_m / speed + ride;
            }
            break;
          }
        }
      }
    }
    if (!std::isfinite(best) && !inst.catchments[s].empty()) {
      const auto nearest = std::min_element(inst.catchments[s].begin(), inst.catchments[s].end(),
                                            [](const StopReach& a, const StopReach& b) {
                                              return a.walk_m != b.walk_m ? a.walk_m < b.walk_m : a.stop < b.stop;
                                            });
      best = nearest->walk_m / speed + shortest_time(inst.network, inst.stops[nearest->stop].location,
                                                     inst.schools[st.school].location);
    }
    out.push_back(best);
  }
  return out;
}

namespace {

std::vector<int> complement(const Instance& inst, const std::vector<int>& riders) {
  std::vector<int> out;
  for (int s = 0; s < static_cast<int>(inst.students.size()); ++s) {
    if (!std::binary_search(riders.begin(), riders.end(), s)) out.push_back(s);
  }
  return out;
}

}  // namespace

EquilibriumResult run_fixed_point(const Instance& inst, const PipelineOptions& opts, int max_iterations) {
  std::vector<int> always, sometimes;
  for (int s = 0; s < static_cast<int>(inst.students.size()); ++s) {
    if (inst.students[s].mode == ModeGroup::always) always.push_back(s);
    if (inst.students[s].mode == ModeGroup::sometimes) sometimes.push_back(s);
  }
  EquilibriumResult out;
  out.target_riders = inst.params.status_quo_riders.value_or(static_cast<int>(inst.status_quo_riders().size()));
  const int quota = out.target_riders - static_cast<int>(always.size());
  if (quota < 0) {
    throw Error(ErrorKind::calibration, "status-quo ridership " + std::to_string(out.target_riders) +
                                            " is below the " + std::to_string(always.size()) + " students who always ride");
  }
  if (quota > static_cast<int>(sometimes.size())) {
    throw Error(ErrorKind::calibration, "status-quo ridership " + std::to_string(out.target_riders) +
                                            " exceeds every student who may ride");
  }
  std::vector<Id> ids;
  for (int s : sometimes) ids.push_back(inst.students[s].id);
  const int seats = inst.total_capacity();

  std::vector<int> riders = inst.status_quo_riders();
  CongestionState cong = load_car_trips(inst, complement(inst, riders));
  for (int it = 1; it <= max_iterations; ++it) {
    IterationRecord rec;
    rec.iteration = it;
    rec.riders = riders;
    const Scenario sc = make_scenario(inst, riders, cong.arc_times);
    try {
      rec.solution = run_hracssas4(sc, opts).solution;
      rec.solution.require_ok();
    } catch (const Error& e) {
      throw Error(e.kind(), "iteration " + std::to_string(it) + ": " + e.what(), e.subject());
    }

    const auto tbs = bus_times(sc, rec.solution, sometimes);
    std::vector<double> deltas, prob;
    for (std::size_t i = 0; i < sometimes.size(); ++i) {
      const int s = sometimes[i];
      const double tcs = car_time(inst, s, cong.arc_times);
      rec.car_time_s[s] = tcs;
      rec.bus_time_s[s] = tbs[i];
      // A student with no reachable stop cannot ride and stays out of the fit.
      if (std::isfinite(tbs[i])) deltas.push_back(tcs - tbs[i]);
    }
    if (it == 1) out.calibration = calibrate_A(deltas, quota);
    for (std::size_t i = 0; i < sometimes.size(); ++i) {
      prob.push_back(choice_probability(out.calibration.A, rec.car_time_s[sometimes[i]], tbs[i]));
      rec.probability[sometimes[i]] = prob.back();
    }

    std::vector<int> admitted;  // positions into `sometimes`
    if (it == 1) {
      const auto sel = select_riders(prob, ids, quota);
      admitted = sel.chosen;
      out.cutoff = sel.cutoff;
    } else if (out.cutoff) {
      const auto ranked = select_riders(prob, ids, static_cast<int>(sometimes.size())).chosen;
      for (int i : ranked) {
        if (prob[i] >= *out.cutoff) admitted.push_back(i);
      }
      const int room = std::max(0, seats - static_cast<int>(always.size()));
      if (static_cast<int>(admitted.size()) > room) admitted.resize(room);
    }
    std::vector<int> next = always;
    for (int i : admitted) next.push_back(sometimes[i]);
    std::sort(next.begin(), next.end());

    MetricsInputs mi;
    mi.walk_speed_mps = inst.params.walk_speed_mps;
    for (int s : complement(inst, riders)) {
      mi.car_time_s[s] = rec.car_time_s.count(s) ? rec.car_time_s[s] : car_time(inst, s, cong.arc_times);
    }
    rec.car_trips = static_cast<int>(mi.car_time_s.size());
    rec.metrics = compute_metrics(sc, rec.solution, mi);
    rec.objective = rec.metrics.total_stt_min + rec.metrics.total_pcts_min.value_or(0.0);
    rec.congestion = cong;
    out.iterations.push_back(std::move(rec));

    if (it > 1 && !out.count_stable_iteration &&
        out.iterations[it - 1].riders.size() == out.iterations[it - 2].riders.size()) {
      out.count_stable_iteration = it;
    }
    if (next == riders) {
      out.converged = true;
      break;
    }
    // Past iteration 1 the next set depends on the current set alone.
    for (int j = 1; j < it; ++j) {
      if (out.iterations[j].riders == next) out.cycle_length = it - j;
    }
    if (out.cycle_length) break;
    riders = std::move(next);
    cong = load_car_trips(inst, complement(inst, riders));
  }
  if (out.converged) {
    out.final_iteration = static_cast<int>(out.iterations.size()) - 1;
  } else {
    for (std::size_t i = 1; i < out.iterations.size(); ++i) {
      if (out.iterations[i].objective < out.iterations[out.final_iteration].objective) {
        out.final_iteration = static_cast<int>(i);
      }
    }
  }
  return out;
}

}  // namespace sbrsp
