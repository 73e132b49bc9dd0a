#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "sbrsp/error.hpp"
#include "sbrsp/milp/routing_model.hpp"

namespace sbrsp {

using milp::ValueMap;
using milp::Violation;

TourSchedule schedule_tour(const RoutingProblem& p, const Tour& tour) {
  const auto& D = p.delta;
  const std::size_t len = tour.nodes.size();
  TourSchedule out;
  out.arrival.assign(len, 0.0);
  out.boarded.assign(len, 0);
  out.alighted.assign(len, 0);
  out.load_after.assign(len, 0);
  auto fail = [&](const std::string& why) {
    if (out.feasible) {
      out.feasible = false;
      out.reason = why;
    }
  };

  std::map<int, std::size_t> pos;
  for (std::size_t q = 0; q < len; ++q) {
    const int node = tour.nodes[q];
    if (!D.is_stop(node) && !D.is_school(node)) fail("route contains a node that is neither stop nor school");
    if (!pos.emplace(node, q).second) fail("route visits node " + names::node(p, node) + " twice");
  }
  if (len > 0) {
    if (!D.is_stop(tour.nodes.front())) fail("route does not start at a stop");
    if (!D.is_school(tour.nodes.back())) fail("route does not end at a school");
  }

  const int S = static_cast<int>(p.riders.size());
  std::vector<std::pair<std::size_t, std::size_t>> legs;  // (pick position, drop position) per rider on the bus
  bool any = false;
  for (int s = 0; s < S && s < static_cast<int>(tour.stop_of.size()); ++s) {
    const int i = tour.stop_of[s];
    if (i < 0) continue;
    any = true;
    const auto& r = p.riders[s];
    const std::string who = "student " + std::to_string(r.id);
    if (std::find(r.stops.begin(), r.stops.end(), i) == r.stops.end()) fail(who + " uses a stop outside its catchment");
    auto ps = pos.find(D.stop(i));
    auto pm = pos.find(D.school(r.school));
    if (ps == pos.end()) {
      fail(who + " boards at a stop the route skips");
      continue;
    }
    if (pm == pos.end()) {
      fail(who + " has a school the route skips");
      continue;
    }
    if (pm->second < ps->second) fail(who + " is dropped before being picked up");
    out.boarded[ps->second] += 1;
    out.alighted[pm->second] += 1;
    legs.emplace_back(ps->second, pm->second);
  }
  if (len == 0) {
    if (any) fail("students assigned to a bus without a route");
    return out;
  }
  for (std::size_t q = 0; q < len; ++q) {
    if (D.is_stop(tour.nodes[q]) && out.boarded[q] == 0) fail("stop " + names::node(p, tour.nodes[q]) + " has no pick-up");
  }

  const int capacity = p.buses.at(tour.bus).capacity;
  int load = 0;
  double t = 0.0;
  for (std::size_t q = 0; q < len; ++q) {
    const int node = tour.nodes[q];
    out.arrival[q] = t;
    load += out.boarded[q] - out.alighted[q];
    out.load_after[q] = load;
    if (load > capacity) fail("bus load exceeds capacity");
    const double service = D.is_stop(node) ? p.board_intercept + p.board_slope * out.boarded[q]
                                           : p.deboard_intercept + p.deboard_slope * out.alighted[q];
    const int next = q + 1 < len ? tour.nodes[q + 1] : D.destination();
    const double delta = D.arc_class(node, next) == ArcClass::none ? 0.0 : D(node, next);
    out.load_travel += delta * load;
    t += service + delta;
  }
  out.end_time = t;
  if (out.end_time > p.max_time + 1e-9) fail("route exceeds the maximum route time");
  for (const auto& [a, b] : legs) out.ride_time += out.arrival[b] - out.arrival[a];
  return out;
}

ValueMap tour_values(const RoutingProblem& p, const std::vector<Tour>& tours) {
  const auto& D = p.delta;
  const int N = D.size();
  const int n = p.stop_count();
  const int S = static_cast<int>(p.riders.size());
  const double T = p.max_time;
  ValueMap vals;
  for (int k = 0; k < static_cast<int>(p.buses.size()); ++k) {
    Tour tour{k, {}, std::vector<int>(S, -1)};
    for (const auto& c : tours) {
      if (c.bus == k) tour = c;
    }
    tour.stop_of.resize(S, -1);
    const TourSchedule sch = schedule_tour(p, tour);
    const std::size_t len = tour.nodes.size();

    std::vector<double> t(N, -1.0);  // -1 marks unvisited
    std::vector<double> service(N, 0.0);
    vals[names::r(p, D.origin(), k)] = 1.0;
    vals[names::r(p, D.destination(), k)] = 1.0;
    if (len > 0) {
      t[D.origin()] = 0.0;
      int prev = D.origin();
      for (std::size_t q = 0; q < len; ++q) {
        const int node = tour.nodes[q];
        t[node] = sch.arrival[q];
        service[node] = D.is_stop(node) ? p.board_intercept + p.board_slope * sch.boarded[q]
                                        : p.deboard_intercept + p.deboard_slope * sch.alighted[q];
        vals[names::x(p, prev, node, k)] = 1.0;
        vals[names::r(p, node, k)] = 1.0;
        if (D.is_school(node)) vals[names::v(p, node - 1 - n, k)] = sch.alighted[q];
        prev = node;
      }
      vals[names::x(p, prev, D.destination(), k)] = 1.0;
      for (std::size_t q = 0; q < len; ++q) {
        const int node = tour.nodes[q];
        const int next = q + 1 < len ? tour.nodes[q + 1] : D.destination();
        vals[names::w(p, node, next, k)] = sch.load_after[q];
      }
      t[D.destination()] = sch.end_time;
    } else {
      t[D.origin()] = 0.0;
      t[D.destination()] = 0.0;
    }
    // Unvisited nodes sit as early as every relaxed time row allows.
    for (int j = 0; j < N; ++j) {
      if (t[j] >= 0.0) continue;
      double tj = 0.0;
      for (int i = 1; i < N - 1; ++i) {
        if (t[i] < 0.0 || D.arc_class(i, j) == ArcClass::none) continue;
        tj = std::max(tj, t[i] + service[i] + D(i, j) - T);
      }
      t[j] = tj;
    }
    for (int i = 0; i < N; ++i) vals[names::t(p, i, k)] = t[i];
    for (int s = 0; s < S; ++s) {
      const int i = tour.stop_of[s];
      if (i < 0) continue;
      const int m = p.riders[s].school;
      const double pick = t[D.stop(i)];
      const double drop = t[D.school(m)];
      vals[names::e(p, i, s, k)] = 1.0;
      vals[names::pick(p, s, k)] = pick;
      vals[names::drop(p, s, k)] = drop;
      vals[names::tau(p, i, s, k)] = pick;
      vals[names::kappa(p, m, s, k)] = drop;
    }
  }
  return vals;
}

std::vector<Tour> extract_tours(const RoutingProblem& p, const RoutingVariant& variant, const ValueMap& values) {
  const auto& D = p.delta;
  const int N = D.size();
  const int S = static_cast<int>(p.riders.size());
  auto get = [&](const std::string& name) {
    auto it = values.find(name);
    return it == values.end() ? 0.0 : it->second;
  };
  std::vector<Tour> tours;
  for (int k = 0; k < static_cast<int>(p.buses.size()); ++k) {
    Tour tour{k, {}, std::vector<int>(S, -1)};
    int cur = D.origin();
    std::vector<char> seen(N, 0);
    while (true) {
      int next = -1;
      for (int j = 0; j < N; ++j) {
        const ArcClass c = D.arc_class(cur, j);
        if (c == ArcClass::none) continue;
        if (c == ArcClass::school_stop && !variant.school_to_stop_arcs) continue;
        if (get(names::x(p, cur, j, k)) > 0.5) {
          next = j;
          break;
        }
      }
      if (next < 0 || next == D.destination() || seen[next]) break;
      seen[next] = 1;
      tour.nodes.push_back(next);
      cur = next;
    }
    for (int s = 0; s < S; ++s) {
      if (variant.fixed) {
        tour.stop_of[s] = variant.fixed->stop_of[s];
        continue;
      }
      for (int i : p.riders[s].stops) {
        if (get(names::e(p, i, s, k)) > 0.5) tour.stop_of[s] = i;
      }
    }
    tours.push_back(std::move(tour));
  }
  return tours;
}

double ride_time_objective(const RoutingProblem& p, const ValueMap& values) {
  double total = 0.0;
  for (const auto& [name, v] : values) {
    if (name.rfind("d_s", 0) == 0) total += v;
    if (name.rfind("p_s", 0) == 0) total -= v;
  }
  (void)p;
  return total;
}

namespace {

class Checker {
 public:
  Checker(const ValueMap& values, double tol) : values_(values), tol_(tol) {}
  double operator()(const std::string& name) const {
    auto it = values_.find(name);
    return it == values_.end() ? 0.0 : it->second;
  }
  void le(const std::string& row, double lhs, double rhs) {
    if (lhs > rhs + tol_) out.push_back({row, lhs - rhs});
  }
  void ge(const std::string& row, double lhs, double rhs) { le(row, rhs, lhs); }
  void eq(const std::string& row, double lhs, double rhs) {
    if (std::abs(lhs - rhs) > tol_) out.push_back({row, std::abs(lhs - rhs)});
  }
  void binary(const std::string& name) {
    const double v = (*this)(name);
    if (std::abs(v) > tol_ && std::abs(v - 1.0) > tol_) out.push_back({"integrality " + name, std::abs(v - std::round(v))});
  }
  void nonneg(const std::string& name) {
    const double v = (*this)(name);
    if (v < -tol_) out.push_back({"bound " + name, -v});
  }
  std::vector<Violation> out;

 private:
  const ValueMap& values_;
  double tol_;
};

}  // namespace

std::vector<Violation> validate_solution(const RoutingProblem& p, const RoutingVariant& variant, const ValueMap& values,
                                         double tol) {
  const auto& D = p.delta;
  const int N = D.size();
  const int n = p.stop_count();
  const int M = p.school_count();
  const int S = static_cast<int>(p.riders.size());
  const int K = static_cast<int>(p.buses.size());
  const double T = p.max_time;
  const StopPreassignment* fixed = variant.fixed;
  Checker c(values, tol);

  std::vector<char> active(n, 1);
  if (fixed) {
    std::fill(active.begin(), active.end(), 0);
    for (int i : fixed->selected) active[i] = 1;
  }
  auto live = [&](int node) { return !D.is_stop(node) || active[node - 1]; };
  auto is_arc = [&](int i, int j) {
    const ArcClass a = D.arc_class(i, j);
    if (a == ArcClass::none || !live(i) || !live(j)) return false;
    return a != ArcClass::school_stop || variant.school_to_stop_arcs;
  };
  auto in_catchment = [&](int s, int i) {
    const auto& st = p.riders[s].stops;
    return active[i] && std::find(st.begin(), st.end(), i) != st.end();
  };
  const std::vector<int> L = p.demand();

  std::vector<double> v_total(M, 0.0), assigned_total(S, 0.0);
  for (int k = 0; k < K; ++k) {
    const double C = p.buses[k].capacity;
    const std::string kt = "/k" + std::to_string(p.buses[k].id);
    auto x = [&](int i, int j) { return c(names::x(p, i, j, k)); };
    auto w = [&](int i, int j) { return c(names::w(p, i, j, k)); };
    auto t = [&](int i) { return c(names::t(p, i, k)); };
    auto r = [&](int i) {
      if (i == D.origin() || i == D.destination() || (fixed && D.is_stop(i))) return 1.0;
      return c(names::r(p, i, k));
    };
    auto e = [&](int s, int i) {
      if (!in_catchment(s, i)) return 0.0;
      if (fixed) return fixed->stop_of[s] == i ? 1.0 : 0.0;
      return c(names::e(p, i, s, k));
    };
    auto picked = [&](int i) {
      double sum = 0.0;
      for (int s = 0; s < S; ++s) sum += e(s, i);
      return sum;
    };
    auto assigned = [&](int s) {
      double sum = 0.0;
      for (int i = 0; i < n; ++i) sum += e(s, i);
      return sum;
    };

    // Domains.
    for (int i = 0; i < N; ++i) {
      for (int j = 0; j < N; ++j) {
        if (!is_arc(i, j)) continue;
        c.binary(names::x(p, i, j, k));
        c.nonneg(names::w(p, i, j, k));
      }
      if (live(i)) c.nonneg(names::t(p, i, k));
      if (live(i) && !(fixed && D.is_stop(i)) && i != D.origin() && i != D.destination()) c.binary(names::r(p, i, k));
    }
    if (!fixed) {
      for (int s = 0; s < S; ++s) {
        for (int i : p.riders[s].stops) c.binary(names::e(p, i, s, k));
      }
    }

    for (int j = 0; j < n; ++j) {
      const int node = D.stop(j);
      if (active[j]) c.le("start_time " + names::node(p, node) + kt, t(node), T * (1.0 - x(D.origin(), node)));
    }
    c.le("route_time" + kt, t(D.destination()), T);

    for (int m = 0; m < M; ++m) {
      double sum = 0.0;
      for (int s = 0; s < S; ++s) {
        if (p.riders[s].school == m) sum += assigned(s);
      }
      const double v = c(names::v(p, m, k));
      c.nonneg(names::v(p, m, k));
      c.eq("school_pickups " + names::node(p, D.school(m)) + kt, sum, v);
      v_total[m] += v;
    }

    for (int i = 0; i < N; ++i) {
      if (!live(i)) continue;
      double out = 0.0, in = 0.0;
      for (int j = 0; j < N; ++j) {
        if (is_arc(i, j)) out += x(i, j);
        if (is_arc(j, i)) in += x(j, i);
      }
      c.eq("flow " + names::node(p, i) + kt, out - in, D.supply(i));
      if (i != D.origin() && i != D.destination()) c.eq("out_degree " + names::node(p, i) + kt, out, r(i));
      if (D.is_stop(i)) c.le("stop_needs_pickup " + names::node(p, i) + kt, r(i), picked(i - 1));
    }

    for (int i = 0; i < N; ++i) {
      for (int j = 0; j < N; ++j) {
        if (!is_arc(i, j)) continue;
        const ArcClass a = D.arc_class(i, j);
        const std::string tag = names::node(p, i) + "->" + names::node(p, j) + kt;
        const double xij = x(i, j);
        c.ge("arc_link " + tag, r(i) + r(j), 2.0 * xij);
        c.le("capacity " + tag, w(i, j), C * xij);
        if (a == ArcClass::origin_stop) c.le("empty_start " + tag, w(i, j), 0.0);
        if (a == ArcClass::stop_stop || a == ArcClass::stop_school) {
          double inflow = 0.0;
          for (int l = 0; l < N; ++l) {
            if (!is_arc(l, i)) continue;
            const ArcClass b = D.arc_class(l, i);
            if (b == ArcClass::origin_stop || b == ArcClass::stop_stop || b == ArcClass::school_stop) inflow += w(l, i);
          }
          const double bal = inflow + picked(i - 1) - w(i, j);
          c.le("stop_load " + tag, std::abs(bal), C * (1.0 - xij));
          c.le("pickup_time " + tag, t(i) + p.board_intercept + p.board_slope * picked(i - 1) + D(i, j) - t(j),
               T * (1.0 - xij));
        } else if (a != ArcClass::origin_stop) {
          double inflow = 0.0;
          for (int l = 0; l < N; ++l) {
            if (!is_arc(l, i)) continue;
            const ArcClass b = D.arc_class(l, i);
            if (b == ArcClass::stop_school || b == ArcClass::school_school) inflow += w(l, i);
          }
          const double v = c(names::v(p, i - 1 - n, k));
          c.le("school_load " + tag, std::abs(inflow - v - w(i, j)), C * (1.0 - xij));
          c.le("dropoff_time " + tag, t(i) + p.deboard_intercept + p.deboard_slope * v + D(i, j) - t(j),
               T * (1.0 - xij));
        }
      }
    }

    for (int s = 0; s < S; ++s) {
      const auto& rider = p.riders[s];
      const std::string st = " s" + std::to_string(rider.id) + kt;
      const int mnode = D.school(rider.school);
      const double as = assigned(s);
      const double pk = c(names::pick(p, s, k));
      const double dr = c(names::drop(p, s, k));
      const double kap = c(names::kappa(p, rider.school, s, k));
      assigned_total[s] += as;
      c.nonneg(names::pick(p, s, k));
      c.nonneg(names::drop(p, s, k));
      c.nonneg(names::kappa(p, rider.school, s, k));
      c.le("school_visit" + st, as, r(mnode));
      c.le("pick_active" + st, pk, T * as);
      c.le("drop_active" + st, dr, T * as);
      c.le("drop_link" + st, kap, dr);
      c.le("kappa_off" + st, kap, T * as);
      c.le("kappa_le_t" + st, kap, t(mnode));
      c.ge("kappa_ge_t" + st, kap, t(mnode) - T * (1.0 - as));
      for (int i : rider.stops) {
        if (!active[i]) continue;
        const double eis = e(s, i);
        if (variant.school_to_stop_arcs) {
          c.le("no_pickup_after_dropoff " + names::node(p, D.stop(i)) + st, T * (eis - 1.0), t(mnode) - t(D.stop(i)));
        }
        if (fixed && fixed->stop_of[s] != i) continue;
        const double tau = c(names::tau(p, i, s, k));
        const std::string tag = " " + names::node(p, D.stop(i)) + st;
        c.nonneg(names::tau(p, i, s, k));
        c.ge("pick_link" + tag, tau + T * (1.0 - eis), pk);
        c.le("tau_off" + tag, tau, T * eis);
        c.le("tau_le_t" + tag, tau, t(D.stop(i)));
        c.ge("tau_ge_t" + tag, tau, t(D.stop(i)) - T * (1.0 - eis));
      }
    }
  }
  for (int m = 0; m < M; ++m) c.eq("school_demand " + names::node(p, D.school(m)), v_total[m], L[m]);
  for (int s = 0; s < S; ++s) c.eq("assign_once s" + std::to_string(p.riders[s].id), assigned_total[s], 1.0);
  return c.out;
}

}  // namespace sbrsp
