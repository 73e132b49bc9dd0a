#include "sbrsp/milp/routing_model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sbrsp/error.hpp"

namespace sbrsp {

using milp::MiloModel;
using milp::Sense;
using milp::Term;

std::vector<int> RoutingProblem::demand() const {
  std::vector<int> L(school_ids.size(), 0);
  for (const auto& r : riders) L[r.school] += 1;
  return L;
}

RoutingVariant full_variant() { return {}; }

RoutingVariant reduced_variant(const StopPreassignment& pre) {
  RoutingVariant v;
  v.school_to_stop_arcs = false;
  v.objective = RoutingObjective::load_travel;
  v.fixed = &pre;
  return v;
}

namespace names {

std::string node(const RoutingProblem& p, int i) {
  const auto& D = p.delta;
  if (i == D.origin()) return "O";
  if (i == D.destination()) return "D";
  if (D.is_stop(i)) return "n" + std::to_string(p.stop_ids[i - 1]);
  return "m" + std::to_string(p.school_ids[i - 1 - D.stop_count()]);
}

namespace {
std::string bus(const RoutingProblem& p, int k) { return "k" + std::to_string(p.buses[k].id); }
std::string student(const RoutingProblem& p, int s) { return "s" + std::to_string(p.riders[s].id); }
std::string stop(const RoutingProblem& p, int i) { return "n" + std::to_string(p.stop_ids[i]); }
std::string school(const RoutingProblem& p, int m) { return "m" + std::to_string(p.school_ids[m]); }
}  // namespace

std::string x(const RoutingProblem& p, int i, int j, int k) { return "x_" + node(p, i) + "_" + node(p, j) + "_" + bus(p, k); }
std::string w(const RoutingProblem& p, int i, int j, int k) { return "w_" + node(p, i) + "_" + node(p, j) + "_" + bus(p, k); }
std::string r(const RoutingProblem& p, int i, int k) { return "r_" + node(p, i) + "_" + bus(p, k); }
std::string t(const RoutingProblem& p, int i, int k) { return "t_" + node(p, i) + "_" + bus(p, k); }
std::string e(const RoutingProblem& p, int i, int s, int k) { return "e_" + stop(p, i) + "_" + student(p, s) + "_" + bus(p, k); }
std::string v(const RoutingProblem& p, int m, int k) { return "v_" + school(p, m) + "_" + bus(p, k); }
std::string pick(const RoutingProblem& p, int s, int k) { return "p_" + student(p, s) + "_" + bus(p, k); }
std::string drop(const RoutingProblem& p, int s, int k) { return "d_" + student(p, s) + "_" + bus(p, k); }
std::string tau(const RoutingProblem& p, int i, int s, int k) { return "tau_" + stop(p, i) + "_" + student(p, s) + "_" + bus(p, k); }
std::string kappa(const RoutingProblem& p, int m, int s, int k) { return "kappa_" + school(p, m) + "_" + student(p, s) + "_" + bus(p, k); }

}  // namespace names

namespace {

// Affine expression: terms plus a constant.
struct Expr {
  std::vector<Term> terms;
  double c = 0.0;
};

Expr var(int idx, double coef = 1.0) { return Expr{{Term{idx, coef}}, 0.0}; }
Expr cst(double v) { return Expr{{}, v}; }
Expr operator+(Expr a, const Expr& b) {
  a.terms.insert(a.terms.end(), b.terms.begin(), b.terms.end());
  a.c += b.c;
  return a;
}
Expr operator*(double k, Expr a) {
  for (auto& t : a.terms) t.coef *= k;
  a.c *= k;
  return a;
}
Expr operator-(Expr a, const Expr& b) { return a + (-1.0 * b); }
Expr& operator+=(Expr& a, const Expr& b) { return a = a + b; }

// lhs (sense) rhs. Rows whose variables all cancel are checked and dropped.
void add_row(MiloModel& m, const std::string& name, const Expr& lhs, Sense sense, const Expr& rhs) {
  Expr d = lhs - rhs;
  std::sort(d.terms.begin(), d.terms.end(), [](const Term& a, const Term& b) { return a.var < b.var; });
  std::vector<Term> merged;
  for (const auto& t : d.terms) {
    if (!merged.empty() && merged.back().var == t.var) {
      merged.back().coef += t.coef;
    } else {
      merged.push_back(t);
    }
  }
  std::erase_if(merged, [](const Term& t) { return t.coef == 0.0; });
  if (merged.empty()) {
    const bool ok = sense == Sense::le ? d.c <= 1e-9 : sense == Sense::ge ? d.c >= -1e-9 : std::abs(d.c) <= 1e-9;
    if (!ok) throw Error(ErrorKind::infeasible, "constant row " + name + " cannot hold");
    return;
  }
  m.add_constraint(name, std::move(merged), sense, -d.c);
}

void check_problem(const RoutingProblem& p, const RoutingVariant& variant) {
  const int n = p.stop_count();
  if (p.buses.empty()) throw Error(ErrorKind::validation, "routing problem has no bus");
  if (p.delta.stop_count() != n || p.delta.school_count() != p.school_count()) {
    throw Error(ErrorKind::validation, "travel matrix does not match the routing node set");
  }
  for (const auto& b : p.buses) {
    if (b.capacity < 1) throw Error(ErrorKind::validation, "bus capacity must be at least 1", "bus " + std::to_string(b.id));
  }
  for (const auto& r : p.riders) {
    if (r.stops.empty()) {
      throw Error(ErrorKind::stranded_student, "student " + std::to_string(r.id) + " has no reachable stop",
                  "student " + std::to_string(r.id));
    }
    if (r.school < 0 || r.school >= p.school_count()) throw Error(ErrorKind::validation, "rider school out of range");
    for (int i : r.stops) {
      if (i < 0 || i >= n) throw Error(ErrorKind::validation, "rider stop out of range");
    }
  }
  if (variant.fixed) {
    const auto& pre = *variant.fixed;
    if (p.buses.size() != 1) throw Error(ErrorKind::validation, "a fixed preassignment needs a single bus");
    if (pre.stop_of.size() != p.riders.size()) throw Error(ErrorKind::validation, "preassignment size mismatch");
    std::vector<int> count(n, 0);
    for (std::size_t s = 0; s < p.riders.size(); ++s) {
      const auto& r = p.riders[s];
      const int i = pre.stop_of[s];
      if (std::find(r.stops.begin(), r.stops.end(), i) == r.stops.end()) {
        throw Error(ErrorKind::validation,
                    "preassignment puts student " + std::to_string(r.id) + " outside its walk catchment",
                    "student " + std::to_string(r.id));
      }
      if (!std::binary_search(pre.selected.begin(), pre.selected.end(), i)) {
        throw Error(ErrorKind::validation, "preassignment uses an unselected stop", "student " + std::to_string(r.id));
      }
      count[i] += 1;
    }
    for (int i : pre.selected) {
      if (count[i] == 0) {
        throw Error(ErrorKind::validation, "selected stop " + std::to_string(p.stop_ids[i]) + " has no student");
      }
    }
  }
}

}  // namespace

MiloModel build_routing_model(const RoutingProblem& p, const RoutingVariant& variant) {
  check_problem(p, variant);
  const auto& D = p.delta;
  const int n = p.stop_count();
  const int M = p.school_count();
  const int S = static_cast<int>(p.riders.size());
  const int K = static_cast<int>(p.buses.size());
  const int N = D.size();
  const double T = p.max_time;
  const StopPreassignment* fixed = variant.fixed;

  std::vector<char> active(n, 1);
  if (fixed) {
    std::fill(active.begin(), active.end(), 0);
    for (int i : fixed->selected) active[i] = 1;
  }
  auto node_active = [&](int node) { return !D.is_stop(node) || active[node - 1]; };

  struct ArcRef {
    int i, j;
    ArcClass cls;
  };
  std::vector<ArcRef> arcs;
  for (int i = 0; i < N; ++i) {
    for (int j = 0; j < N; ++j) {
      const ArcClass c = D.arc_class(i, j);
      if (c == ArcClass::none || !node_active(i) || !node_active(j)) continue;
      if (c == ArcClass::school_stop && !variant.school_to_stop_arcs) continue;
      arcs.push_back({i, j, c});
    }
  }
  std::vector<int> nodes;
  for (int i = 0; i < N; ++i) {
    if (node_active(i)) nodes.push_back(i);
  }
  // Riders per stop (catchment membership), restricted to active stops.
  std::vector<std::vector<int>> riders_at(n);
  for (int s = 0; s < S; ++s) {
    for (int i : p.riders[s].stops) {
      if (active[i]) riders_at[i].push_back(s);
    }
  }
  const std::vector<int> L = p.demand();
  bool symmetric = variant.break_bus_symmetry && K > 1;
  for (int k = 1; k < K; ++k) symmetric = symmetric && p.buses[k].capacity == p.buses[0].capacity;

  // Shortest travel times over the physical matrix (closed under paths) give
  // each rider a lower bound on time aboard: a bus reaches the school from the
  // boarding stop along some path. Stops the school reaches in zero time are
  // skipped, since such a bus could meet the school first at the same clock.
  const int P = n + M;
  std::vector<double> sp(static_cast<std::size_t>(P) * P);
  for (int a = 0; a < P; ++a) {
    for (int b = 0; b < P; ++b) sp[a * P + b] = a == b ? 0.0 : D.physical(a, b);
  }
  for (int c = 0; c < P; ++c) {
    for (int a = 0; a < P; ++a) {
      for (int b = 0; b < P; ++b) sp[a * P + b] = std::min(sp[a * P + b], sp[a * P + c] + sp[c * P + b]);
    }
  }
  std::vector<double> ride_lb(S, INFINITY);
  for (int s = 0; s < S; ++s) {
    const int ms = n + p.riders[s].school;
    for (int i : p.riders[s].stops) {
      if (!active[i] || (fixed && fixed->stop_of[s] != i)) continue;
      const double lb = sp[ms * P + i] > 0.0 ? sp[i * P + ms] : 0.0;
      ride_lb[s] = std::min(ride_lb[s], std::max(0.0, lb));
    }
    if (!std::isfinite(ride_lb[s])) ride_lb[s] = 0.0;
  }

  MiloModel model(fixed ? "reduced_single_bus" : (K == 1 ? "single_bus" : "full"));
  std::vector<Term> objective;

  // Per bus: variable indices (-1 when absent).
  std::vector<std::vector<int>> v_idx(K, std::vector<int>(M, -1));
  std::vector<std::vector<std::vector<int>>> e_idx(K, std::vector<std::vector<int>>(S, std::vector<int>(n, -1)));

  for (int k = 0; k < K; ++k) {
    const double C = p.buses[k].capacity;
    std::vector<int> xi(static_cast<std::size_t>(N) * N, -1), wi(static_cast<std::size_t>(N) * N, -1);
    std::vector<int> ri(N, -1), ti(N, -1);
    for (const auto& a : arcs) xi[a.i * N + a.j] = model.add_binary(names::x(p, a.i, a.j, k));
    for (const auto& a : arcs) {
      // Buses leave the origin empty.
      const double cap = a.cls == ArcClass::origin_stop ? 0.0 : INFINITY;
      wi[a.i * N + a.j] = model.add_continuous(names::w(p, a.i, a.j, k), 0.0, cap);
    }
    for (int i : nodes) {
      if (D.is_stop(i) && fixed) continue;
      ri[i] = model.add_binary(names::r(p, i, k));
      if (i == D.origin() || i == D.destination()) model.fix(ri[i], 1.0);
    }
    for (int i : nodes) ti[i] = model.add_continuous(names::t(p, i, k));
    auto& ek = e_idx[k];
    if (!fixed) {
      for (int s = 0; s < S; ++s) {
        if (symmetric && k > s) continue;
        for (int i : p.riders[s].stops) ek[s][i] = model.add_binary(names::e(p, i, s, k));
      }
    }
    for (int m = 0; m < M; ++m) v_idx[k][m] = model.add_continuous(names::v(p, m, k));
    std::vector<int> pi(S), di(S), kap(S);
    for (int s = 0; s < S; ++s) pi[s] = model.add_continuous(names::pick(p, s, k));
    for (int s = 0; s < S; ++s) di[s] = model.add_continuous(names::drop(p, s, k));
    std::vector<std::vector<int>> taui(S, std::vector<int>(n, -1));
    for (int s = 0; s < S; ++s) {
      for (int i : p.riders[s].stops) {
        if (!active[i]) continue;
        if (fixed && fixed->stop_of[s] != i) continue;
        taui[s][i] = model.add_continuous(names::tau(p, i, s, k));
      }
    }
    for (int s = 0; s < S; ++s) kap[s] = model.add_continuous(names::kappa(p, p.riders[s].school, s, k));

    const std::string kt = "_k" + std::to_string(p.buses[k].id);
    auto X = [&](int i, int j) { return var(xi[i * N + j]); };
    auto W = [&](int i, int j) { return var(wi[i * N + j]); };
    auto Tn = [&](int i) { return var(ti[i]); };
    auto R = [&](int i) { return ri[i] >= 0 ? var(ri[i]) : cst(1.0); };
    auto E = [&](int s, int i) {
      if (fixed) return cst(fixed->stop_of[s] == i ? 1.0 : 0.0);
      return ek[s][i] >= 0 ? var(ek[s][i]) : cst(0.0);
    };
    auto V = [&](int m) { return var(v_idx[k][m]); };
    auto picked_at = [&](int i) {
      Expr sum;
      for (int s : riders_at[i]) sum += E(s, i);
      return sum;
    };
    auto assigned = [&](int s) {
      Expr sum;
      for (int i : p.riders[s].stops) {
        if (active[i]) sum += E(s, i);
      }
      return sum;
    };
    auto nm = [&](int i) { return names::node(p, i); };
    auto school_node = [&](int m) { return D.school(m); };

    // Start and end of the route.
    for (const auto& a : arcs) {
      if (a.cls == ArcClass::origin_stop) {
        add_row(model, "start_time_" + nm(a.j) + kt, Tn(a.j), Sense::le, T * (cst(1.0) - X(a.i, a.j)));
      }
    }
    add_row(model, "route_time" + kt, Tn(D.destination()), Sense::le, cst(T));

    // Students dropped at each school were picked up by this bus.
    for (int m = 0; m < M; ++m) {
      Expr sum;
      for (int s = 0; s < S; ++s) {
        if (p.riders[s].school == m) sum += assigned(s);
      }
      add_row(model, "school_pickups_" + nm(school_node(m)) + kt, sum, Sense::eq, V(m));
    }

    // Flow balance and node visits.
    for (int i : nodes) {
      Expr bal;
      for (const auto& a : arcs) {
        if (a.i == i) bal += X(a.i, a.j);
        if (a.j == i) bal = bal - X(a.i, a.j);
      }
      add_row(model, "flow_" + nm(i) + kt, bal, Sense::eq, cst(D.supply(i)));
    }
    for (const auto& a : arcs) {
      add_row(model, "arc_link_" + nm(a.i) + "_" + nm(a.j) + kt, R(a.i) + R(a.j), Sense::ge, 2.0 * X(a.i, a.j));
    }
    for (int i : nodes) {
      if (i == D.origin() || i == D.destination()) continue;
      Expr out;
      for (const auto& a : arcs) {
        if (a.i == i) out += X(a.i, a.j);
      }
      add_row(model, "out_degree_" + nm(i) + kt, out, Sense::eq, R(i));
    }
    for (int i = 0; i < n; ++i) {
      if (!active[i]) continue;
      add_row(model, "stop_needs_pickup_" + nm(D.stop(i)) + kt, R(D.stop(i)), Sense::le, picked_at(i));
    }
    // Riders board only at stops the bus visits. Implied for integer points
    // by the empty start and load propagation; stated for the relaxation.
    if (!fixed) {
      for (int s = 0; s < S; ++s) {
        for (int i : p.riders[s].stops) {
          if (ek[s][i] < 0) continue;
          add_row(model, "board_visited_" + nm(D.stop(i)) + "_s" + std::to_string(p.riders[s].id) + kt, E(s, i),
                  Sense::le, R(D.stop(i)));
        }
      }
    }

    // Load propagation.
    for (const auto& a : arcs) {
      if (a.cls == ArcClass::stop_stop || a.cls == ArcClass::stop_school) {
        Expr load;
        for (const auto& b : arcs) {
          if (b.j == a.i && (b.cls == ArcClass::origin_stop || b.cls == ArcClass::stop_stop || b.cls == ArcClass::school_stop)) {
            load += W(b.i, b.j);
          }
        }
        load += picked_at(a.i - 1);
        load = load - W(a.i, a.j);
        const std::string tag = nm(a.i) + "_" + nm(a.j) + kt;
        add_row(model, "stop_load_hi_" + tag, load, Sense::le, C * (cst(1.0) - X(a.i, a.j)));
        add_row(model, "stop_load_lo_" + tag, -1.0 * load, Sense::le, C * (cst(1.0) - X(a.i, a.j)));
      }
    }
    for (const auto& a : arcs) {
      if (a.cls == ArcClass::school_school || a.cls == ArcClass::school_stop || a.cls == ArcClass::school_dest) {
        Expr load;
        for (const auto& b : arcs) {
          if (b.j == a.i && (b.cls == ArcClass::stop_school || b.cls == ArcClass::school_school)) load += W(b.i, b.j);
        }
        load = load - V(a.i - 1 - n) - W(a.i, a.j);
        const std::string tag = nm(a.i) + "_" + nm(a.j) + kt;
        add_row(model, "school_load_hi_" + tag, load, Sense::le, C * (cst(1.0) - X(a.i, a.j)));
        add_row(model, "school_load_lo_" + tag, -1.0 * load, Sense::le, C * (cst(1.0) - X(a.i, a.j)));
      }
    }

    // A rider on board forces a visit to the rider's school.
    for (int s = 0; s < S; ++s) {
      add_row(model, "school_visit_s" + std::to_string(p.riders[s].id) + kt, assigned(s), Sense::le,
              R(school_node(p.riders[s].school)));
    }

    // Time propagation.
    for (const auto& a : arcs) {
      const double delta = D(a.i, a.j);
      const std::string tag = nm(a.i) + "_" + nm(a.j) + kt;
      if (a.cls == ArcClass::stop_stop || a.cls == ArcClass::stop_school) {
        Expr lhs = Tn(a.i) + cst(p.board_intercept) + p.board_slope * picked_at(a.i - 1) + cst(delta) - Tn(a.j);
        add_row(model, "pickup_time_" + tag, lhs, Sense::le, T * (cst(1.0) - X(a.i, a.j)));
      } else if (a.cls != ArcClass::origin_stop) {
        Expr lhs = Tn(a.i) + cst(p.deboard_intercept) + p.deboard_slope * V(a.i - 1 - n) + cst(delta) - Tn(a.j);
        add_row(model, "dropoff_time_" + tag, lhs, Sense::le, T * (cst(1.0) - X(a.i, a.j)));
      }
    }
    for (const auto& a : arcs) {
      add_row(model, "capacity_" + nm(a.i) + "_" + nm(a.j) + kt, W(a.i, a.j), Sense::le, C * X(a.i, a.j));
    }

    // Student pick-up and drop-off times.
    for (int s = 0; s < S; ++s) {
      const auto& rider = p.riders[s];
      const std::string st = "s" + std::to_string(rider.id);
      const int mnode = school_node(rider.school);
      for (int i : rider.stops) {
        if (taui[s][i] < 0) continue;
        const Expr tau = var(taui[s][i]);
        const std::string tag = nm(D.stop(i)) + "_" + st + kt;
        add_row(model, "pick_link_" + tag, tau + T * (cst(1.0) - E(s, i)), Sense::ge, var(pi[s]));
        add_row(model, "tau_off_" + tag, tau, Sense::le, T * E(s, i));
        add_row(model, "tau_le_t_" + tag, tau, Sense::le, Tn(D.stop(i)));
        add_row(model, "tau_ge_t_" + tag, tau, Sense::ge, Tn(D.stop(i)) - T * (cst(1.0) - E(s, i)));
      }
      const Expr kap_s = var(kap[s]);
      const std::string tag = nm(mnode) + "_" + st + kt;
      add_row(model, "drop_link_" + tag, kap_s, Sense::le, var(di[s]));
      add_row(model, "pick_active_" + st + kt, T * assigned(s), Sense::ge, var(pi[s]));
      add_row(model, "drop_active_" + st + kt, T * assigned(s), Sense::ge, var(di[s]));
      add_row(model, "kappa_off_" + tag, kap_s, Sense::le, T * assigned(s));
      add_row(model, "kappa_le_t_" + tag, kap_s, Sense::le, Tn(mnode));
      add_row(model, "kappa_ge_t_" + tag, kap_s, Sense::ge, Tn(mnode) - T * (cst(1.0) - assigned(s)));
      add_row(model, "ride_lower_bound_" + st + kt, var(di[s]) - var(pi[s]), Sense::ge, ride_lb[s] * assigned(s));
      if (variant.school_to_stop_arcs) {
        for (int i : rider.stops) {
          if (!active[i]) continue;
          add_row(model, "no_pickup_after_dropoff_" + nm(D.stop(i)) + "_" + st + kt,
                  T * (cst(1.0) + E(s, i) - cst(2.0)), Sense::le, Tn(mnode) - Tn(D.stop(i)));
        }
      }
    }

    if (variant.objective == RoutingObjective::ride_time) {
      for (int s = 0; s < S; ++s) {
        objective.push_back({di[s], 1.0});
        objective.push_back({pi[s], -1.0});
      }
    } else {
      for (const auto& a : arcs) {
        if (a.cls == ArcClass::school_stop) continue;
        const double delta = D(a.i, a.j);
        if (delta != 0.0) objective.push_back({wi[a.i * N + a.j], delta});
      }
    }
  }

  // Coupling across buses.
  for (int m = 0; m < M; ++m) {
    Expr sum;
    for (int k = 0; k < K; ++k) sum += var(v_idx[k][m]);
    add_row(model, "school_demand_" + names::node(p, D.school(m)), sum, Sense::eq, cst(L[m]));
  }
  for (int s = 0; s < S; ++s) {
    Expr sum;
    for (int k = 0; k < K; ++k) {
      for (int i : p.riders[s].stops) {
        if (!active[i]) continue;
        if (fixed) {
          sum += cst(fixed->stop_of[s] == i ? 1.0 : 0.0);
        } else {
          if (e_idx[k][s][i] >= 0) sum += var(e_idx[k][s][i]);
        }
      }
    }
    add_row(model, "assign_once_s" + std::to_string(p.riders[s].id), sum, Sense::eq, cst(1.0));
  }
  model.set_objective(std::move(objective));
  return model;
}

MiloModel build_full_model(const RoutingProblem& p) { return build_routing_model(p, full_variant()); }

MiloModel build_single_bus_model(const RoutingProblem& p) {
  if (p.buses.size() != 1) throw Error(ErrorKind::validation, "single-bus model needs exactly one bus");
  if (p.riders.empty()) throw Error(ErrorKind::validation, "single-bus model needs at least one student");
  return build_routing_model(p, full_variant());
}

MiloModel build_reduced_single_bus_model(const RoutingProblem& p, const StopPreassignment& pre) {
  if (p.buses.size() != 1) throw Error(ErrorKind::validation, "single-bus model needs exactly one bus");
  if (p.riders.empty()) throw Error(ErrorKind::validation, "single-bus model needs at least one student");
  return build_routing_model(p, reduced_variant(pre));
}

}  // namespace sbrsp
