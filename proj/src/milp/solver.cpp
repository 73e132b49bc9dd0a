#include "sbrsp/milp/solver.hpp"

#include <atomic>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <thread>

#include "highs_c_api.hpp"
#include "json.hpp"
#include "sbrsp/error.hpp"

namespace sbrsp::milp {

std::string_view status_name(SolveStatus s) {
  switch (s) {
    case SolveStatus::optimal: return "Optimal";
    case SolveStatus::feasible: return "Feasible";
    case SolveStatus::infeasible: return "Infeasible";
    case SolveStatus::unbounded: return "Unbounded";
    case SolveStatus::time_limit_no_solution: return "TimeLimitNoSolution";
  }
  return "Unknown";
}

double MiloSolution::gap() const {
  if (!has_values() || !std::isfinite(best_bound)) return INFINITY;
  const double denom = std::max(1e-9, std::abs(objective));
  return std::max(0.0, objective - best_bound) / denom;
}

namespace {

// Owns a Highs handle.
class HighsHandle {
 public:
  HighsHandle() : h_(Highs_create()) {
    if (!h_) throw Error(ErrorKind::backend, "HiGHS failed to create a solver instance");
    Highs_setBoolOptionValue(h_, "output_flag", 0);
  }
  ~HighsHandle() { Highs_destroy(h_); }
  HighsHandle(const HighsHandle&) = delete;
  HighsHandle& operator=(const HighsHandle&) = delete;
  void* get() const { return h_; }

  void apply(const SolveOptions& o) {
    if (!(o.time_limit_s > 0)) throw Error(ErrorKind::validation, "time limit must be positive");
    check(Highs_setDoubleOptionValue(h_, "time_limit", o.time_limit_s), "time_limit");
    check(Highs_setDoubleOptionValue(h_, "mip_rel_gap", o.mip_rel_gap), "mip_rel_gap");
    check(Highs_setDoubleOptionValue(h_, "mip_abs_gap", o.mip_abs_gap), "mip_abs_gap");
    check(Highs_setIntOptionValue(h_, "random_seed", static_cast<HighsInt>(o.seed % 2147483647u)), "random_seed");
    if (o.node_limit) {
      check(Highs_setIntOptionValue(h_, "mip_max_nodes", static_cast<HighsInt>(*o.node_limit)), "mip_max_nodes");
    }
  }

  static void check(HighsInt status, const char* what) {
    if (status == highs_c::kStatusError) throw Error(ErrorKind::backend, std::string("HiGHS rejected ") + what);
  }

  // Runs and reads back status, values (ordered as `cols`) and bounds.
  MiloSolution run_and_collect(const std::vector<HighsInt>& cols, bool is_mip) {
    using namespace highs_c;
    const HighsInt rc = Highs_run(h_);
    const HighsInt ms = Highs_getModelStatus(h_);
    MiloSolution sol;
    sol.wall_time_s = Highs_getRunTime(h_);
    auto read_values = [&] {
      std::vector<double> all(static_cast<std::size_t>(std::max<HighsInt>(1, Highs_getNumCol(h_))));
      Highs_getSolution(h_, all.data(), nullptr, nullptr, nullptr);
      sol.values.resize(cols.size());
      for (std::size_t i = 0; i < cols.size(); ++i) sol.values[i] = cols[i] >= 0 ? all[cols[i]] : 0.0;
      sol.objective = Highs_getObjectiveValue(h_);
    };
    auto read_bound = [&] {
      double b = 0;
      if (is_mip && Highs_getDoubleInfoValue(h_, "mip_dual_bound", &b) != kStatusError) {
        sol.best_bound = b;
      } else {
        sol.best_bound = sol.objective;
      }
    };
    switch (ms) {
      case kOptimal:
      case kModelEmpty:
        sol.status = SolveStatus::optimal;
        read_values();
        read_bound();
        return sol;
      case kInfeasible:
      case kUnboundedOrInfeasible:
        sol.status = SolveStatus::infeasible;
        return sol;
      case kUnbounded:
        sol.status = SolveStatus::unbounded;
        return sol;
      case kTimeLimit:
      case kIterationLimit:
      case kSolutionLimit:
      case kObjectiveBound:
      case kObjectiveTarget:
      case kInterrupt:
      case kUnknown: {
        HighsInt primal = 0;
        Highs_getIntInfoValue(h_, "primal_solution_status", &primal);
        if (primal == 2) {
          sol.status = SolveStatus::feasible;
          read_values();
          read_bound();
        } else {
          sol.status = SolveStatus::time_limit_no_solution;
          read_bound();
        }
        return sol;
      }
      default:
        break;
    }
    throw Error(ErrorKind::backend, "HiGHS failed (run status " + std::to_string(rc) + ", model status " +
                                        std::to_string(ms) + ")");
  }

 private:
  void* h_;
};

class HighsBackend : public SolverBackend {
 public:
  std::string id() const override { return "highs"; }
  bool supports_warm_start() const override { return true; }

  MiloSolution run(const MiloModel& model, const SolveOptions& opts) override {
    const auto& vars = model.variables();
    const auto& cons = model.constraints();
    const HighsInt nc = static_cast<HighsInt>(vars.size());
    const HighsInt nr = static_cast<HighsInt>(cons.size());
    std::vector<double> cost(std::max<HighsInt>(1, nc), 0.0), lo(std::max<HighsInt>(1, nc)),
        hi(std::max<HighsInt>(1, nc));
    std::vector<HighsInt> integrality(std::max<HighsInt>(1, nc), highs_c::kVarContinuous);
    bool is_mip = false;
    for (HighsInt i = 0; i < nc; ++i) {
      lo[i] = vars[i].lower;
      hi[i] = vars[i].upper;
      if (vars[i].kind == VarKind::binary) {
        integrality[i] = highs_c::kVarInteger;
        is_mip = true;
      }
    }
    for (const auto& t : model.objective()) cost[t.var] += t.coef;
    std::vector<double> rlo(std::max<HighsInt>(1, nr)), rhi(std::max<HighsInt>(1, nr));
    std::vector<HighsInt> start(static_cast<std::size_t>(nr) + 1, 0), index;
    std::vector<double> value;
    for (HighsInt r = 0; r < nr; ++r) {
      const auto& c = cons[r];
      start[r] = static_cast<HighsInt>(index.size());
      for (const auto& t : c.terms) {
        index.push_back(t.var);
        value.push_back(t.coef);
      }
      rlo[r] = c.sense == Sense::le ? -INFINITY : c.rhs;
      rhi[r] = c.sense == Sense::ge ? INFINITY : c.rhs;
    }
    start[nr] = static_cast<HighsInt>(index.size());
    if (index.empty()) {
      index.push_back(0);
      value.push_back(0.0);
    }
    HighsHandle h;
    HighsHandle::check(Highs_passMip(h.get(), nc, nr, start[nr], highs_c::kRowwise, highs_c::kMinimize,
                                     model.objective_offset(), cost.data(), lo.data(), hi.data(), rlo.data(),
                                     rhi.data(), start.data(), index.data(), value.data(), integrality.data()),
                       "model");
    h.apply(opts);
    if (model.warm_start() && nc > 0) {
      const auto start_values = model.dense(*model.warm_start());
      Highs_setSolution(h.get(), start_values.data(), nullptr, nullptr, nullptr);
    }
    std::vector<HighsInt> cols(vars.size());
    for (HighsInt i = 0; i < nc; ++i) cols[i] = i;
    return h.run_and_collect(cols, is_mip);
  }
};

std::atomic<std::uint64_t> g_lp_counter{0};

class HighsLpBackend : public SolverBackend {
 public:
  std::string id() const override { return "highs-lp"; }
  bool supports_warm_start() const override { return false; }

  MiloSolution run(const MiloModel& model, const SolveOptions& opts) override {
    namespace fs = std::filesystem;
    const auto tag = std::to_string(std::hash<std::thread::id>{}(std::this_thread::get_id())) + "-" +
                     std::to_string(g_lp_counter.fetch_add(1));
    const fs::path file = fs::temp_directory_path() / ("sbrsp-" + tag + ".lp");
    {
      std::ofstream out(file);
      if (!out) throw Error(ErrorKind::backend, "cannot write LP file " + file.string());
      out << model.to_lp();
    }
    struct Cleanup {
      fs::path p;
      ~Cleanup() {
        std::error_code ec;
        fs::remove(p, ec);
      }
    } cleanup{file};
    HighsHandle h;
    if (Highs_readModel(h.get(), file.string().c_str()) == highs_c::kStatusError) {
      throw Error(ErrorKind::backend, "HiGHS could not read the LP file");
    }
    h.apply(opts);
    std::vector<HighsInt> cols(model.variables().size(), -1);
    bool is_mip = false;
    for (std::size_t i = 0; i < cols.size(); ++i) {
      HighsInt c = -1;
      // Columns that appear in no row or objective may be absent from the file's column set.
      if (Highs_getColByName(h.get(), model.variables()[i].name.c_str(), &c) != highs_c::kStatusError) cols[i] = c;
      is_mip = is_mip || model.variables()[i].kind == VarKind::binary;
    }
    MiloSolution sol = h.run_and_collect(cols, is_mip);
    if (sol.has_values()) {
      for (std::size_t i = 0; i < cols.size(); ++i) {
        if (cols[i] < 0) {
          const auto& v = model.variables()[i];
          sol.values[i] = std::isfinite(v.lower) ? v.lower : 0.0;
        }
      }
    }
    return sol;
  }
};

}  // namespace

std::unique_ptr<SolverBackend> make_backend(std::string_view id) {
  if (id == "highs") return std::make_unique<HighsBackend>();
  if (id == "highs-lp") return std::make_unique<HighsLpBackend>();
  throw Error(ErrorKind::usage, "unknown solver backend '" + std::string(id) + "'");
}

std::vector<std::string> backend_ids() { return {"highs", "highs-lp"}; }

MiloSolution solve(const MiloModel& model, const SolveOptions& opts) {
  auto backend = make_backend(opts.backend);
  return solve(model, opts, *backend);
}

MiloSolution solve(const MiloModel& model, const SolveOptions& opts, SolverBackend& backend) {
  const auto t0 = std::chrono::steady_clock::now();
  for (const auto& v : model.variables()) {
    if (v.lower > v.upper) {
      MiloSolution sol;
      sol.status = SolveStatus::infeasible;
      return sol;
    }
  }
  std::optional<std::vector<double>> warm;
  double warm_obj = INFINITY;
  if (model.warm_start()) {
    auto w = model.dense(*model.warm_start());
    if (model.check(w).empty()) {
      warm_obj = model.evaluate(w);
      warm = std::move(w);
    }
  }

  MiloSolution sol = backend.run(model, opts);
  if (sol.has_values()) {
    const auto& vars = model.variables();
    for (std::size_t i = 0; i < vars.size(); ++i) {
      if (vars[i].kind == VarKind::binary) sol.values[i] = std::round(sol.values[i]);
    }
    sol.objective = model.evaluate(sol.values);
  }
  if (warm && (!sol.has_values() || sol.objective > warm_obj)) {
    if (!sol.has_values() || sol.objective > warm_obj + 1e-9 * std::max(1.0, std::abs(warm_obj))) {
      sol.warm_start_kept = true;
    }
    sol.status = sol.status == SolveStatus::optimal ? SolveStatus::optimal : SolveStatus::feasible;
    sol.values = *warm;
    sol.objective = warm_obj;
  }
  sol.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return sol;
}

std::string solution_to_json(const MiloModel& model, const MiloSolution& sol) {
  nlohmann::ordered_json j;
  j["status"] = std::string(status_name(sol.status));
  if (sol.has_values()) {
    j["objective"] = sol.objective;
  } else {
    j["objective"] = nullptr;
  }
  if (std::isfinite(sol.best_bound)) {
    j["best_bound"] = sol.best_bound;
  } else {
    j["best_bound"] = nullptr;
  }
  nlohmann::ordered_json vars = nlohmann::ordered_json::object();
  if (sol.has_values()) {
    for (std::size_t i = 0; i < model.variables().size(); ++i) vars[model.variables()[i].name] = sol.values[i];
  }
  j["vars"] = vars;
  return j.dump(1) + "\n";
}

}  // namespace sbrsp::milp
