#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sbrsp/milp/model.hpp"

namespace sbrsp::milp {

struct SolveOptions {
  double time_limit_s = 60.0;
  double mip_rel_gap = 1e-4;
  double mip_abs_gap = 1e-6;
  int threads = 1;
  std::uint64_t seed = 0;
  // Branch-and-bound node cap; with it set, limits no longer depend on the clock.
  std::optional<std::int64_t> node_limit;
  std::string backend = "highs";
};

enum class SolveStatus { optimal, feasible, infeasible, unbounded, time_limit_no_solution };

std::string_view status_name(SolveStatus s);

struct MiloSolution {
  SolveStatus status = SolveStatus::infeasible;
  double objective = INFINITY;
  std::vector<double> values;  // dense, present iff optimal or feasible
  double best_bound = -INFINITY;
  double wall_time_s = 0.0;
  bool warm_start_kept = false;  // the supplied start beat the solver incumbent

  bool has_values() const { return status == SolveStatus::optimal || status == SolveStatus::feasible; }
  double gap() const;
};

class SolverBackend {
 public:
  virtual ~SolverBackend() = default;
  virtual std::string id() const = 0;
  virtual bool supports_warm_start() const = 0;
  // Raw solve. Throws Error(backend) on solver failure.
  virtual MiloSolution run(const MiloModel& model, const SolveOptions& opts) = 0;
};

// "highs" (in-process) or "highs-lp" (LP text round trip through a file).
std::unique_ptr<SolverBackend> make_backend(std::string_view id);
std::vector<std::string> backend_ids();

// Solves with the named backend. A warm start on the model that checks
// feasible is passed to the backend and returned instead of any worse incumbent.
MiloSolution solve(const MiloModel& model, const SolveOptions& opts);
MiloSolution solve(const MiloModel& model, const SolveOptions& opts, SolverBackend& backend);

std::string solution_to_json(const MiloModel& model, const MiloSolution& sol);

}  // namespace sbrsp::milp
