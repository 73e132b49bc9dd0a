#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace sbrsp::milp {

enum class VarKind { binary, continuous };
enum class Sense { le, ge, eq };

struct Variable {
  std::string name;
  VarKind kind = VarKind::continuous;
  double lower = 0.0;
  double upper = INFINITY;
};

struct Term {
  int var = 0;
  double coef = 0.0;
};

struct Constraint {
  std::string name;
  std::vector<Term> terms;
  Sense sense = Sense::le;
  double rhs = 0.0;
};

using ValueMap = std::unordered_map<std::string, double>;

struct Violation {
  std::string constraint;
  double amount = 0.0;
};

class MiloModel {
 public:
  explicit MiloModel(std::string name = "model") : name_(std::move(name)) {}

  int add_binary(const std::string& name);
  int add_continuous(const std::string& name, double lower = 0.0, double upper = INFINITY);
  // Terms on the same variable are merged; zero coefficients dropped.
  void add_constraint(const std::string& name, std::vector<Term> terms, Sense sense, double rhs);
  void set_objective(std::vector<Term> terms, double offset = 0.0);
  void fix(int var, double value);

  const std::string& name() const { return name_; }
  const std::vector<Variable>& variables() const { return vars_; }
  const std::vector<Constraint>& constraints() const { return cons_; }
  const std::vector<Term>& objective() const { return obj_; }
  double objective_offset() const { return offset_; }
  std::optional<int> find(const std::string& name) const;
  int index(const std::string& name) const;  // throws when missing
  std::size_t binary_count() const;

  void set_warm_start(ValueMap values) { warm_ = std::move(values); }
  const std::optional<ValueMap>& warm_start() const { return warm_; }

  // Dense value vector from a map; variables missing from the map take their
  // lower bound when it is finite, else 0.
  std::vector<double> dense(const ValueMap& values) const;
  ValueMap to_map(const std::vector<double>& values) const;
  double evaluate(const std::vector<double>& values) const;
  // Bounds, integrality and rows, each with absolute tolerance.
  std::vector<Violation> check(const std::vector<double>& values, double tol = 1e-6) const;

  // CPLEX LP text.
  std::string to_lp() const;

 private:
  int add_var(const std::string& name, VarKind kind, double lower, double upper);
  std::string name_;
  std::vector<Variable> vars_;
  std::vector<Constraint> cons_;
  std::vector<Term> obj_;
  double offset_ = 0.0;
  std::unordered_map<std::string, int> by_name_;
  std::unordered_map<std::string, int> con_names_;
  std::optional<ValueMap> warm_;
};

}  // namespace sbrsp::milp
