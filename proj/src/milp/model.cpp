#include "sbrsp/milp/model.hpp"

#include <algorithm>
#include <cstdio>
#include <map>

#include "sbrsp/error.hpp"

namespace sbrsp::milp {

namespace {

std::vector<Term> merge_terms(std::vector<Term> terms) {
  std::sort(terms.begin(), terms.end(), [](const Term& a, const Term& b) { return a.var < b.var; });
  std::vector<Term> out;
  for (const auto& t : terms) {
    if (!out.empty() && out.back().var == t.var) {
      out.back().coef += t.coef;
    } else {
      out.push_back(t);
    }
  }
  std::erase_if(out, [](const Term& t) { return t.coef == 0.0; });
  return out;
}

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

int MiloModel::add_var(const std::string& name, VarKind kind, double lower, double upper) {
  if (!by_name_.emplace(name, static_cast<int>(vars_.size())).second) {
    throw Error(ErrorKind::validation, "duplicate variable name " + name);
  }
  vars_.push_back({name, kind, lower, upper});
  return static_cast<int>(vars_.size()) - 1;
}

int MiloModel::add_binary(const std::string& name) { return add_var(name, VarKind::binary, 0.0, 1.0); }

int MiloModel::add_continuous(const std::string& name, double lower, double upper) {
  return add_var(name, VarKind::continuous, lower, upper);
}

void MiloModel::add_constraint(const std::string& name, std::vector<Term> terms, Sense sense, double rhs) {
  for (const auto& t : terms) {
    if (t.var < 0 || t.var >= static_cast<int>(vars_.size())) {
      throw Error(ErrorKind::validation, "constraint " + name + " references an undeclared variable");
    }
  }
  if (!con_names_.emplace(name, static_cast<int>(cons_.size())).second) {
    throw Error(ErrorKind::validation, "duplicate constraint name " + name);
  }
  cons_.push_back({name, merge_terms(std::move(terms)), sense, rhs});
}

void MiloModel::set_objective(std::vector<Term> terms, double offset) {
  obj_ = merge_terms(std::move(terms));
  offset_ = offset;
}

void MiloModel::fix(int var, double value) {
  vars_.at(var).lower = value;
  vars_.at(var).upper = value;
}

std::optional<int> MiloModel::find(const std::string& name) const {
  auto it = by_name_.find(name);
  if (it == by_name_.end()) return std::nullopt;
  return it->second;
}

int MiloModel::index(const std::string& name) const {
  auto i = find(name);
  if (!i) throw Error(ErrorKind::validation, "unknown variable " + name);
  return *i;
}

std::size_t MiloModel::binary_count() const {
  return static_cast<std::size_t>(
      std::count_if(vars_.begin(), vars_.end(), [](const Variable& v) { return v.kind == VarKind::binary; }));
}

std::vector<double> MiloModel::dense(const ValueMap& values) const {
  std::vector<double> out(vars_.size());
  for (std::size_t i = 0; i < vars_.size(); ++i) {
    auto it = values.find(vars_[i].name);
    if (it != values.end()) {
      out[i] = it->second;
    } else {
      out[i] = std::isfinite(vars_[i].lower) ? vars_[i].lower : 0.0;
    }
  }
  return out;
}

ValueMap MiloModel::to_map(const std::vector<double>& values) const {
  ValueMap out;
  out.reserve(vars_.size());
  for (std::size_t i = 0; i < vars_.size(); ++i) out.emplace(vars_[i].name, values[i]);
  return out;
}

double MiloModel::evaluate(const std::vector<double>& values) const {
  double v = offset_;
  for (const auto& t : obj_) v += t.coef * values[t.var];
  return v;
}

std::vector<Violation> MiloModel::check(const std::vector<double>& values, double tol) const {
  std::vector<Violation> out;
  for (std::size_t i = 0; i < vars_.size(); ++i) {
    const auto& v = vars_[i];
    const double x = values[i];
    if (x < v.lower - tol) out.push_back({"bound:" + v.name, v.lower - x});
    if (x > v.upper + tol) out.push_back({"bound:" + v.name, x - v.upper});
    if (v.kind == VarKind::binary && std::abs(x - std::round(x)) > tol) {
      out.push_back({"integrality:" + v.name, std::abs(x - std::round(x))});
    }
  }
  for (const auto& c : cons_) {
    double lhs = 0.0;
    for (const auto& t : c.terms) lhs += t.coef * values[t.var];
    double excess = 0.0;
    switch (c.sense) {
      case Sense::le: excess = lhs - c.rhs; break;
      case Sense::ge: excess = c.rhs - lhs; break;
      case Sense::eq: excess = std::abs(lhs - c.rhs); break;
    }
    if (excess > tol) out.push_back({c.name, excess});
  }
  return out;
}

std::string MiloModel::to_lp() const {
  std::string s;
  s += "\\ " + name_ + "\n";
  auto write_terms = [&](const std::vector<Term>& terms) {
    int on_line = 0;
    for (const auto& t : terms) {
      s += t.coef < 0 ? " - " : " + ";
      s += num(std::abs(t.coef)) + " " + vars_[t.var].name;
      if (++on_line % 8 == 0) s += "\n ";
    }
  };
  s += "Minimize\n obj:";
  std::vector<Term> obj = obj_;
  const bool has_offset = offset_ != 0.0;
  if (obj.empty() && !has_offset && !vars_.empty()) obj.push_back({0, 0.0});
  write_terms(obj);
  if (has_offset) s += " + " + num(offset_) + " __offset";
  s += "\nSubject To\n";
  for (const auto& c : cons_) {
    s += " " + c.name + ":";
    if (c.terms.empty()) {
      s += " 0 __offset";
    } else {
      write_terms(c.terms);
    }
    switch (c.sense) {
      case Sense::le: s += " <= "; break;
      case Sense::ge: s += " >= "; break;
      case Sense::eq: s += " = "; break;
    }
    s += num(c.rhs) + "\n";
  }
  s += "Bounds\n";
  for (const auto& v : vars_) {
    if (v.lower == v.upper) {
      s += " " + v.name + " = " + num(v.lower) + "\n";
      continue;
    }
    const std::string lo = std::isfinite(v.lower) ? num(v.lower) : "-inf";
    const std::string hi = std::isfinite(v.upper) ? num(v.upper) : "+inf";
    s += " " + lo + " <= " + v.name + " <= " + hi + "\n";
  }
  if (has_offset || std::any_of(cons_.begin(), cons_.end(), [](const Constraint& c) { return c.terms.empty(); })) {
    s += " __offset = 1\n";
  }
  const bool any_bin = binary_count() > 0;
  if (any_bin) {
    s += "General\n";
    for (const auto& v : vars_) {
      if (v.kind == VarKind::binary) s += " " + v.name + "\n";
    }
  }
  s += "End\n";
  return s;
}

}  // namespace sbrsp::milp
