#include "sbrsp/error.hpp"

#include "json.hpp"

namespace sbrsp {

std::string_view error_kind_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::parse: return "parse";
    case ErrorKind::validation: return "validation";
    case ErrorKind::stranded_student: return "stranded_student";
    case ErrorKind::disconnected: return "disconnected";
    case ErrorKind::infeasible: return "infeasible";
    case ErrorKind::no_solution: return "no_solution";
    case ErrorKind::capacity: return "capacity";
    case ErrorKind::calibration: return "calibration";
    case ErrorKind::backend: return "backend";
    case ErrorKind::usage: return "usage";
  }
  return "unknown";
}

std::string Error::to_json() const {
  nlohmann::json j = {{"error", std::string(error_kind_name(kind_))}, {"message", what()}};
  if (!subject_.empty()) j["subject"] = subject_;
  return j.dump();
}

}  // namespace sbrsp
