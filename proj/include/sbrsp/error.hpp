#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace sbrsp {

enum class ErrorKind {
  parse,
  validation,
  stranded_student,
  disconnected,
  infeasible,
  no_solution,
  capacity,
  calibration,
  backend,
  usage,
};

std::string_view error_kind_name(ErrorKind kind);

// Domain error carried through every module. `subject` names the offending
// entity ("students[3].school", "student 17", "cluster 2") when there is one.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string message, std::string subject = {})
      : std::runtime_error(std::move(message)), kind_(kind), subject_(std::move(subject)) {}

  ErrorKind kind() const { return kind_; }
  const std::string& subject() const { return subject_; }

  // {"error": kind, "message": ..., "subject": ...}
  std::string to_json() const;

 private:
  ErrorKind kind_;
  std::string subject_;
};

}  // namespace sbrsp
