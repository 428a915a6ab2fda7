#pragma once

#include <stdexcept>
#include <string>

namespace chernlab {

enum class ErrorKind {
  DomainViolation,
  NonFinite,
  SingularMetric,
  HolomorphyViolation,
  RankDeficient,
  HypothesisFail,
  KahlerRequired,
  NotPeriodic,
  InvalidArgument,
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::DomainViolation: return "DomainViolation";
    case ErrorKind::NonFinite: return "NonFinite";
    case ErrorKind::SingularMetric: return "SingularMetric";
    case ErrorKind::HolomorphyViolation: return "HolomorphyViolation";
    case ErrorKind::RankDeficient: return "RankDeficient";
    case ErrorKind::HypothesisFail: return "HypothesisFail";
    case ErrorKind::KahlerRequired: return "KahlerRequired";
    case ErrorKind::NotPeriodic: return "NotPeriodic";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

  // Breakdowns of the numerics (as opposed to unmet hypotheses or bad input).
  bool is_numerical_breakdown() const noexcept {
    return kind_ == ErrorKind::DomainViolation || kind_ == ErrorKind::NonFinite ||
           kind_ == ErrorKind::SingularMetric || kind_ == ErrorKind::HolomorphyViolation ||
           kind_ == ErrorKind::RankDeficient || kind_ == ErrorKind::NotPeriodic;
  }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace chernlab
