#pragma once

#include <stdexcept>
#include <string>

namespace fujita {

// Base for all domain errors. `code()` maps onto CLI exit codes:
// 2 = validation, 3 = numerical failure, 4 = inconclusive.
class Error : public std::runtime_error {
public:
  Error(std::string kind, const std::string& what, int code = 3)
      : std::runtime_error(what), kind_(std::move(kind)), code_(code) {}
  const std::string& kind() const { return kind_; }
  int code() const { return code_; }

private:
  std::string kind_;
  int code_;
};

struct ValidationError : Error {
  explicit ValidationError(const std::string& what) : Error("ValidationError", what, 2) {}
};

struct NonmonotoneVolume : Error {
  explicit NonmonotoneVolume(const std::string& what) : Error("NonmonotoneVolume", what) {}
};
struct SpliceMismatch : Error {
  explicit SpliceMismatch(const std::string& what) : Error("SpliceMismatch", what) {}
};
struct OutOfRange : Error {
  explicit OutOfRange(const std::string& what) : Error("OutOfRange", what, 2) {}
};
struct OriginSingularity : Error {
  explicit OriginSingularity(const std::string& what) : Error("OriginSingularity", what) {}
};
struct DomainError : Error {
  explicit DomainError(const std::string& what) : Error("DomainError", what, 2) {}
};
struct InsufficientRange : Error {
  explicit InsufficientRange(const std::string& what) : Error("InsufficientRange", what, 2) {}
};
struct StabilityFailure : Error {
  explicit StabilityFailure(const std::string& what) : Error("StabilityFailure", what) {}
};
struct BoundaryContamination : Error {
  explicit BoundaryContamination(const std::string& what) : Error("BoundaryContamination", what) {}
};
struct GridTooCoarse : Error {
  explicit GridTooCoarse(const std::string& what) : Error("GridTooCoarse", what, 4) {}
};
struct BudgetExhausted : Error {
  explicit BudgetExhausted(const std::string& what) : Error("BudgetExhausted", what, 4) {}
};
struct DivergentIntegral : Error {
  explicit DivergentIntegral(const std::string& what) : Error("DivergentIntegral", what) {}
};
struct EnvelopeViolation : Error {
  explicit EnvelopeViolation(const std::string& what) : Error("EnvelopeViolation", what) {}
};
struct NoContraction : Error {
  explicit NoContraction(const std::string& what) : Error("NoContraction", what) {}
};
struct ZeroDistance : Error {
  explicit ZeroDistance(const std::string& what) : Error("ZeroDistance", what, 2) {}
};
struct RangeExceeded : Error {
  explicit RangeExceeded(const std::string& what) : Error("RangeExceeded", what, 2) {}
};
struct ConditionGViolation : Error {
  explicit ConditionGViolation(const std::string& what) : Error("ConditionGViolation", what) {}
};
struct DomainMismatch : Error {
  explicit DomainMismatch(const std::string& what) : Error("DomainMismatch", what, 2) {}
};

}  // namespace fujita
