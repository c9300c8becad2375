#pragma once
#include <stdexcept>
#include <string>

namespace nhim {

enum class Code : int {
  Ok = 0,
  DomainViolation = 1,
  PrecisionExhausted,
  SingularOrUnverifiable,
  DimensionMismatch,
  RadiusCollapse,
  LeftAmbientBox,
  ConeSignLoss,
  UnsupportedSignature,
  GuessOutOfDomain,
  MonotonicityUnverified,
  GapCollapse,
  BranchInconsistent,
  NoSolution,
  DegenerateOrbit,
  InvalidArgument,
  CoveringFailed,
  CertificateMismatch,
};

const char* code_name(Code c);

class Error : public std::runtime_error {
 public:
  Error(Code c, std::string msg, long step = -1)
      : std::runtime_error(std::move(msg)), code_(c), step_(step) {}
  Code code() const { return code_; }
  long step() const { return step_; }
  Error at_step(long s) const { return Error(code_, what(), s); }

 private:
  Code code_;
  long step_;
};

}  // namespace nhim
