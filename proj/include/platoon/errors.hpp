#pragma once

#include <stdexcept>
#include <string>

namespace platoon {

/// Precondition violated by a caller-supplied value.
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Cross traffic consumes all link bandwidth, so the leftover service rate is
/// not positive and no finite delay bound exists.
class SaturatedLink : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A vehicle with no computing capacity was asked to process work.
class ZeroCompute : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Computing plus protocol delay alone already exceed the time budget.
class InfeasibleBudget : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Every arm of the sleeping bandit is asleep.
class NoArmsAwake : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bandwidth total would exceed the system-wide cap.
class CapViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A segment would be asked to give more bandwidth than it holds.
class NegativeBandwidth : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace platoon
