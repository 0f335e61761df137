#pragma once

#include <stdexcept>
#include <string>

namespace qdensity {

/// Matrix inversion attempted with det not a unit mod d.
class NonUnitDeterminantError : public std::domain_error {
  public:
    NonUnitDeterminantError(const std::string& msg, unsigned long gcd_value)
        : std::domain_error(msg), gcd(gcd_value) {}
    unsigned long gcd;
};

/// Chain construction would exceed the configured state budget.
class StateBudgetError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

}  // namespace qdensity
