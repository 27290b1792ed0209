#pragma once

#include <stdexcept>
#include <string>

namespace basslv {

/// Input pair violates a structural requirement (absolute continuity,
/// support inclusion, density floor, convex order, irreducibility).
class AssumptionViolation : public std::domain_error {
  public:
    explicit AssumptionViolation(const std::string& what) : std::domain_error(what) {}
};

/// Malformed or arbitrage-violating market data.
class DataError : public std::runtime_error {
  public:
    explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace basslv
