#pragma once

#include <stdexcept>
#include <string>

namespace acf {

/// Input outside the mathematical domain of an operation (bad order, x<0,
/// xi >= 0 where a bound state is requested, ...).
class domain_error : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Result not representable in double (e.g. K_nu(x) underflows).
class range_error : public std::range_error {
 public:
  using std::range_error::range_error;
};

/// A root or eigenvalue search failed to bracket or converge.
class no_root_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Evaluated a ratio exactly at a pole (zero of the denominator).
class pole_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace acf
