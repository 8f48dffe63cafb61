#pragma once

#include <stdexcept>
#include <string>

namespace boson_chaos {

// Invalid input: bad parameters, states that do not belong to a basis,
// ranges that leave nothing to compute. Maps to CLI exit code 2.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// A numerical routine failed (eigensolver non-convergence, broken
// normalization). Maps to CLI exit code 3.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace boson_chaos
