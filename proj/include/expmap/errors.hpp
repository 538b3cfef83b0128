#pragma once

#include <stdexcept>
#include <string>

namespace expmap {

/// Invalid input: bad parameters, malformed specs, out-of-domain arguments.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A computed quantity broke an invariant that holds mathematically, which
/// points at a numerical or implementation bug rather than bad input.
class ConsistencyError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace expmap
