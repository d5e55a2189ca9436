#pragma once

#include <stdexcept>
#include <string>

namespace inarlab {

// Bad numeric argument (probability outside its range, nonpositive mean, ...).
class invalid_parameter : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Configuration object violates its own invariant.
class invalid_config : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A computation would exceed one of the configured size limits
// (window atoms, alphabet size for event enumeration, window width).
class resource_limit : public std::length_error {
 public:
  using std::length_error::length_error;
};

// Sampling from a table whose untabulated mass is too large to ignore.
class refuse_to_sample : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Too few usable points for a fit.
class insufficient_data : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

namespace detail {

inline void require(bool ok, const std::string& what) {
  if (!ok) throw invalid_parameter(what);
}

}  // namespace detail
}  // namespace inarlab
