#pragma once

#include <stdexcept>
#include <string>

namespace cce {

struct usage_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// malformed config or data file; the message names the key or line
struct parse_error : usage_error {
    using usage_error::usage_error;
};

struct domain_error : std::domain_error {
    using std::domain_error::domain_error;
};

// the state violates an inequality the equations require (e.g. a negative radicand)
struct infeasible_state : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct internal_error : std::logic_error {
    using std::logic_error::logic_error;
};

struct io_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace cce
