#pragma once

#include <stdexcept>
#include <string>

namespace aixilab {

// Configuration-class failures: bad parameters, malformed models, budgets that
// cannot run the requested job.  The CLI maps these to exit code 2.
struct config_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct malformed_model : config_error {
  using config_error::config_error;
};

struct budget_too_small : config_error {
  using config_error::config_error;
};

struct suite_mismatch : config_error {
  using config_error::config_error;
};

// Runtime-data failures (exit code 1).
struct zero_prefix_mass : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct zero_mass : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct empty_class : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace aixilab
