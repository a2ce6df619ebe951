#ifndef FGO_ERRORS_HPP_
#define FGO_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace fgo {

// Raised for invalid sizes or hyperparameters, before any work starts.
class ConfigError : public std::invalid_argument {
 public:
  explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

// Everything else that violates an operation's precondition throws
// std::domain_error.

}  // namespace fgo

#endif  // FGO_ERRORS_HPP_
