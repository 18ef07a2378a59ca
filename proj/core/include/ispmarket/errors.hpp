#pragma once

#include <stdexcept>
#include <string>

namespace ispmarket {

// A function was evaluated outside its mathematical domain (overloaded
// queue, zero demand where an elasticity is requested, and so on).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// No price pair satisfies the market constraints.
class InfeasibleModel : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace ispmarket
