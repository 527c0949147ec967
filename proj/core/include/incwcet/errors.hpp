#pragma once

#include <stdexcept>
#include <string>

namespace incwcet {

// Thrown when an operation is invoked outside its stated precondition.
class PreconditionError : public std::logic_error {
 public:
  explicit PreconditionError(const std::string& what) : std::logic_error(what) {}
};

}  // namespace incwcet
