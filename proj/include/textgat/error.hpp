#pragma once

#include <stdexcept>
#include <string>

namespace textgat {

// Single exception type for every recoverable failure in the library. The CLI
// turns these into a diagnostic on stderr and a nonzero exit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace textgat
