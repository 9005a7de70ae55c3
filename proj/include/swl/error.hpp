#pragma once

#include <stdexcept>
#include <string>

namespace swl {

// All precondition and data failures surface as swl::Error.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

inline void require(bool cond, const std::string& message) {
  if (!cond) throw Error(message);
}

}  // namespace swl
