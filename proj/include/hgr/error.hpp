#pragma once

#include <stdexcept>
#include <string>

namespace hgr {

// Contract violations and unrecoverable pipeline failures. The message
// always names the operation (and, for pipelines, the stage) that failed.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

inline void require(bool condition, const std::string& message) {
  if (!condition) throw Error(message);
}

}  // namespace hgr
