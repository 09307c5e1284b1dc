#pragma once

#include <stdexcept>
#include <string>

namespace curvecast {

/// Thrown for invalid data, bad arguments, or broken file contents.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace curvecast
