#pragma once

#include <stdexcept>
#include <string>

namespace fairmeta {

// Input files that are missing, malformed, or inconsistent. CLI exit code 2.
struct DataError : std::runtime_error {
  explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

// Non-finite objectives or gradients during training. CLI exit code 3.
struct NumericError : std::runtime_error {
  explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace fairmeta
