#pragma once

#include <stdexcept>
#include <string>

namespace dsg {

enum class ErrorCode {
  kInvalidArgument = 1,
  kDimensionMismatch = 2,
  kNotConnected = 3,
  kNotConverged = 4,
  kIo = 5,
  kParse = 6,
  kValidation = 7,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace dsg
