#pragma once

#include <stdexcept>
#include <string>

namespace qkr {

enum class ErrorCode {
  InvalidArgument = 1,
  DimensionTooLarge,
  WrongRepresentation,
  NonDecaying,
  NotConverged,
  Io,
};

/// Every failure raised by the library carries a code so the C layer can map
/// it onto a status value without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace qkr
