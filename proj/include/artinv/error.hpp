#pragma once

#include <stdexcept>
#include <string>

namespace artinv {

enum class Errc {
  kMalformedFile,
  kChecksumMismatch,
  kWrongBasisCount,
  kOutOfBounds,
  kBadArgument,
  kEmptyInput,
  kInsufficientResonances,
  kInsufficientPoles,
  kNoStableFormants,
  kIoFailure,
  kBadConfig,
};

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& msg) { throw Error(code, msg); }

}  // namespace artinv
