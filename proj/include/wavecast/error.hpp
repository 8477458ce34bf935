#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace wavecast {

enum class ErrorKind {
  InvalidArgument,
  Config,
  Io,
  MalformedHeader,
  MalformedRow,
  EmptyFile,
  NoUsableSegment,
  DegenerateVariable,
  FrameTooShort,
  BadCheckpoint,
  ShapeMismatch,
  DisconnectedGraph,
  NonFiniteValue,
  NonFiniteLoss,
  ZeroSpectrum,
  DegenerateVariance,
  DegenerateRange,
  AllZeroDifferences,
  MissingPrediction,
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// Process exit codes: 2 usage, 3 data, 4 numerical.
int exit_code_for(ErrorKind kind);

}  // namespace wavecast
