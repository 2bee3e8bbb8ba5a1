#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace fundepth {

enum class Errc {
  // ingestion / format
  EmptyFile,
  RowLengthMismatch,
  NonMonotoneGrid,
  NonFiniteValue,
  InvalidNumber,
  DuplicateLabel,
  FileNotFound,
  // argument contracts
  KOutOfRange,
  DimensionMismatch,
  LengthMismatch,
  InvalidArgument,
  TooFewPoints,
  TooFewResamples,
  // numerical
  DegenerateSample,
  DegenerateCloud,
  SingularBandwidth,
  EmptyRegion,
  EmptyPlot,
};

enum class ErrorCategory { Input, Usage, Numerical };

std::string_view to_string(Errc code);
ErrorCategory category_of(Errc code);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }
  ErrorCategory category() const noexcept { return category_of(code_); }

 private:
  Errc code_;
};

}  // namespace fundepth
