#include "fundepth/error.hpp"

namespace fundepth {

std::string_view to_string(Errc code) {
  switch (code) {
    case Errc::EmptyFile: return "EmptyFile";
    case Errc::RowLengthMismatch: return "RowLengthMismatch";
    case Errc::NonMonotoneGrid: return "NonMonotoneGrid";
    case Errc::NonFiniteValue: return "NonFiniteValue";
    case Errc::InvalidNumber: return "InvalidNumber";
    case Errc::DuplicateLabel: return "DuplicateLabel";
    case Errc::FileNotFound: return "FileNotFound";
    case Errc::KOutOfRange: return "KOutOfRange";
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::LengthMismatch: return "LengthMismatch";
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::TooFewPoints: return "TooFewPoints";
    case Errc::TooFewResamples: return "TooFewResamples";
    case Errc::DegenerateSample: return "DegenerateSample";
    case Errc::DegenerateCloud: return "DegenerateCloud";
    case Errc::SingularBandwidth: return "SingularBandwidth";
    case Errc::EmptyRegion: return "EmptyRegion";
    case Errc::EmptyPlot: return "EmptyPlot";
  }
  return "Unknown";
}

ErrorCategory category_of(Errc code) {
  switch (code) {
    case Errc::EmptyFile:
    case Errc::RowLengthMismatch:
    case Errc::NonMonotoneGrid:
    case Errc::NonFiniteValue:
    case Errc::InvalidNumber:
    case Errc::DuplicateLabel:
    case Errc::FileNotFound:
      return ErrorCategory::Input;
    case Errc::KOutOfRange:
    case Errc::DimensionMismatch:
    case Errc::LengthMismatch:
    case Errc::InvalidArgument:
    case Errc::TooFewResamples:
      return ErrorCategory::Usage;
    case Errc::TooFewPoints:
    case Errc::DegenerateSample:
    case Errc::DegenerateCloud:
    case Errc::SingularBandwidth:
    case Errc::EmptyRegion:
    case Errc::EmptyPlot:
      return ErrorCategory::Numerical;
  }
  return ErrorCategory::Numerical;
}

}  // namespace fundepth
