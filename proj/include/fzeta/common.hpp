#pragma once

#include <complex>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <string_view>

namespace fzeta {

using cplx = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Every failure mode surfaced by the library. The CLI maps these onto exit codes.
enum class ErrorCode {
  InvalidSpec,
  TailBoundUnavailable,
  NotConvergent,
  PoleProximity,
  ContourCrossesPole,
  NotConverged,
  ZeroOnContour,
  Ambiguous,
  CatalogMissingAndSearchFailed,
  InvalidRatios,
  InvalidOrder,
  InvalidParameters,
  TruncationUnstable,
  DeltaTooSmall,
  GridTooCoarse,
  OutOfRange,
  DivergentAt,
  InsufficientSamples,
  DegenerateFit,
  PeriodMismatch,
  NoiseFloorUndetermined,
  OmegaEqualsN,
  NewtonDiverged,
  EmptyUnion,
  MissingPrincipalPole,
  ConfigParse,
  MissingArtifacts,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// A value together with an absolute error estimate.
template <typename T>
struct Estimate {
  T value{};
  double error = 0.0;
};

}  // namespace fzeta
