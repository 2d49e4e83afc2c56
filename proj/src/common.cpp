#include "fzeta/common.hpp"

namespace fzeta {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidSpec: return "InvalidSpec";
    case ErrorCode::TailBoundUnavailable: return "TailBoundUnavailable";
    case ErrorCode::NotConvergent: return "NotConvergent";
    case ErrorCode::PoleProximity: return "PoleProximity";
    case ErrorCode::ContourCrossesPole: return "ContourCrossesPole";
    case ErrorCode::NotConverged: return "NotConverged";
    case ErrorCode::ZeroOnContour: return "ZeroOnContour";
    case ErrorCode::Ambiguous: return "Ambiguous";
    case ErrorCode::CatalogMissingAndSearchFailed: return "CatalogMissingAndSearchFailed";
    case ErrorCode::InvalidRatios: return "InvalidRatios";
    case ErrorCode::InvalidOrder: return "InvalidOrder";
    case ErrorCode::InvalidParameters: return "InvalidParameters";
    case ErrorCode::TruncationUnstable: return "TruncationUnstable";
    case ErrorCode::DeltaTooSmall: return "DeltaTooSmall";
    case ErrorCode::GridTooCoarse: return "GridTooCoarse";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::DivergentAt: return "DivergentAt";
    case ErrorCode::InsufficientSamples: return "InsufficientSamples";
    case ErrorCode::DegenerateFit: return "DegenerateFit";
    case ErrorCode::PeriodMismatch: return "PeriodMismatch";
    case ErrorCode::NoiseFloorUndetermined: return "NoiseFloorUndetermined";
    case ErrorCode::OmegaEqualsN: return "OmegaEqualsN";
    case ErrorCode::NewtonDiverged: return "NewtonDiverged";
    case ErrorCode::EmptyUnion: return "EmptyUnion";
    case ErrorCode::MissingPrincipalPole: return "MissingPrincipalPole";
    case ErrorCode::ConfigParse: return "ConfigParse";
    case ErrorCode::MissingArtifacts: return "MissingArtifacts";
  }
  return "Unknown";
}

}  // namespace fzeta
