#include "icm/error.hpp"

namespace icm {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NegativeMass: return "NegativeMass";
    case ErrorKind::PriorNotPositive: return "PriorNotPositive";
    case ErrorKind::SumOutOfTolerance: return "SumOutOfTolerance";
    case ErrorKind::ShapeMismatch: return "ShapeMismatch";
    case ErrorKind::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorKind::RhoOutOfRange: return "RhoOutOfRange";
    case ErrorKind::AllModelsZeroLikelihood: return "AllModelsZeroLikelihood";
    case ErrorKind::AllInfiniteKL: return "AllInfiniteKL";
    case ErrorKind::EmptyBlock: return "EmptyBlock";
    case ErrorKind::InvalidCover: return "InvalidCover";
    case ErrorKind::NotAPartition: return "NotAPartition";
    case ErrorKind::ParameterDomain: return "ParameterDomain";
    case ErrorKind::ProductSpaceTooLarge: return "ProductSpaceTooLarge";
    case ErrorKind::ConfigInfeasible: return "ConfigInfeasible";
    case ErrorKind::Parse: return "Parse";
    case ErrorKind::Io: return "Io";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& what)
    : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

}  // namespace icm
