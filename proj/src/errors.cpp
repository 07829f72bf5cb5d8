#include "adaptfv/errors.hpp"

namespace adaptfv
{

const char *error_name(ErrorCode code)
{
  switch (code)
  {
  case ErrorCode::DegenerateCell: return "DegenerateCell";
  case ErrorCode::NonManifold: return "NonManifold";
  case ErrorCode::NotAdmissible: return "NotAdmissible";
  case ErrorCode::NotStarShaped: return "NotStarShaped";
  case ErrorCode::RefinementLimit: return "RefinementLimit";
  case ErrorCode::InvalidInput: return "InvalidInput";
  case ErrorCode::SingularWeight: return "SingularWeight";
  case ErrorCode::SingularLocalSaddle: return "SingularLocalSaddle";
  case ErrorCode::UnsupportedDegree: return "UnsupportedDegree";
  case ErrorCode::Breakdown: return "Breakdown";
  case ErrorCode::Singular: return "Singular";
  case ErrorCode::MaxIterations: return "MaxIterations";
  case ErrorCode::TensorNotSupported: return "TensorNotSupported";
  case ErrorCode::SingularElementMatrix: return "SingularElementMatrix";
  case ErrorCode::JacobianSingular: return "JacobianSingular";
  case ErrorCode::MissingExtendedIterate: return "MissingExtendedIterate";
  case ErrorCode::MultipliersUnavailable: return "MultipliersUnavailable";
  case ErrorCode::NotEquilibrated: return "NotEquilibrated";
  case ErrorCode::NegativeEstimate: return "NegativeEstimate";
  case ErrorCode::MissingConfig: return "MissingConfig";
  case ErrorCode::ZeroError: return "ZeroError";
  case ErrorCode::UnknownProblem: return "UnknownProblem";
  case ErrorCode::OutsideDomain: return "OutsideDomain";
  case ErrorCode::ParseError: return "ParseError";
  }
  return "Unknown";
}

}  // namespace adaptfv
