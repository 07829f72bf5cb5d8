#pragma once

#include <stdexcept>
#include <string>

namespace adaptfv
{

enum class ErrorCode
{
  DegenerateCell,
  NonManifold,
  NotAdmissible,
  NotStarShaped,
  RefinementLimit,
  InvalidInput,
  SingularWeight,
  SingularLocalSaddle,
  UnsupportedDegree,
  Breakdown,
  Singular,
  MaxIterations,
  TensorNotSupported,
  SingularElementMatrix,
  JacobianSingular,
  MissingExtendedIterate,
  MultipliersUnavailable,
  NotEquilibrated,
  NegativeEstimate,
  MissingConfig,
  ZeroError,
  UnknownProblem,
  OutsideDomain,
  ParseError
};

const char *error_name(ErrorCode code);

class Error : public std::runtime_error
{
public:
  Error(ErrorCode code, const std::string &what)
    : std::runtime_error(std::string(error_name(code)) + ": " + what), code_(code)
  {
  }
  ErrorCode code() const { return code_; }

private:
  ErrorCode code_;
};

}  // namespace adaptfv
