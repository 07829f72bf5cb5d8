#pragma once

#include <functional>
#include <optional>

#include "adaptfv/errors.hpp"

namespace adaptfv::test
{

// Code of the Error thrown by f, or empty when nothing is thrown.
inline std::optional<ErrorCode> error_code(const std::function<void()> &f)
{
  try
  {
    f();
  }
  catch (const Error &e)
  {
    return e.code();
  }
  return std::nullopt;
}

}  // namespace adaptfv::test
