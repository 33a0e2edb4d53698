#pragma once

#include <stdexcept>
#include <string>

namespace grinder {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define GRINDER_DECLARE_ERROR(Name) \
  class Name : public Error {       \
   public:                          \
    using Error::Error;             \
  }

GRINDER_DECLARE_ERROR(InvalidHalfspace);
GRINDER_DECLARE_ERROR(UnsupportedDimension);
GRINDER_DECLARE_ERROR(SamplingFailure);
GRINDER_DECLARE_ERROR(EmptyRegion);
GRINDER_DECLARE_ERROR(NumericalUnderflow);
GRINDER_DECLARE_ERROR(OracleInconsistency);
GRINDER_DECLARE_ERROR(InvalidTarget);
GRINDER_DECLARE_ERROR(ConfigError);
GRINDER_DECLARE_ERROR(StreamExhausted);
GRINDER_DECLARE_ERROR(BudgetExceeded);
GRINDER_DECLARE_ERROR(UnknownSuite);
GRINDER_DECLARE_ERROR(IoError);

#undef GRINDER_DECLARE_ERROR

}  // namespace grinder
