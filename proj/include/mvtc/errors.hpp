#pragma once

#include <stdexcept>
#include <string>

namespace mvtc {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
  virtual const char* kind() const noexcept { return "Error"; }
};

#define MVTC_DEFINE_ERROR(Name)                                      \
  class Name : public Error {                                        \
   public:                                                           \
    explicit Name(const std::string& msg) : Error(msg) {}            \
    const char* kind() const noexcept override { return #Name; }     \
  }

MVTC_DEFINE_ERROR(DimensionError);
MVTC_DEFINE_ERROR(StationarityError);
MVTC_DEFINE_ERROR(CovarianceError);
MVTC_DEFINE_ERROR(ConvergenceError);
MVTC_DEFINE_ERROR(SingularityError);
MVTC_DEFINE_ERROR(DegenerateError);
MVTC_DEFINE_ERROR(LengthError);
MVTC_DEFINE_ERROR(ConditionError);
MVTC_DEFINE_ERROR(DegreesOfFreedomError);
MVTC_DEFINE_ERROR(KeyError);
MVTC_DEFINE_ERROR(IoError);

#undef MVTC_DEFINE_ERROR

}  // namespace mvtc
