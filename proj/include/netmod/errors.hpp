#pragma once

#include <stdexcept>
#include <string>

namespace netmod {

class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

#define NETMOD_DEFINE_ERROR(NAME)                                   \
  class NAME : public Error {                                       \
   public:                                                          \
    explicit NAME(const std::string& msg) : Error(#NAME ": " + msg) {} \
  }

NETMOD_DEFINE_ERROR(ParseError);
NETMOD_DEFINE_ERROR(AsymmetryError);
NETMOD_DEFINE_ERROR(NegativeWeightError);
NETMOD_DEFINE_ERROR(DiagonalError);
NETMOD_DEFINE_ERROR(NonBinaryError);
NETMOD_DEFINE_ERROR(IndexError);
NETMOD_DEFINE_ERROR(SemanticsError);
NETMOD_DEFINE_ERROR(DimensionMismatchError);
NETMOD_DEFINE_ERROR(ZeroTargetError);
NETMOD_DEFINE_ERROR(MissingCovariateError);
NETMOD_DEFINE_ERROR(ArityMismatchError);
NETMOD_DEFINE_ERROR(SeparationError);
NETMOD_DEFINE_ERROR(RankDeficiencyError);
NETMOD_DEFINE_ERROR(PermutationFailureError);
NETMOD_DEFINE_ERROR(ModeMismatchError);
NETMOD_DEFINE_ERROR(NonConvergenceError);
NETMOD_DEFINE_ERROR(FeasibilityError);
NETMOD_DEFINE_ERROR(UnsupportedChangeError);
NETMOD_DEFINE_ERROR(ShapeMismatchError);
NETMOD_DEFINE_ERROR(DegenerateBaselineError);
NETMOD_DEFINE_ERROR(ValidationError);

#undef NETMOD_DEFINE_ERROR

}  // namespace netmod
