#pragma once

#include <stdexcept>
#include <string>

namespace esoform {

/// Base of every error raised by the toolkit. `kind()` is the stable,
/// machine-readable class name printed by the CLI.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  [[nodiscard]] virtual const char* kind() const noexcept = 0;
};

#define ESOFORM_DEFINE_ERROR(Name)                                   \
  class Name : public Error {                                        \
   public:                                                           \
    using Error::Error;                                              \
    [[nodiscard]] const char* kind() const noexcept override {       \
      return #Name;                                                  \
    }                                                                \
  };

// Topology violates the spanning-tree hypothesis (zero eigenvalue not simple).
ESOFORM_DEFINE_ERROR(NoSpanningTree)
ESOFORM_DEFINE_ERROR(NotPositiveDefinite)
ESOFORM_DEFINE_ERROR(InvalidLambda2)
ESOFORM_DEFINE_ERROR(NotHurwitz)
// Formation feasibility condition failed; the design algorithm stops.
ESOFORM_DEFINE_ERROR(Infeasible)
ESOFORM_DEFINE_ERROR(NonFiniteState)
ESOFORM_DEFINE_ERROR(ConfigError)
ESOFORM_DEFINE_ERROR(FormatError)
ESOFORM_DEFINE_ERROR(InvalidArgument)

#undef ESOFORM_DEFINE_ERROR

}  // namespace esoform
