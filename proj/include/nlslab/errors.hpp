#ifndef NLSLAB_ERRORS_HPP
#define NLSLAB_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace nlslab {

struct Error : std::runtime_error {
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

#define NLSLAB_DEFINE_ERROR(Name)                                  \
  struct Name : Error {                                            \
    explicit Name(const std::string& what) : Error(#Name ": " + what) {} \
  }

NLSLAB_DEFINE_ERROR(NoRoot);
NLSLAB_DEFINE_ERROR(DegenerateRoot);
NLSLAB_DEFINE_ERROR(ProfileBlowup);
NLSLAB_DEFINE_ERROR(TailUnresolved);
NLSLAB_DEFINE_ERROR(WrapAround);
NLSLAB_DEFINE_ERROR(GridMismatch);
NLSLAB_DEFINE_ERROR(SingularGram);
NLSLAB_DEFINE_ERROR(NotOrthogonal);
NLSLAB_DEFINE_ERROR(NoConvergence);
NLSLAB_DEFINE_ERROR(NotOdd);
NLSLAB_DEFINE_ERROR(NonFinite);
NLSLAB_DEFINE_ERROR(FitLost);
NLSLAB_DEFINE_ERROR(SingularJacobian);
NLSLAB_DEFINE_ERROR(InsufficientSamples);
NLSLAB_DEFINE_ERROR(CrossCheckFailed);
NLSLAB_DEFINE_ERROR(NoImprovement);
NLSLAB_DEFINE_ERROR(ConfigError);

#undef NLSLAB_DEFINE_ERROR

}  // namespace nlslab

#endif
