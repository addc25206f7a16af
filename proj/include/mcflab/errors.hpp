#pragma once

#include <stdexcept>
#include <string>

namespace mcflab {

// Base class for everything this library throws on contract violations.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

#define MCFLAB_DEFINE_ERROR(Name)                                  \
    struct Name : Error {                                          \
        explicit Name(const std::string& msg)                      \
            : Error(std::string(#Name) + ": " + msg) {}            \
    }

MCFLAB_DEFINE_ERROR(ValidationError);
MCFLAB_DEFINE_ERROR(ParseError);
MCFLAB_DEFINE_ERROR(DomainOutsideChart);
MCFLAB_DEFINE_ERROR(EmptyRegion);
MCFLAB_DEFINE_ERROR(EmptyOffsetRegion);
MCFLAB_DEFINE_ERROR(NoBandNodes);
MCFLAB_DEFINE_ERROR(MissingBoundaryClass);
MCFLAB_DEFINE_ERROR(SolverDiverged);
MCFLAB_DEFINE_ERROR(NoRegularValue);
MCFLAB_DEFINE_ERROR(ContainmentViolated);
MCFLAB_DEFINE_ERROR(CflViolated);
MCFLAB_DEFINE_ERROR(LambdaNotBelowRicciBound);
MCFLAB_DEFINE_ERROR(TimeGridMismatch);
MCFLAB_DEFINE_ERROR(ZeroInitialDistance);
MCFLAB_DEFINE_ERROR(InterfaceNearBoundary);
MCFLAB_DEFINE_ERROR(UnsupportedKind);
MCFLAB_DEFINE_ERROR(IoError);

#undef MCFLAB_DEFINE_ERROR

}  // namespace mcflab
