#pragma once

#include <stdexcept>
#include <string>

namespace randinfo {

struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

#define RANDINFO_DEFINE_ERROR(Name)                                 \
    struct Name : Error {                                           \
        explicit Name(const std::string& msg) : Error(msg) {}       \
    }

RANDINFO_DEFINE_ERROR(DimensionMismatch);
RANDINFO_DEFINE_ERROR(HoleTooLarge);
RANDINFO_DEFINE_ERROR(GridTooLarge);
RANDINFO_DEFINE_ERROR(SinglePoint);
RANDINFO_DEFINE_ERROR(Overflow);
RANDINFO_DEFINE_ERROR(PointCountMismatch);
RANDINFO_DEFINE_ERROR(NearSingular);
RANDINFO_DEFINE_ERROR(NumericalFailure);
RANDINFO_DEFINE_ERROR(DimensionTooLarge);
RANDINFO_DEFINE_ERROR(ZeroNormal);
RANDINFO_DEFINE_ERROR(UnsupportedKind);
RANDINFO_DEFINE_ERROR(NonConvex);
RANDINFO_DEFINE_ERROR(ParameterOutOfRange);
RANDINFO_DEFINE_ERROR(UnsupportedRegime);
RANDINFO_DEFINE_ERROR(EmptyKernel);
RANDINFO_DEFINE_ERROR(Infeasible);
RANDINFO_DEFINE_ERROR(TooManySubsets);
RANDINFO_DEFINE_ERROR(NotEnoughPoints);
RANDINFO_DEFINE_ERROR(SingularMoments);
RANDINFO_DEFINE_ERROR(ZeroSum);
RANDINFO_DEFINE_ERROR(ConfigError);
RANDINFO_DEFINE_ERROR(DegenerateInput);

#undef RANDINFO_DEFINE_ERROR

}  // namespace randinfo
