#pragma once
#include <stdexcept>
#include <string>

namespace semiwell {

// Base for all library errors; `stage` names the failing operation so the CLI
// can report it on stderr before exiting with the numerical-failure code.
struct Error : std::runtime_error {
  std::string stage;
  Error(std::string st, const std::string& msg)
      : std::runtime_error(st + ": " + msg), stage(std::move(st)) {}
};

// Configuration / input validation problems (CLI exit code 2).
struct ConfigError : Error {
  using Error::Error;
};

// Numerical failures (CLI exit code 3).
struct NumericalError : Error {
  using Error::Error;
};

#define SEMIWELL_CONFIG_ERROR(name)                       \
  struct name : ConfigError {                             \
    explicit name(const std::string& msg)                 \
        : ConfigError(#name, msg) {}                      \
  }
#define SEMIWELL_NUMERICAL_ERROR(name)                    \
  struct name : NumericalError {                          \
    explicit name(const std::string& msg)                 \
        : NumericalError(#name, msg) {}                   \
  }

SEMIWELL_CONFIG_ERROR(NegativePotential);
SEMIWELL_CONFIG_ERROR(BadShape);
SEMIWELL_CONFIG_ERROR(EmptySiteSet);
SEMIWELL_CONFIG_ERROR(EmptySource);
SEMIWELL_CONFIG_ERROR(EmptyCore);
SEMIWELL_CONFIG_ERROR(BandTooNarrow);
SEMIWELL_CONFIG_ERROR(NotNormalized);
SEMIWELL_CONFIG_ERROR(TooLarge);
SEMIWELL_CONFIG_ERROR(DimensionMismatch);
SEMIWELL_CONFIG_ERROR(TooFewPoints);
SEMIWELL_CONFIG_ERROR(DimTooLarge);
SEMIWELL_CONFIG_ERROR(SubspaceNotLocal);
SEMIWELL_CONFIG_ERROR(FrameMismatch);

SEMIWELL_NUMERICAL_ERROR(NoWells);
SEMIWELL_NUMERICAL_ERROR(ConvergenceFailure);
SEMIWELL_NUMERICAL_ERROR(FactorizationSingular);
SEMIWELL_NUMERICAL_ERROR(NearSingular);
SEMIWELL_NUMERICAL_ERROR(NotInGap);
SEMIWELL_NUMERICAL_ERROR(QuadratureNotConverged);
SEMIWELL_NUMERICAL_ERROR(SpectralCollision);
SEMIWELL_NUMERICAL_ERROR(EmptyWellSpectrum);
SEMIWELL_NUMERICAL_ERROR(ProjectionsTooFar);
SEMIWELL_NUMERICAL_ERROR(GramSingular);
SEMIWELL_NUMERICAL_ERROR(AllBelowFloor);

#undef SEMIWELL_CONFIG_ERROR
#undef SEMIWELL_NUMERICAL_ERROR

}  // namespace semiwell
