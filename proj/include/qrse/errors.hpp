#pragma once

#include <stdexcept>
#include <string>

namespace qrse {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Probability vectors
struct NegativeEntry : Error {
  using Error::Error;
};
struct NotNormalized : Error {
  using Error::Error;
};

// Actions and utilities
struct UnknownAction : Error {
  using Error::Error;
};

// Decision functions
struct DegeneratePrior : Error {
  using Error::Error;
};
struct ZeroPriorEntry : Error {
  using Error::Error;
};
struct AbsoluteContinuityViolation : Error {
  using Error::Error;
};
struct UnreachableUtility : Error {
  using Error::Error;
};
struct NonBinaryActionSet : Error {
  using Error::Error;
};

// Equilibrium densities
struct SupportTruncated : Error {
  using Error::Error;
};
struct NullAction : Error {
  using Error::Error;
};

// Prior schedules
struct MissingHistory : Error {
  using Error::Error;
};
struct AdaptiveWithoutObservations : Error {
  using Error::Error;
};

// Fitting
struct TooFewSamples : Error {
  using Error::Error;
};
struct NoFiniteObjective : Error {
  using Error::Error;
};

// Ingestion and IO
struct UnsortedTermWindows : Error {
  using Error::Error;
};
struct ParseError : Error {
  using Error::Error;
};
struct InputNotFound : Error {
  using Error::Error;
};

}  // namespace qrse
