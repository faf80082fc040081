#pragma once

#include <stdexcept>
#include <string>

namespace oip {

/// Base for everything the harness throws on purpose.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad flags / malformed invocation. Mapped to exit code 1 by the CLI.
class UsageError : public Error {
 public:
  using Error::Error;
};

/// Data or validation problems. Mapped to exit code 2 by the CLI.
class DataError : public Error {
 public:
  using Error::Error;
};

/// Provider (network/auth) failures. Mapped to exit code 3 by the CLI.
class ProviderError : public Error {
 public:
  using Error::Error;
};

#define OIP_DEFINE_DATA_ERROR(Name)  \
  class Name : public DataError {    \
   public:                           \
    using DataError::DataError;      \
  }

OIP_DEFINE_DATA_ERROR(MissingFile);
OIP_DEFINE_DATA_ERROR(SchemaViolation);
OIP_DEFINE_DATA_ERROR(CategoryCountMismatch);
OIP_DEFINE_DATA_ERROR(DuplicateItem);
OIP_DEFINE_DATA_ERROR(EmptyCell);
OIP_DEFINE_DATA_ERROR(RankDeficientDesign);
OIP_DEFINE_DATA_ERROR(ManifestMismatch);
OIP_DEFINE_DATA_ERROR(IncompleteArtifact);
OIP_DEFINE_DATA_ERROR(ModeMissing);
OIP_DEFINE_DATA_ERROR(DegenerateInput);
OIP_DEFINE_DATA_ERROR(SingularHypothesis);
OIP_DEFINE_DATA_ERROR(OverlappingGroups);
OIP_DEFINE_DATA_ERROR(InestimableCombination);
OIP_DEFINE_DATA_ERROR(UnsupportedFormat);
OIP_DEFINE_DATA_ERROR(NonConvergence);
OIP_DEFINE_DATA_ERROR(ConfigError);

#undef OIP_DEFINE_DATA_ERROR

class TransportError : public ProviderError {
 public:
  using ProviderError::ProviderError;
};

class AuthError : public ProviderError {
 public:
  using ProviderError::ProviderError;
};

class RateLimitedError : public ProviderError {
 public:
  using ProviderError::ProviderError;
};

}  // namespace oip
