#pragma once

#include <stdexcept>
#include <string>

namespace affordkit {

// Base class for all library errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed input data: manifests, predictions, boxes, schema mismatches.
struct DataError : Error {
  using Error::Error;
};

// Bad configuration: unknown keys, missing files, out-of-range values.
struct ConfigError : Error {
  using Error::Error;
};

// CLI misuse (bad flags, unknown strategy names).
struct UsageError : Error {
  using Error::Error;
};

// A label that is empty after trimming.
struct EmptyLabel : DataError {
  using DataError::DataError;
};

// A prompt template left an unresolved placeholder after substitution.
struct TemplateError : ConfigError {
  using ConfigError::ConfigError;
};

// A reply contained no extractable object names.
struct NoObjectsFound : Error {
  using Error::Error;
};

// A reply named none of the catalog's property dimensions.
struct EmptySelection : Error {
  using Error::Error;
};

// Network or auth failure talking to a remote model.
struct BackendUnavailable : Error {
  using Error::Error;
};

// The scripted backend has no entry for a query. Fixture bug; fail loudly.
struct ScriptGap : Error {
  using Error::Error;
};

// Detector asked about an image the manifest does not know.
struct UnknownImage : DataError {
  using DataError::DataError;
};

// Average precision is undefined for a class with no ground truth.
struct NoGroundTruth : Error {
  using Error::Error;
};

// Every class was undefined; there is no mean to take.
struct AllUndefined : DataError {
  using DataError::DataError;
};

// The manifest cannot supply enough distractor images for the requested n.
struct InsufficientDistractors : DataError {
  using DataError::DataError;
};

}  // namespace affordkit
