#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace geoagent {

// Base of every error thrown by the library. Tool dispatch converts all of
// these into observation strings; nothing below ever escapes the tool layer.
struct Error : std::runtime_error {
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

struct IoError : Error {
  using Error::Error;
};

struct FileNotFound : IoError {
  using IoError::IoError;
};

// Parse failure in one of the on-disk formats. `offset` is the byte offset
// of the first unreadable content when known.
struct FormatError : Error {
  std::size_t offset = 0;
  explicit FormatError(const std::string& what, std::size_t off = 0)
      : Error(what), offset(off) {}
};

struct GeometryError : Error {
  using Error::Error;
};

struct NonPositiveDistance : GeometryError {
  using GeometryError::GeometryError;
};

struct EmptyInput : GeometryError {
  using GeometryError::GeometryError;
};

struct DimensionMismatch : GeometryError {
  using GeometryError::GeometryError;
};

// Clip boundary must have geometric dimension >= the global dataset and be
// at least a line; violations surface as the generic exception observation.
struct DimensionRuleViolation : GeometryError {
  using GeometryError::GeometryError;
};

struct GridError : Error {
  using Error::Error;
};

struct EmptyOverlap : GridError {
  using GridError::GridError;
};

struct TooFewDistinctPixels : GridError {
  using GridError::GridError;
};

struct NotLabelRaster : GridError {
  using GridError::GridError;
};

struct GridMismatch : GridError {
  using GridError::GridError;
};

struct NotVector : Error {
  using Error::Error;
};

struct MissingFixture : Error {
  std::string name;
  explicit MissingFixture(const std::string& fixture_name)
      : Error("missing fixture: " + fixture_name), name(fixture_name) {}
};

struct ProviderError : Error {
  using Error::Error;
};

struct BackendError : Error {
  using Error::Error;
};

struct ConfigError : Error {
  using Error::Error;
};

}  // namespace geoagent
