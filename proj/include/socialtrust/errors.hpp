#pragma once

#include <stdexcept>
#include <string>

namespace socialtrust {

// Base class for every recoverable data error raised by this library.
// Callers that only need to distinguish "bad data" from "bug" can catch this.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Document cannot be decoded at all (broken YAML/JSON).
struct ParseError : Error {
  using Error::Error;
};

// Document decodes but violates the schema. Carries the path of the
// offending node, e.g. "partners[0].calls[0].duration".
struct SchemaError : Error {
  SchemaError(std::string node_path, const std::string& reason)
      : Error(node_path + ": " + reason), path(std::move(node_path)) {}
  std::string path;
};

struct EmptyReferencePopulation : Error {
  EmptyReferencePopulation()
      : Error("no partner carries the reference rating level") {}
  using Error::Error;
};

struct UnknownProbability : Error {
  UnknownProbability() : Error("probability not present in quantile table") {}
  using Error::Error;
};

struct NoPartnerSatisfiesRule : Error {
  NoPartnerSatisfiesRule() : Error("no partner satisfies the threshold rule") {}
  using Error::Error;
};

struct NoRatedFavorites : Error {
  NoRatedFavorites() : Error("no favorite partner carries a rating") {}
  using Error::Error;
};

struct DegenerateInput : Error {
  using Error::Error;
};

struct NoRatedPartners : Error {
  NoRatedPartners() : Error("dataset contains no rated partner") {}
  using Error::Error;
};

struct EmptySalt : Error {
  EmptySalt() : Error("session salt must be at least 16 bytes") {}
  using Error::Error;
};

struct InvalidConfig : Error {
  using Error::Error;
};

struct ProtocolTimeout : Error {
  using Error::Error;
};

struct SaltMismatch : Error {
  using Error::Error;
};

}  // namespace socialtrust
