#pragma once

#include <stdexcept>
#include <string>

namespace ogr {

struct MalformedDoi : std::runtime_error {
  explicit MalformedDoi(const std::string& what) : std::runtime_error(what) {}
};

struct MalformedUrl : std::runtime_error {
  explicit MalformedUrl(const std::string& what) : std::runtime_error(what) {}
};

struct EmptyInput : std::runtime_error {
  explicit EmptyInput(const std::string& what) : std::runtime_error(what) {}
};

// Raised by the Error conflict policy when a graph object carries two
// different engagement values for the same article.
struct AmbiguousEngagement : std::runtime_error {
  AmbiguousEngagement(std::string doi_str, const std::string& what)
      : std::runtime_error(what), doi(std::move(doi_str)) {}
  std::string doi;
};

struct InconsistentSpec : std::runtime_error {
  explicit InconsistentSpec(const std::string& what) : std::runtime_error(what) {}
};

struct InsufficientRuns : std::runtime_error {
  explicit InsufficientRuns(const std::string& what) : std::runtime_error(what) {}
};

struct BindFailure : std::runtime_error {
  explicit BindFailure(const std::string& what) : std::runtime_error(what) {}
};

struct JournalError : std::runtime_error {
  explicit JournalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace ogr
