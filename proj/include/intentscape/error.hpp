#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace intentscape {

// Base class for every error raised by the engine.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A single malformed input record. `row` is 1-based and counts the header
// line for CSV inputs.
class RecordError : public Error {
 public:
  RecordError(std::size_t row, const std::string& what)
      : Error("row " + std::to_string(row) + ": " + what), row_(row) {}
  std::size_t row() const { return row_; }

 private:
  std::size_t row_;
};

// Corpus-level inconsistency (duplicate turns, gaps, missing customer turn).
class CorpusError : public Error {
 public:
  using Error::Error;
};

// Backend transport failure. Retrying the same request may succeed.
class TransportError : public Error {
 public:
  using Error::Error;
};

// Backend output that does not agree with the data it was computed from.
class IntegrityError : public Error {
 public:
  IntegrityError(std::string dialogue_id, int rank, const std::string& what)
      : Error("dialogue " + dialogue_id + " rank " + std::to_string(rank) + ": " + what),
        dialogue_id_(std::move(dialogue_id)),
        rank_(rank) {}
  const std::string& dialogue_id() const { return dialogue_id_; }
  int rank() const { return rank_; }

 private:
  std::string dialogue_id_;
  int rank_;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

// Mathematical precondition violated (zero vector, empty scheme, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Rejected intent-mapping operation. `position` indexes the merge log.
class MappingError : public Error {
 public:
  MappingError(std::size_t position, const std::string& what)
      : Error("mapping op " + std::to_string(position) + ": " + what), position_(position) {}
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

// Volumes requested while live clusters have no intent assigned.
class UnmappedClusterError : public Error {
 public:
  explicit UnmappedClusterError(std::vector<int> ids)
      : Error(describe(ids)), ids_(std::move(ids)) {}
  const std::vector<int>& ids() const { return ids_; }

 private:
  static std::string describe(const std::vector<int>& ids) {
    std::string s = "unmapped clusters:";
    for (int id : ids) s += " " + std::to_string(id);
    return s;
  }
  std::vector<int> ids_;
};

// A required artifact is absent from the work directory.
class MissingArtifactError : public Error {
 public:
  explicit MissingArtifactError(std::string path)
      : Error("missing artifact: " + path), path_(std::move(path)) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

// An artifact no longer matches the hash recorded by the stage that made or
// consumed it.
class StaleArtifactError : public Error {
 public:
  using Error::Error;
};

}  // namespace intentscape
