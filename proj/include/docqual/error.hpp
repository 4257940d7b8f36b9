#pragma once

#include <stdexcept>
#include <string>

namespace docqual {

// Base class for all errors surfaced to the CLI (mapped to exit code 1).
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Bad configuration: missing files, invalid values, dimension mismatches.
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& msg) : Error(msg) {}
};

// Dataset construction failure, carries the offending document id.
class IngestError : public Error {
 public:
  IngestError(const std::string& doc_id, const std::string& msg)
      : Error("ingest error [" + doc_id + "]: " + msg), doc_id_(doc_id) {}
  const std::string& doc_id() const { return doc_id_; }

 private:
  std::string doc_id_;
};

// Transient renderer failure; batch drivers may retry.
class RetryableError : public Error {
 public:
  RetryableError(const std::string& doc_id, const std::string& msg)
      : Error("renderer error [" + doc_id + "]: " + msg), doc_id_(doc_id) {}
  const std::string& doc_id() const { return doc_id_; }

 private:
  std::string doc_id_;
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& msg) : Error(msg) {}
};

// Training run aborted (e.g. non-finite loss). multi-run marks these failed.
class TrainAbort : public Error {
 public:
  explicit TrainAbort(const std::string& msg) : Error(msg) {}
};

}  // namespace docqual
