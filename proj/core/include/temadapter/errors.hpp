#pragma once

#include <stdexcept>
#include <string>

namespace temadapter {

/// Base class for every error raised by the library. The category decides
/// the CLI exit code (see tools/temadapter.cpp).
class Error : public std::runtime_error {
 public:
  enum class Category { kData, kConfig, kNumeric };

  Error(Category category, const std::string& what)
      : std::runtime_error(what), category_(category) {}

  Category category() const noexcept { return category_; }

 private:
  Category category_;
};

/// A caller broke a documented precondition (shape mismatch, empty input).
class ContractError : public Error {
 public:
  explicit ContractError(const std::string& what) : Error(Category::kData, what) {}
};

/// Input data is unusable: bad records, non-finite embeddings, empty splits.
class DataError : public Error {
 public:
  explicit DataError(const std::string& what) : Error(Category::kData, what) {}
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(Category::kConfig, what) {}
};

/// NaN/Inf produced during a forward or backward pass.
class NumericError : public Error {
 public:
  explicit NumericError(const std::string& what) : Error(Category::kNumeric, what) {}
};

/// The requested embedding backend is unknown or not available in this build.
class BackendError : public Error {
 public:
  explicit BackendError(const std::string& what) : Error(Category::kData, what) {}
};

class NotFoundError : public Error {
 public:
  explicit NotFoundError(const std::string& key)
      : Error(Category::kData, "key not found: " + key), key_(key) {}
  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

class CorruptionError : public Error {
 public:
  CorruptionError(const std::string& key, const std::string& detail)
      : Error(Category::kData, "corrupt record '" + key + "': " + detail), key_(key) {}
  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

/// Checkpoint was produced by a different architecture than the config asks for.
class IncompatibleCheckpointError : public Error {
 public:
  explicit IncompatibleCheckpointError(const std::string& what)
      : Error(Category::kConfig, what) {}
};

}  // namespace temadapter
