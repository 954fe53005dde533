#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace yarn {

// Base of every error the library raises on purpose. Precondition violations
// use std::invalid_argument instead.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ExtractionFailed : public Error {
 public:
  ExtractionFailed(std::string story_id, std::string task, const std::string& reason)
      : Error("extraction_failed(" + story_id + ", task=" + task + "): " + reason),
        story_id_(std::move(story_id)),
        task_(std::move(task)) {}

  const std::string& story_id() const noexcept { return story_id_; }
  const std::string& task() const noexcept { return task_; }

 private:
  std::string story_id_;
  std::string task_;
};

class ProviderUnavailable : public Error {
 public:
  explicit ProviderUnavailable(const std::string& what)
      : Error("provider_unavailable: " + what) {}
};

class EmbeddingUnavailable : public Error {
 public:
  explicit EmbeddingUnavailable(const std::string& what)
      : Error("embedding_unavailable: " + what) {}
};

class DegenerateVector : public Error {
 public:
  explicit DegenerateVector(const std::string& what)
      : Error("degenerate_vector: " + what) {}
};

class DimensionError : public Error {
 public:
  DimensionError(std::size_t expected, std::size_t got)
      : Error("dimension_error: expected " + std::to_string(expected) + ", got " +
              std::to_string(got)) {}
};

class ConfigUnsatisfiable : public Error {
 public:
  explicit ConfigUnsatisfiable(std::string layer)
      : Error("config_unsatisfiable(" + layer + ")"), layer_(std::move(layer)) {}
  const std::string& layer() const noexcept { return layer_; }

 private:
  std::string layer_;
};

class InsufficientUnits : public Error {
 public:
  explicit InsufficientUnits(std::size_t n)
      : Error("insufficient_units: view has " + std::to_string(n) + " element(s)") {}
};

class PredictionFailed : public Error {
 public:
  explicit PredictionFailed(const std::string& what) : Error("prediction_failed: " + what) {}
};

class DatasetError : public Error {
 public:
  DatasetError(std::size_t line, std::string reason)
      : Error("dataset_error(line " + std::to_string(line) + "): " + reason),
        line_(line),
        reason_(std::move(reason)) {}
  std::size_t line() const noexcept { return line_; }
  const std::string& reason() const noexcept { return reason_; }

 private:
  std::size_t line_;
  std::string reason_;
};

class ReportError : public Error {
 public:
  explicit ReportError(const std::string& what) : Error("report_error: " + what) {}
};

class NotFound : public Error {
 public:
  explicit NotFound(const std::string& what) : Error("not_found: " + what) {}
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error("config_error: " + what) {}
};

}  // namespace yarn
