#pragma once

#include <stdexcept>
#include <string>

namespace rovist {

// Base class for every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid hyperparameters, flags or other caller-supplied settings.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// A record in an input file violates its schema. `line` is 1-based, 0 when
// the error is not tied to a line.
class SchemaError : public Error {
 public:
  SchemaError(const std::string& path, std::size_t line, const std::string& field,
              const std::string& message)
      : Error(path + (line ? ":" + std::to_string(line) : std::string()) + ": field '" +
              field + "': " + message),
        line_(line),
        field_(field) {}

  std::size_t line() const { return line_; }
  const std::string& field() const { return field_; }

 private:
  std::size_t line_;
  std::string field_;
};

// Invalid argument to a scoring or formatting operation (e.g. an empty
// sentence).
class InputError : public Error {
 public:
  using Error::Error;
};

// A pluggable backend (tagger, vision extractor, language model) failed.
class BackendError : public Error {
 public:
  using Error::Error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class OutOfVocabularyError : public Error {
 public:
  using Error::Error;
};

// Correlation is undefined for the given sample (zero variance, all ties).
class UndefinedCorrelationError : public Error {
 public:
  using Error::Error;
};

// Non-finite loss or embedding encountered during training or scoring.
class NumericError : public Error {
 public:
  using Error::Error;
};

}  // namespace rovist
