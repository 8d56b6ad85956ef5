#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace ubi {

// Base class for every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad user input: unreadable files, invalid records, out-of-range arguments.
class InputError : public Error {
 public:
  using Error::Error;
};

// Missing input file or path.
class MissingInputError : public InputError {
 public:
  using InputError::InputError;
};

// Base for failures of the logistic fit. Carries the offending column names
// when they are known.
class FitError : public Error {
 public:
  FitError(const std::string& what, std::vector<std::string> columns = {})
      : Error(what), columns_(std::move(columns)) {}

  const std::vector<std::string>& columns() const noexcept { return columns_; }

 private:
  std::vector<std::string> columns_;
};

// The target has only one class.
class DegenerateLabelsError : public FitError {
 public:
  using FitError::FitError;
};

class SeparationError : public FitError {
 public:
  using FitError::FitError;
};

class CollinearityError : public FitError {
 public:
  using FitError::FitError;
};

}  // namespace ubi
