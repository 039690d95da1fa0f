#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace subpop {

// Broad failure classes; the CLI maps each to a distinct exit code.
enum class ErrorCategory {
  kParse,
  kData,
  kNumeric,
  kConfig,
  kIo,
  kIndex,
};

const char* category_name(ErrorCategory category);
int exit_code(ErrorCategory category);

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& what)
      : std::runtime_error(what), category_(category) {}
  ErrorCategory category() const { return category_; }

 private:
  ErrorCategory category_;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t row, const std::string& reason)
      : Error(ErrorCategory::kParse,
              "parse error at row " + std::to_string(row) + ": " + reason),
        row_(row) {}
  std::size_t row() const { return row_; }

 private:
  std::size_t row_;
};

class EmptyLog : public Error {
 public:
  explicit EmptyLog(const std::string& what = "event log contains no events")
      : Error(ErrorCategory::kData, what) {}
};

class DegenerateSplit : public Error {
 public:
  explicit DegenerateSplit(const std::string& what)
      : Error(ErrorCategory::kData, what) {}
};

class ConvergenceFailure : public Error {
 public:
  explicit ConvergenceFailure(int max_iter)
      : Error(ErrorCategory::kNumeric,
              "truncated SVD did not converge within " +
                  std::to_string(max_iter) + " iterations"),
        max_iter_(max_iter) {}
  int max_iter() const { return max_iter_; }

 private:
  int max_iter_;
};

class RankTooLarge : public Error {
 public:
  explicit RankTooLarge(const std::string& what)
      : Error(ErrorCategory::kConfig, what) {}
};

class IndexOutOfRange : public Error {
 public:
  explicit IndexOutOfRange(const std::string& what)
      : Error(ErrorCategory::kIndex, what) {}
};

class DimensionMismatch : public Error {
 public:
  explicit DimensionMismatch(const std::string& what)
      : Error(ErrorCategory::kConfig, what) {}
};

class MissingUser : public Error {
 public:
  explicit MissingUser(const std::string& user_id)
      : Error(ErrorCategory::kData, "no logits for user '" + user_id + "'"),
        user_id_(user_id) {}
  const std::string& user_id() const { return user_id_; }

 private:
  std::string user_id_;
};

class NonFiniteScore : public Error {
 public:
  explicit NonFiniteScore(std::size_t row)
      : Error(ErrorCategory::kParse,
              "non-finite score at row " + std::to_string(row)),
        row_(row) {}
  std::size_t row() const { return row_; }

 private:
  std::size_t row_;
};

class WeightViolation : public Error {
 public:
  explicit WeightViolation(const std::string& what)
      : Error(ErrorCategory::kConfig, what) {}
};

class DuplicateInRecs : public Error {
 public:
  explicit DuplicateInRecs(std::size_t item)
      : Error(ErrorCategory::kData,
              "item " + std::to_string(item) +
                  " appears more than once in a recommendation list") {}
};

class EmptyHistory : public Error {
 public:
  EmptyHistory()
      : Error(ErrorCategory::kData,
              "novelty is undefined for a user without train history") {}
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what)
      : Error(ErrorCategory::kConfig, what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorCategory::kIo, what) {}
};

}  // namespace subpop
