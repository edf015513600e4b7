#pragma once

#include <stdexcept>
#include <string>

namespace tsgrasp {

// Shape parameter or probability outside its domain.
class ParameterDomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class IndexError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

class EmptyArmSetError : public std::invalid_argument {
 public:
  EmptyArmSetError() : std::invalid_argument("arm set is empty") {}
  using std::invalid_argument::invalid_argument;
};

// Vectors that must be aligned have different lengths.
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A ranking with every pair tied, for which Kendall's tau is undefined.
class DegenerateRankingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Synthetic environment could not be produced (all-zero truth, retries exhausted).
class GenerationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class CalibrationError : public std::runtime_error {
 public:
  CalibrationError(const std::string& what, double closest)
      : std::runtime_error(what), closest_mismatch_(closest) {}
  double closest_mismatch() const noexcept { return closest_mismatch_; }

 private:
  double closest_mismatch_;
};

class EmptyAggregationError : public std::invalid_argument {
 public:
  EmptyAggregationError() : std::invalid_argument("no records to aggregate") {}
};

}  // namespace tsgrasp
