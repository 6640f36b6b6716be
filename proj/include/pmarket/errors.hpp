#pragma once

#include <stdexcept>
#include <string>

namespace pmarket {

/// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Conditioning event has zero probability under the table.
class ZeroProbabilityEvent : public Error {
 public:
  using Error::Error;
};

class RealizationOutsidePublicEvent : public Error {
 public:
  using Error::Error;
};

/// The conditioning statistics are linearly dependent with inconsistent
/// realized values, or their covariance is numerically singular.
class SingularConditioningSet : public Error {
 public:
  using Error::Error;
};

class MaxRoundsExceeded : public Error {
 public:
  using Error::Error;
};

class DatasetShapeMismatch : public Error {
 public:
  using Error::Error;
};

class NonNumericCell : public Error {
 public:
  using Error::Error;
};

class DatasetUnavailable : public Error {
 public:
  using Error::Error;
};

/// A sufficient statistic that the limited-consensus model cannot use
/// (|x1| = 0).
class DegenerateStatistic : public Error {
 public:
  using Error::Error;
};

/// Forecasts of different kinds were compared.
class KindMismatch : public Error {
 public:
  using Error::Error;
};

/// Invalid model or argument supplied by the caller.
class InvalidModel : public Error {
 public:
  using Error::Error;
};

}  // namespace pmarket
