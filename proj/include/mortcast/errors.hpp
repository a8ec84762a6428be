#pragma once

#include <stdexcept>
#include <string>

namespace mortcast {

// Bad or inconsistent input data. The CLI maps these to exit code 2.
class DataError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Numerical breakdown during fitting or forecasting. The CLI maps these to
// exit code 3.
class NumericalError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class ParseError : public DataError {
public:
  ParseError(const std::string& file, std::size_t line, const std::string& what)
      : DataError(file + ":" + std::to_string(line) + ": " + what),
        file_(file), line_(line) {}

  const std::string& file() const noexcept { return file_; }
  std::size_t line() const noexcept { return line_; }

private:
  std::string file_;
  std::size_t line_;
};

class ZeroCountError : public DataError {
public:
  ZeroCountError(int year, int age)
      : DataError("nonpositive death count at year " + std::to_string(year) +
                  ", age " + std::to_string(age) +
                  "; rebuild death counts from qx before the clr transform"),
        year_(year), age_(age) {}

  int year() const noexcept { return year_; }
  int age() const noexcept { return age_; }

private:
  int year_;
  int age_;
};

class InsufficientHistoryError : public DataError {
public:
  using DataError::DataError;
};

class HorizonExceededError : public DataError {
public:
  using DataError::DataError;
};

class ContractBoundError : public DataError {
public:
  using DataError::DataError;
};

class DegenerateCovarianceError : public NumericalError {
public:
  using NumericalError::NumericalError;
};

class ZeroVarianceError : public NumericalError {
public:
  explicit ZeroVarianceError(int age)
      : NumericalError("zero standard deviation at age index " +
                       std::to_string(age)),
        age_(age) {}

  int age() const noexcept { return age_; }

private:
  int age_;
};

class FitFailureError : public NumericalError {
public:
  using NumericalError::NumericalError;
};

class DivergentForecastError : public NumericalError {
public:
  using NumericalError::NumericalError;
};

}  // namespace mortcast
