#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace netspec {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class SingularMatrixError : public Error {
 public:
  SingularMatrixError(const std::string& what, std::size_t rank)
      : Error(what), rank_(rank) {}
  std::size_t rank() const { return rank_; }

 private:
  std::size_t rank_;
};

class GraphError : public Error {
 public:
  using Error::Error;
};

class GenerationError : public Error {
 public:
  using Error::Error;
};

class RootFindingError : public Error {
 public:
  RootFindingError(const std::string& what, std::vector<double> residuals)
      : Error(what), residuals_(std::move(residuals)) {}
  const std::vector<double>& residuals() const { return residuals_; }

 private:
  std::vector<double> residuals_;
};

/// Raised when the discrete flow lets V grow, which the continuous flow
/// never does; the remedy is a smaller integrator step.
class StepSizeError : public Error {
 public:
  StepSizeError(const std::string& what, double time)
      : Error(what), time_(time) {}
  double time() const { return time_; }

 private:
  double time_;
};

class DivergenceError : public Error {
 public:
  DivergenceError(const std::string& what, double time)
      : Error(what), time_(time) {}
  double time() const { return time_; }

 private:
  double time_;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace netspec
