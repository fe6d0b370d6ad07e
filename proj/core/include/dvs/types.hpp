#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <utility>
#include <vector>

namespace dvs {

// Error taxonomy. Shape/config errors are bad arguments; data errors are
// invalid input files or responses; aggregation errors come from the
// cluster protocol; numerical errors abort an optimizer run.
class ShapeError : public std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
class ConfigError : public std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
class DataError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};
class AggregationError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};
class NumericalError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};
class IoError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Dense length-p coefficient vector. The support is recomputed from the
// values on every call so it can never go stale.
class CoefVector {
 public:
  CoefVector() = default;
  explicit CoefVector(Eigen::VectorXd values) : values_(std::move(values)) {}

  static CoefVector zeros(int p) {
    return CoefVector(Eigen::VectorXd::Zero(p));
  }

  int size() const { return static_cast<int>(values_.size()); }
  const Eigen::VectorXd& values() const { return values_; }
  Eigen::VectorXd& values() { return values_; }
  double operator[](int j) const { return values_[j]; }

  std::vector<int> support() const {
    std::vector<int> s;
    for (int j = 0; j < size(); ++j) {
      if (values_[j] != 0.0) s.push_back(j);
    }
    return s;
  }

  int nnz() const {
    int c = 0;
    for (int j = 0; j < size(); ++j) c += values_[j] != 0.0;
    return c;
  }

 private:
  Eigen::VectorXd values_;
};

}  // namespace dvs
