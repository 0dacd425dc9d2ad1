#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <stdexcept>
#include <string>

namespace agmmn {

/// Samples are stored one observation per row.
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Shapes or sizes that do not fit together.
class DimensionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// NaN/Inf encountered where a finite value is required.
class NumericFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Data that cannot support the requested computation (all-equal samples,
/// zero pairwise distances, no tail exceedances, ...).
class DegenerateData : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Combination of inputs the library deliberately does not support.
class Unsupported : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace agmmn
