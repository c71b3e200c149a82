#pragma once

#include <stdexcept>
#include <string>

namespace tavc {

// Invalid argument to an operation (alpha outside (0,1), l > n, ...).
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// NaN or infinity offered to a streaming update. The state is left untouched.
class NonFiniteInput : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// An estimate was requested before any observation arrived.
class NoDataError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// sigma_hat == 0 where a division by it is required.
class DegenerateVariance : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Constant series handed to the block-length selector.
class DegenerateSeries : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Block-length selection produced a non-positive or non-finite bandwidth.
class TuningFailed : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Integer bookkeeping (v_n, q_n) would exceed 64 bits.
class CounterOverflow : public std::overflow_error {
 public:
  using std::overflow_error::overflow_error;
};

}  // namespace tavc
