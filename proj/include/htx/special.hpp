#pragma once

#include <limits>

namespace htx {

// log Gamma(x), x > 0 enforced.
double lgamma_pos(double x);

// Gamma(x) for x > 0.
double gamma_pos(double x);

// Euler Beta B(a,b), a,b > 0, computed through log Gamma.
double beta_fn(double a, double b);

// Streaming log-sum-exp accumulator: log(sum exp(t_i)) without overflow.
class LogSum {
 public:
  void add(double log_term);
  double log_value() const;  // -inf when empty
  double value() const;      // exp(log_value()), may overflow to +inf
 private:
  double max_ = -std::numeric_limits<double>::infinity();
  double acc_ = 0.0;  // sum of exp(t_i - max_)
};

}  // namespace htx
