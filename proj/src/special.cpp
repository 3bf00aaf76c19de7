#include "htx/special.hpp"

#include <cmath>
#include <stdexcept>

namespace htx {

double lgamma_pos(double x) {
  if (!(x > 0.0)) throw std::domain_error("lgamma_pos: argument must be positive");
  return std::lgamma(x);
}

double gamma_pos(double x) {
  if (!(x > 0.0)) throw std::domain_error("gamma_pos: argument must be positive");
  return std::tgamma(x);
}

double beta_fn(double a, double b) {
  return std::exp(lgamma_pos(a) + lgamma_pos(b) - lgamma_pos(a + b));
}

void LogSum::add(double log_term) {
  if (std::isinf(log_term) && log_term < 0) return;  // adding zero
  if (log_term <= max_) {
    acc_ += std::exp(log_term - max_);
    return;
  }
  // rescale the accumulator to the new maximum
  acc_ = acc_ * std::exp(max_ - log_term) + 1.0;
  max_ = log_term;
}

double LogSum::log_value() const {
  if (std::isinf(max_) && max_ < 0) return max_;
  return max_ + std::log(acc_);
}

double LogSum::value() const { return std::exp(log_value()); }

}  // namespace htx
