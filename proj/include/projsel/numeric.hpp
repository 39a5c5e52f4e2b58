#pragma once

#include <cmath>
#include <cstdio>
#include <string>

namespace projsel {

// Compensated (Kahan-Babuska-Neumaier) summation.
class NeumaierSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::fabs(sum_) >= std::fabs(x)) {
      compensation_ += (sum_ - t) + x;
    } else {
      compensation_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + compensation_; }

 private:
  double sum_ = 0.0;
  double compensation_ = 0.0;
};

// Text form with 12 significant digits, used for every CSV/JSON float the
// CLI emits.
inline std::string format_real(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

inline double round_significant(double x) {
  return std::stod(format_real(x));
}

}  // namespace projsel
