#ifndef CAUSALMED_SUMMATION_HPP
#define CAUSALMED_SUMMATION_HPP

#include <cmath>

namespace causalmed {

// Neumaier compensated accumulator: order-stable, far less rounding than a
// bare running sum. Used wherever a reduction must be reproducible.
class NeumaierSum {
  public:
    void add(double x) noexcept {
        double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x)) {
            comp_ += (sum_ - t) + x;
        } else {
            comp_ += (x - t) + sum_;
        }
        sum_ = t;
    }

    double value() const noexcept { return sum_ + comp_; }

  private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

}  // namespace causalmed

#endif  // CAUSALMED_SUMMATION_HPP
