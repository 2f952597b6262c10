// numeric.hpp - compensated summation helper
#pragma once

#include <cmath>

namespace dickeflow {

// Neumaier-compensated accumulator; keeps long alternating-sign sums
// accurate to ~eps * max|term| instead of eps * sum|term|.
class CompensatedSum {
public:
    void add(double x) noexcept {
        const double t = sum_ + x;
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

} // namespace dickeflow
