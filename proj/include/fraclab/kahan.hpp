#pragma once
#include <cmath>
#include <span>

namespace fraclab {

// Neumaier-compensated accumulator: exact to ~1 ulp of the running sum even
// when terms alternate in sign and magnitude.
class NeumaierSum {
  public:
    void add(double x) {
        double t = s_ + x;
        if (std::abs(s_) >= std::abs(x))
            c_ += (s_ - t) + x;
        else
            c_ += (x - t) + s_;
        s_ = t;
    }
    double value() const { return s_ + c_; }
    void reset() { s_ = c_ = 0.0; }

  private:
    double s_ = 0.0;
    double c_ = 0.0;
};

inline double compensated_sum(std::span<const double> xs) {
    NeumaierSum acc;
    for (double x : xs) acc.add(x);
    return acc.value();
}

} // namespace fraclab
