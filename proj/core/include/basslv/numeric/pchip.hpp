#pragma once

#include <vector>

namespace basslv {

/// Monotone cubic interpolant (Fritsch-Carlson). If the data are
/// nondecreasing the interpolant is nondecreasing. Evaluation outside
/// the node range extrapolates with the boundary value (flat).
class MonotoneCubic {
  public:
    MonotoneCubic() = default;
    MonotoneCubic(std::vector<double> x, std::vector<double> y);

    double operator()(double x) const;
    bool empty() const { return x_.empty(); }

  private:
    std::vector<double> x_, y_, d_;  // nodes, values, derivatives
};

}  // namespace basslv
