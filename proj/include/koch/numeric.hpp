#pragma once

#include <cmath>
#include <span>
#include <vector>

namespace koch {

// Pairwise summation: deterministic reduction order with O(log n) error growth.
double pairwise_sum(std::span<const double> values);

// Neumaier-compensated running sum.
class CompensatedSum {
public:
    void add(double v) {
        const double t = sum_ + v;
        comp_ += std::abs(sum_) >= std::abs(v) ? (sum_ - t) + v : (v - t) + sum_;
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

// log(sec theta) computed as log1p(tan^2 theta)/2, accurate for small angles.
inline double log_sec(double theta) {
    const double t = std::tan(theta);
    return 0.5 * std::log1p(t * t);
}

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    std::vector<double> residuals;
};

// Ordinary least squares y = slope * x + intercept.
LinearFit least_squares(std::span<const double> x, std::span<const double> y);

}  // namespace koch
