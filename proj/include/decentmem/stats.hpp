#pragma once

#include <cstddef>
#include <vector>

namespace decentmem::stats {

double mean(const std::vector<double>& xs);
double sample_variance(const std::vector<double>& xs);

/// Regularized incomplete beta function I_x(a, b) (continued fraction).
double incomplete_beta(double a, double b, double x);

/// Student-t CDF with nu degrees of freedom.
double student_t_cdf(double t, double nu);

struct PairedTestResult {
    double t_statistic = 0.0;
    double p_value = 1.0; // one-sided, H1: mean(a) > mean(b)
    double mean_diff = 0.0;
    std::size_t n = 0;
};

/// One-sided paired t-test of H1: mean(a - b) > 0.
/// Zero-variance differences resolve by sign of the mean.
PairedTestResult paired_t_test_greater(const std::vector<double>& a,
                                       const std::vector<double>& b);

} // namespace decentmem::stats
