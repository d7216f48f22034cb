#include "decentmem/stats.hpp"
#include "decentmem/errors.hpp"

#include <cmath>
#include <limits>

namespace decentmem::stats {

double mean(const std::vector<double>& xs) {
    double s = 0.0;
    for (double x : xs) s += x;
    return s / static_cast<double>(xs.size());
}

double sample_variance(const std::vector<double>& xs) {
    const double m = mean(xs);
    double s = 0.0;
    for (double x : xs) s += (x - m) * (x - m);
    return s / static_cast<double>(xs.size() - 1);
}

namespace {

// Lentz's continued fraction for the incomplete beta function.
double betacf(double a, double b, double x) {
    constexpr int kMaxIter = 300;
    constexpr double kEps = 3e-14;
    constexpr double kFpMin = 1e-300;

    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < kFpMin) d = kFpMin;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kFpMin) d = kFpMin;
        c = 1.0 + aa / c;
        if (std::abs(c) < kFpMin) c = kFpMin;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kFpMin) d = kFpMin;
        c = 1.0 + aa / c;
        if (std::abs(c) < kFpMin) c = kFpMin;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < kEps) break;
    }
    return h;
}

} // namespace

double incomplete_beta(double a, double b, double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                            a * std::log(x) + b * std::log(1.0 - x);
    const double front = std::exp(ln_front);
    if (x < (a + 1.0) / (a + b + 2.0)) {
        return front * betacf(a, b, x) / a;
    }
    return 1.0 - front * betacf(b, a, 1.0 - x) / b;
}

double student_t_cdf(double t, double nu) {
    const double x = nu / (nu + t * t);
    const double p = 0.5 * incomplete_beta(0.5 * nu, 0.5, x);
    return t > 0.0 ? 1.0 - p : p;
}

PairedTestResult paired_t_test_greater(const std::vector<double>& a,
                                       const std::vector<double>& b) {
    if (a.size() != b.size() || a.size() < 2) {
        throw ConfigError("paired t-test needs two equal samples of size >= 2");
    }
    std::vector<double> d(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];

    PairedTestResult res;
    res.n = d.size();
    res.mean_diff = mean(d);
    const double var = sample_variance(d);
    if (var == 0.0) {
        res.t_statistic = res.mean_diff > 0.0
                              ? std::numeric_limits<double>::infinity()
                              : (res.mean_diff < 0.0
                                     ? -std::numeric_limits<double>::infinity()
                                     : 0.0);
        res.p_value = res.mean_diff > 0.0 ? 0.0 : 1.0;
        return res;
    }
    res.t_statistic =
        res.mean_diff / std::sqrt(var / static_cast<double>(res.n));
    res.p_value =
        1.0 - student_t_cdf(res.t_statistic, static_cast<double>(res.n - 1));
    return res;
}

} // namespace decentmem::stats
