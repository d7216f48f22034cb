#include "decentmem/errors.hpp"
#include "decentmem/stats.hpp"

#include <doctest.h>

#include <cmath>
#include <vector>

using namespace decentmem;

TEST_CASE("mean and sample variance") {
    const std::vector<double> xs{1.0, 2.0, 3.0, 4.0};
    CHECK(stats::mean(xs) == doctest::Approx(2.5));
    CHECK(stats::sample_variance(xs) == doctest::Approx(5.0 / 3.0));
}

TEST_CASE("incomplete beta against closed forms") {
    // I_x(1,1) = x
    CHECK(stats::incomplete_beta(1, 1, 0.5) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(stats::incomplete_beta(1, 1, 0.25) == doctest::Approx(0.25).epsilon(1e-12));
    // I_x(2,2) = 3x^2 - 2x^3
    CHECK(stats::incomplete_beta(2, 2, 0.25) ==
          doctest::Approx(0.15625).epsilon(1e-12));
    // I_x(1,b) = 1 - (1-x)^b
    CHECK(stats::incomplete_beta(1, 3, 0.5) ==
          doctest::Approx(1.0 - 0.125).epsilon(1e-12));
    CHECK(stats::incomplete_beta(2, 5, 0.0) == 0.0);
    CHECK(stats::incomplete_beta(2, 5, 1.0) == 1.0);
    // Symmetry I_x(a,b) = 1 - I_{1-x}(b,a)
    CHECK(stats::incomplete_beta(2.5, 4.0, 0.3) ==
          doctest::Approx(1.0 - stats::incomplete_beta(4.0, 2.5, 0.7)).epsilon(1e-12));
}

TEST_CASE("student t cdf against the Cauchy closed form") {
    // One degree of freedom is Cauchy: F(t) = 1/2 + atan(t)/pi.
    for (double t : {-3.0, -1.0, 0.0, 0.5, 1.0, 2.5}) {
        CHECK(stats::student_t_cdf(t, 1.0) ==
              doctest::Approx(0.5 + std::atan(t) / M_PI).epsilon(1e-10));
    }
    // Two degrees of freedom: F(t) = 1/2 + t / (2 sqrt(2) sqrt(1 + t^2/2)).
    for (double t : {-2.0, 0.0, 1.0, 3.4641016151377544}) {
        const double closed = 0.5 + t / (2.0 * std::sqrt(2.0 + t * t));
        CHECK(stats::student_t_cdf(t, 2.0) == doctest::Approx(closed).epsilon(1e-10));
    }
    CHECK(stats::student_t_cdf(0.0, 7.0) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(stats::student_t_cdf(100.0, 5.0) > 0.999999);
}

TEST_CASE("paired t-test on a hand-computed example") {
    // d = {1, 2, 3}: mean 2, variance 1, t = 2 sqrt(3) with 2 df,
    // one-sided p = 0.5 - t / (2 sqrt(2 + t^2)) = 0.03708995...
    const std::vector<double> a{2.0, 4.0, 6.0};
    const std::vector<double> b{1.0, 2.0, 3.0};
    const auto res = stats::paired_t_test_greater(a, b);
    CHECK(res.n == 3);
    CHECK(res.mean_diff == doctest::Approx(2.0));
    CHECK(res.t_statistic == doctest::Approx(2.0 * std::sqrt(3.0)).epsilon(1e-12));
    CHECK(res.p_value == doctest::Approx(0.037089950113696).epsilon(1e-9));
}

TEST_CASE("paired t-test resolves zero variance by sign") {
    const std::vector<double> base{1.0, 2.0, 3.0};
    std::vector<double> up{2.0, 3.0, 4.0};
    CHECK(stats::paired_t_test_greater(up, base).p_value == 0.0);
    CHECK(stats::paired_t_test_greater(base, up).p_value == 1.0);
    CHECK(stats::paired_t_test_greater(base, base).p_value == 1.0);
}

TEST_CASE("paired t-test rejects mismatched or tiny samples") {
    CHECK_THROWS_AS(stats::paired_t_test_greater({1.0}, {2.0}), ConfigError);
    CHECK_THROWS_AS(stats::paired_t_test_greater({1.0, 2.0}, {2.0}), ConfigError);
}

TEST_CASE("paired t-test direction: no evidence when means are equal") {
    const std::vector<double> a{1.0, 5.0, 2.0, 4.0};
    const std::vector<double> b{5.0, 1.0, 4.0, 2.0};
    CHECK(stats::paired_t_test_greater(a, b).p_value > 0.4);
}
