#pragma once

#include "decentmem/rng.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace decentmem::theory {

/// Column-stochastic matrix: entries(i, j) is the probability of moving
/// from state j to state i.
class TransitionMatrix {
public:
    TransitionMatrix() = default;
    /// Row-major n*n entries; validates nonnegativity and column sums
    /// (within 1e-12).
    TransitionMatrix(std::size_t n, std::vector<double> entries);

    std::size_t size() const { return n_; }
    double operator()(std::size_t i, std::size_t j) const { return entries_[i * n_ + j]; }
    const std::vector<double>& entries() const { return entries_; }

    static TransitionMatrix random(std::size_t n, Rng& rng, double sparsity = 0.0);

private:
    std::size_t n_ = 0;
    std::vector<double> entries_;
};

/// Simplex vector h; reachability additionally needs min entry > 0.
class TeleportPrior {
public:
    TeleportPrior() = default;
    explicit TeleportPrior(std::vector<double> h);

    std::size_t size() const { return h_.size(); }
    double operator[](std::size_t i) const { return h_[i]; }
    const std::vector<double>& values() const { return h_; }
    double min_entry() const;

    static TeleportPrior uniform(std::size_t n);
    static TeleportPrior random(std::size_t n, Rng& rng);

private:
    std::vector<double> h_;
};

/// M = alpha * T + (1 - alpha) * h * 1^T. Column-stochastic by
/// construction; strictly positive whenever alpha < 1 and min h > 0.
class MixedTransition {
public:
    MixedTransition(TransitionMatrix base, TeleportPrior prior, double alpha);

    std::size_t size() const { return base_.size(); }
    double alpha() const { return alpha_; }
    const TransitionMatrix& base() const { return base_; }
    const TeleportPrior& prior() const { return prior_; }

    double entry(std::size_t i, std::size_t j) const {
        return alpha_ * base_(i, j) + (1.0 - alpha_) * prior_[i];
    }
    double min_entry() const;

    /// y = M x (OpenMP matvec).
    void apply(const std::vector<double>& x, std::vector<double>& y) const;
    /// Serial reference for the matvec, kept for testing and benchmarks.
    void apply_serial(const std::vector<double>& x, std::vector<double>& y) const;

private:
    TransitionMatrix base_;
    TeleportPrior prior_;
    double alpha_;
};

inline MixedTransition mixed_transition(TransitionMatrix base, TeleportPrior prior,
                                        double alpha) {
    return MixedTransition(std::move(base), std::move(prior), alpha);
}

struct ReachabilityReport {
    bool strictly_positive = false;
    double min_entry = 0.0;
    bool irreducible = false;
    bool aperiodic = false;
    std::size_t strongly_connected_components = 1;
    int period = 1; // of the first closed class, when reducible/periodic
    std::string verdict;
};

/// Strict positivity implies primitivity; otherwise an explicit SCC and
/// period check on the support graph decides.
ReachabilityReport check_reachability(const MixedTransition& m);

struct StationaryOptions {
    double tol = 1e-10;
    std::size_t max_iterations = 1'000'000;
    bool serial = false;
};

/// Power iteration to the stationary distribution; throws
/// ConvergenceError at the iteration cap.
std::vector<double> stationary(const MixedTransition& m,
                               const StationaryOptions& opts = {},
                               const std::vector<double>* start = nullptr);

// --- routing recursion and regret ------------------------------------

/// phi_plus(a) = (1+a)/(3-a), phi_minus(a) = a/(2-a): the two closed-form
/// alpha updates induced by the weight dynamics with increment and decay
/// both 0.5.
struct PhiPair {
    double plus;
    double minus;
};
PhiPair phi_maps(double alpha);

/// Composite reward curve with its branch probability. q(alpha) is the
/// probability of the upward branch (phi_plus).
struct RewardCurve {
    std::function<double(double)> r;
    std::function<double(double)> q;
    double alpha_star;

    /// Default test curve: r(a) = 1 - (a - 0.75)^2 with q chosen so the
    /// drift fixed point sits at 0.75 and the mean dynamics contract
    /// fast enough for 1/l mean-squared error (|g'(a*)| > 1/2).
    static RewardCurve default_curve();

    /// r strictly concave on [0.5, 1): negative second difference on a grid.
    bool satisfies_concavity(std::size_t grid = 64) const;
};

/// Mean drift of the alpha recursion:
/// g(a) = q(a) (phi_plus(a) - a) + (1 - q(a)) (phi_minus(a) - a).
double drift(double alpha, const RewardCurve& curve);

/// Root of g on [lo, hi] by bisection (drift is positive at lo, negative
/// at hi for admissible curves).
double drift_fixed_point(const RewardCurve& curve, double lo = 0.5,
                         double hi = 1.0 - 1e-9, double tol = 1e-12);

enum class RegretMode { RawWeights, RobbinsMonro };

struct RegretTrace {
    std::size_t horizon = 0;
    std::vector<double> cumulative_regret; // R(t), t = 1..T
    std::vector<double> alphas;
    std::vector<double> mse; // (alpha_l - alpha*)^2
};

/// One seeded run of the router recursion against the curve.
/// RawWeights replays the actual weight dynamics (increment / decay /
/// floor); RobbinsMonro runs a_{l+1} = clamp(a_l + g(a_l)/l + xi_l/l)
/// with the branch noise centered by g. with_noise = false replaces the
/// sampled branch by its mean (pure drift).
RegretTrace simulate_router_regret(const RewardCurve& curve, std::size_t horizon,
                                   RegretMode mode, std::uint64_t seed,
                                   double alpha0 = 0.5, bool with_noise = true);

/// Deterministic expected-regret trace of a fixed routing probability:
/// R(T) = T * (r(alpha*) - r(alpha_bar)).
RegretTrace fixed_policy_regret(const RewardCurve& curve, double alpha_bar,
                                std::size_t horizon);

/// Log-spaced sample times in [1, horizon], always including horizon
/// and horizon/10.
std::vector<std::size_t> regret_sample_times(std::size_t horizon,
                                             std::size_t per_decade = 64);

/// Seed-averaged regret summary. Seeds fan out across OpenMP workers;
/// every seed gets its own derived stream and its own result slot, and
/// the reduction runs in seed order, so the result does not depend on
/// the thread count.
struct MonteCarloRegret {
    std::vector<std::size_t> sample_times;
    std::vector<double> mean_regret; // at sample_times
    std::vector<double> mean_mse;    // at sample_times
    // Mean of l * mse(l) over l in [mid_lo, mid_hi) and [mid_hi, horizon].
    double scaled_mse_mid = 0.0;
    double scaled_mse_tail = 0.0;
};
MonteCarloRegret monte_carlo_regret(const RewardCurve& curve, std::size_t horizon,
                                    RegretMode mode, std::size_t seeds,
                                    std::uint64_t base_seed,
                                    std::size_t mid_lo = 1'000,
                                    std::size_t mid_hi = 10'000,
                                    bool serial = false);

struct LogFit {
    double a = 0.0;
    double b = 0.0;
    double relative_residual = 0.0; // RMS residual / mean |R| over the window
};

/// Least-squares fit R(t) ~ a + b log t over sample points with
/// window_lo <= t <= window_hi.
LogFit fit_log_growth(const std::vector<std::size_t>& times,
                      const std::vector<double>& regret, std::size_t window_lo,
                      std::size_t window_hi);

/// Convenience overload for a dense trace where regret[i] = R(i + 1).
LogFit fit_log_growth(const std::vector<double>& regret, std::size_t window_lo,
                      std::size_t window_hi);

double total_variation(const std::vector<double>& p, const std::vector<double>& q);

} // namespace decentmem::theory
