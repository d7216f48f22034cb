#include "decentmem/theory.hpp"
#include "decentmem/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace decentmem::theory {

namespace {
constexpr double kStochasticTol = 1e-12;
}

TransitionMatrix::TransitionMatrix(std::size_t n, std::vector<double> entries)
    : n_(n), entries_(std::move(entries)) {
    if (entries_.size() != n_ * n_) {
        throw ConfigError("transition matrix: entry count does not match size");
    }
    for (std::size_t j = 0; j < n_; ++j) {
        double sum = 0.0;
        for (std::size_t i = 0; i < n_; ++i) {
            const double v = entries_[i * n_ + j];
            if (v < 0.0) throw ConfigError("transition matrix: negative entry");
            sum += v;
        }
        if (std::abs(sum - 1.0) > kStochasticTol) {
            throw ConfigError("transition matrix: column " + std::to_string(j) +
                              " sums to " + std::to_string(sum));
        }
    }
}

TransitionMatrix TransitionMatrix::random(std::size_t n, Rng& rng, double sparsity) {
    std::vector<double> e(n * n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        double sum = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (sparsity > 0.0 && rng.bernoulli(sparsity)) continue;
            const double v = rng.uniform();
            e[i * n + j] = v;
            sum += v;
        }
        if (sum == 0.0) { // fully zeroed column: keep a self loop
            e[j * n + j] = 1.0;
            sum = 1.0;
        }
        for (std::size_t i = 0; i < n; ++i) e[i * n + j] /= sum;
        // absorb renormalization drift into the column's largest entry
        double s2 = 0.0;
        std::size_t imax = 0;
        for (std::size_t i = 0; i < n; ++i) {
            s2 += e[i * n + j];
            if (e[i * n + j] > e[imax * n + j]) imax = i;
        }
        e[imax * n + j] += 1.0 - s2;
    }
    return TransitionMatrix(n, std::move(e));
}

TeleportPrior::TeleportPrior(std::vector<double> h) : h_(std::move(h)) {
    double sum = 0.0;
    for (double v : h_) {
        if (v < 0.0) throw ConfigError("teleport prior: negative entry");
        sum += v;
    }
    if (std::abs(sum - 1.0) > kStochasticTol) {
        throw ConfigError("teleport prior: entries sum to " + std::to_string(sum));
    }
}

double TeleportPrior::min_entry() const {
    return *std::min_element(h_.begin(), h_.end());
}

TeleportPrior TeleportPrior::uniform(std::size_t n) {
    return TeleportPrior(std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

TeleportPrior TeleportPrior::random(std::size_t n, Rng& rng) {
    std::vector<double> h(n);
    double sum = 0.0;
    for (double& v : h) {
        v = 0.05 + rng.uniform(); // keep entries bounded away from zero
        sum += v;
    }
    for (double& v : h) v /= sum;
    double s2 = std::accumulate(h.begin(), h.end(), 0.0);
    h[0] += 1.0 - s2;
    return TeleportPrior(std::move(h));
}

MixedTransition::MixedTransition(TransitionMatrix base, TeleportPrior prior,
                                 double alpha)
    : base_(std::move(base)), prior_(std::move(prior)), alpha_(alpha) {
    if (base_.size() != prior_.size()) {
        throw ConfigError("mixed transition: T and h sizes differ");
    }
    if (alpha_ < 0.0 || alpha_ > 1.0) {
        throw ConfigError("mixed transition: alpha outside [0,1]");
    }
}

double MixedTransition::min_entry() const {
    const std::size_t n = size();
    double m = entry(0, 0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) m = std::min(m, entry(i, j));
    return m;
}

void MixedTransition::apply(const std::vector<double>& x, std::vector<double>& y) const {
    const std::size_t n = size();
    y.assign(n, 0.0);
    double mass = 0.0;
    for (double v : x) mass += v;
    const double teleport = (1.0 - alpha_) * mass;
#pragma omp parallel for schedule(static) if (n > 64)
    for (long long i = 0; i < static_cast<long long>(n); ++i) {
        const std::size_t row = static_cast<std::size_t>(i);
        double acc = 0.0;
        for (std::size_t j = 0; j < n; ++j) acc += base_(row, j) * x[j];
        y[row] = alpha_ * acc + teleport * prior_[row];
    }
}

void MixedTransition::apply_serial(const std::vector<double>& x,
                                   std::vector<double>& y) const {
    const std::size_t n = size();
    y.assign(n, 0.0);
    double mass = 0.0;
    for (double v : x) mass += v;
    const double teleport = (1.0 - alpha_) * mass;
    for (std::size_t i = 0; i < n; ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < n; ++j) acc += base_(i, j) * x[j];
        y[i] = alpha_ * acc + teleport * prior_[i];
    }
}

namespace {

// Iterative Tarjan SCC on the support graph of M.
std::vector<int> scc_components(const MixedTransition& m, std::size_t& count) {
    const std::size_t n = m.size();
    std::vector<std::vector<std::size_t>> adj(n);
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < n; ++i)
            if (m.entry(i, j) > 0.0) adj[j].push_back(i); // edge j -> i

    std::vector<int> comp(n, -1), low(n, 0), disc(n, -1);
    std::vector<bool> on_stack(n, false);
    std::vector<std::size_t> stack;
    int timer = 0;
    count = 0;

    struct Frame {
        std::size_t v;
        std::size_t edge = 0;
    };
    for (std::size_t s = 0; s < n; ++s) {
        if (disc[s] != -1) continue;
        std::vector<Frame> frames{{s}};
        disc[s] = low[s] = timer++;
        stack.push_back(s);
        on_stack[s] = true;
        while (!frames.empty()) {
            Frame& f = frames.back();
            if (f.edge < adj[f.v].size()) {
                const std::size_t w = adj[f.v][f.edge++];
                if (disc[w] == -1) {
                    disc[w] = low[w] = timer++;
                    stack.push_back(w);
                    on_stack[w] = true;
                    frames.push_back({w});
                } else if (on_stack[w]) {
                    low[f.v] = std::min(low[f.v], disc[w]);
                }
            } else {
                if (low[f.v] == disc[f.v]) {
                    while (true) {
                        const std::size_t w = stack.back();
                        stack.pop_back();
                        on_stack[w] = false;
                        comp[w] = static_cast<int>(count);
                        if (w == f.v) break;
                    }
                    ++count;
                }
                const std::size_t v = f.v;
                frames.pop_back();
                if (!frames.empty()) {
                    low[frames.back().v] = std::min(low[frames.back().v], low[v]);
                }
            }
        }
    }
    return comp;
}

// Period of the chain restricted to the component containing `root`:
// gcd over support edges inside the class of (level(u) + 1 - level(v)).
int class_period(const MixedTransition& m, const std::vector<int>& comp, int cls,
                 std::size_t root) {
    const std::size_t n = m.size();
    std::vector<long long> level(n, -1);
    std::vector<std::size_t> queue{root};
    level[root] = 0;
    long long g = 0;
    for (std::size_t head = 0; head < queue.size(); ++head) {
        const std::size_t u = queue[head];
        for (std::size_t v = 0; v < n; ++v) {
            if (m.entry(v, u) <= 0.0 || comp[v] != cls) continue;
            if (level[v] == -1) {
                level[v] = level[u] + 1;
                queue.push_back(v);
            } else {
                g = std::gcd(g, std::abs(level[u] + 1 - level[v]));
            }
        }
    }
    return g == 0 ? 1 : static_cast<int>(g);
}

} // namespace

ReachabilityReport check_reachability(const MixedTransition& m) {
    ReachabilityReport rep;
    rep.min_entry = m.min_entry();
    rep.strictly_positive = rep.min_entry > 0.0;
    if (rep.strictly_positive) {
        // A strictly positive stochastic matrix is primitive.
        rep.irreducible = true;
        rep.aperiodic = true;
        rep.strongly_connected_components = 1;
        rep.period = 1;
        rep.verdict = "pass: strictly positive, irreducible and aperiodic";
        return rep;
    }
    std::size_t count = 0;
    const std::vector<int> comp = scc_components(m, count);
    rep.strongly_connected_components = count;
    rep.irreducible = (count == 1);
    if (rep.irreducible) {
        rep.period = class_period(m, comp, comp[0], 0);
        rep.aperiodic = (rep.period == 1);
        rep.verdict = rep.aperiodic
                          ? "pass: irreducible and aperiodic (support check)"
                          : "fail: irreducible but periodic with period " +
                                std::to_string(rep.period);
    } else {
        rep.aperiodic = false;
        rep.period = 0;
        rep.verdict = "fail: reducible, " + std::to_string(count) +
                      " strongly connected components";
    }
    return rep;
}

std::vector<double> stationary(const MixedTransition& m, const StationaryOptions& opts,
                               const std::vector<double>* start) {
    const std::size_t n = m.size();
    std::vector<double> x;
    if (start) {
        x = *start;
        double sum = std::accumulate(x.begin(), x.end(), 0.0);
        if (sum <= 0.0) throw ConfigError("stationary: start vector has no mass");
        for (double& v : x) v /= sum;
    } else {
        x.assign(n, 1.0 / static_cast<double>(n));
    }
    std::vector<double> y(n);
    for (std::size_t it = 0; it < opts.max_iterations; ++it) {
        if (opts.serial) m.apply_serial(x, y);
        else m.apply(x, y);
        double err = 0.0;
        for (std::size_t i = 0; i < n; ++i) err += std::abs(y[i] - x[i]);
        // keep the iterate on the simplex against rounding drift
        double sum = std::accumulate(y.begin(), y.end(), 0.0);
        for (double& v : y) v /= sum;
        x.swap(y);
        if (err < opts.tol) return x;
    }
    throw ConvergenceError(
        "power iteration did not converge (reducible or periodic chain?)");
}

PhiPair phi_maps(double alpha) {
    return {(1.0 + alpha) / (3.0 - alpha), alpha / (2.0 - alpha)};
}

double drift(double alpha, const RewardCurve& curve) {
    const PhiPair phi = phi_maps(alpha);
    const double q = curve.q(alpha);
    return q * (phi.plus - alpha) + (1.0 - q) * (phi.minus - alpha);
}

double drift_fixed_point(const RewardCurve& curve, double lo, double hi, double tol) {
    double glo = drift(lo, curve);
    double ghi = drift(hi, curve);
    if (glo == 0.0) return lo;
    if (ghi == 0.0) return hi;
    if ((glo > 0.0) == (ghi > 0.0)) {
        throw ConfigError("drift_fixed_point: no sign change on the bracket");
    }
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        const double gm = drift(mid, curve);
        if (gm == 0.0) return mid;
        if ((gm > 0.0) == (glo > 0.0)) {
            lo = mid;
            glo = gm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

RewardCurve RewardCurve::default_curve() {
    // Branch probability at the optimum must make the drift vanish:
    //   q* = (a - phi_minus) / (phi_plus - phi_minus) at a = 0.75.
    // The slope steepens the contraction so that |g'(a*)| > 1/2, which
    // the 1/l step size needs for O(1/l) mean-squared error.
    constexpr double kAlphaStar = 0.75;
    constexpr double kQStar = 0.84375;
    constexpr double kQSlope = 3.0;
    RewardCurve c;
    c.r = [](double a) { return 1.0 - (a - kAlphaStar) * (a - kAlphaStar); };
    c.q = [](double a) {
        return std::clamp(kQStar + kQSlope * (kAlphaStar - a), 0.0, 1.0);
    };
    c.alpha_star = kAlphaStar;
    return c;
}

bool RewardCurve::satisfies_concavity(std::size_t grid) const {
    const double lo = 0.5, hi = 1.0;
    const double step = (hi - lo) / static_cast<double>(grid);
    for (std::size_t i = 1; i + 1 < grid; ++i) {
        const double a = lo + step * static_cast<double>(i);
        const double second = r(a - step) - 2.0 * r(a) + r(a + step);
        if (second >= 0.0) return false;
    }
    return true;
}

namespace {

struct RegretAccumulators {
    double regret = 0.0;
    // Sums of l * mse(l) and counts per window.
    double mid_sum = 0.0, tail_sum = 0.0;
    std::size_t mid_n = 0, tail_n = 0;
};

} // namespace

RegretTrace simulate_router_regret(const RewardCurve& curve, std::size_t horizon,
                                   RegretMode mode, std::uint64_t seed, double alpha0,
                                   bool with_noise) {
    if (!curve.satisfies_concavity()) {
        throw ConfigError("reward curve fails the concavity check");
    }
    const double r_star = curve.r(curve.alpha_star);
    Rng rng(seed);

    RegretTrace trace;
    trace.horizon = horizon;
    trace.cumulative_regret.reserve(horizon);
    trace.alphas.reserve(horizon);
    trace.mse.reserve(horizon);

    double alpha = alpha0;
    double w = alpha0 / (1.0 - alpha0); // raw-weights state
    double regret = 0.0;
    for (std::size_t l = 1; l <= horizon; ++l) {
        const double dev = alpha - curve.alpha_star;
        regret += r_star - curve.r(alpha);
        trace.cumulative_regret.push_back(regret);
        trace.alphas.push_back(alpha);
        trace.mse.push_back(dev * dev);

        const double q = curve.q(alpha);
        const bool up = with_noise ? rng.bernoulli(q) : false;
        if (mode == RegretMode::RawWeights) {
            if (with_noise) {
                w = up ? w + 0.5 : std::max(1.0, 0.5 * w);
            } else {
                w = q * (w + 0.5) + (1.0 - q) * std::max(1.0, 0.5 * w);
            }
            alpha = w / (w + 1.0);
        } else {
            const PhiPair phi = phi_maps(alpha);
            const double step = with_noise
                                    ? (up ? phi.plus - alpha : phi.minus - alpha)
                                    : drift(alpha, curve);
            alpha += step / static_cast<double>(l);
            alpha = std::clamp(alpha, 0.5, 1.0 - 1e-6);
        }
    }
    return trace;
}

RegretTrace fixed_policy_regret(const RewardCurve& curve, double alpha_bar,
                                std::size_t horizon) {
    const double gap = curve.r(curve.alpha_star) - curve.r(alpha_bar);
    RegretTrace trace;
    trace.horizon = horizon;
    trace.cumulative_regret.resize(horizon);
    trace.alphas.assign(horizon, alpha_bar);
    const double dev = alpha_bar - curve.alpha_star;
    trace.mse.assign(horizon, dev * dev);
    for (std::size_t t = 1; t <= horizon; ++t) {
        trace.cumulative_regret[t - 1] = gap * static_cast<double>(t);
    }
    return trace;
}

std::vector<std::size_t> regret_sample_times(std::size_t horizon,
                                             std::size_t per_decade) {
    std::vector<std::size_t> times;
    const double decades = std::log10(static_cast<double>(horizon));
    const std::size_t steps =
        static_cast<std::size_t>(std::ceil(decades * static_cast<double>(per_decade)));
    for (std::size_t k = 0; k <= steps; ++k) {
        const double t = std::pow(
            10.0, decades * static_cast<double>(k) / static_cast<double>(steps));
        const auto ti = static_cast<std::size_t>(std::llround(t));
        times.push_back(std::clamp<std::size_t>(ti, 1, horizon));
    }
    if (horizon >= 10) times.push_back(horizon / 10);
    times.push_back(horizon);
    std::sort(times.begin(), times.end());
    times.erase(std::unique(times.begin(), times.end()), times.end());
    return times;
}

MonteCarloRegret monte_carlo_regret(const RewardCurve& curve, std::size_t horizon,
                                    RegretMode mode, std::size_t seeds,
                                    std::uint64_t base_seed, std::size_t mid_lo,
                                    std::size_t mid_hi, bool serial) {
    if (!curve.satisfies_concavity()) {
        throw ConfigError("reward curve fails the concavity check");
    }
    const std::vector<std::size_t> times = regret_sample_times(horizon);
    const std::size_t nt = times.size();
    const double r_star = curve.r(curve.alpha_star);

    struct SeedResult {
        std::vector<double> regret_at, mse_at;
        RegretAccumulators acc;
    };
    std::vector<SeedResult> results(seeds);

#pragma omp parallel for schedule(dynamic) if (!serial)
    for (long long s = 0; s < static_cast<long long>(seeds); ++s) {
        Rng rng(Rng::mix(base_seed, static_cast<std::uint64_t>(s)));
        SeedResult res;
        res.regret_at.resize(nt);
        res.mse_at.resize(nt);

        double alpha = 0.5;
        double w = 1.0;
        double regret = 0.0;
        std::size_t next_sample = 0;
        for (std::size_t l = 1; l <= horizon; ++l) {
            const double dev = alpha - curve.alpha_star;
            const double mse = dev * dev;
            regret += r_star - curve.r(alpha);
            if (l >= mid_lo && l < mid_hi) {
                res.acc.mid_sum += static_cast<double>(l) * mse;
                ++res.acc.mid_n;
            } else if (l >= mid_hi) {
                res.acc.tail_sum += static_cast<double>(l) * mse;
                ++res.acc.tail_n;
            }
            while (next_sample < nt && times[next_sample] == l) {
                res.regret_at[next_sample] = regret;
                res.mse_at[next_sample] = mse;
                ++next_sample;
            }

            const double q = curve.q(alpha);
            const bool up = rng.bernoulli(q);
            if (mode == RegretMode::RawWeights) {
                w = up ? w + 0.5 : std::max(1.0, 0.5 * w);
                alpha = w / (w + 1.0);
            } else {
                const PhiPair phi = phi_maps(alpha);
                alpha += (up ? phi.plus - alpha : phi.minus - alpha) /
                         static_cast<double>(l);
                alpha = std::clamp(alpha, 0.5, 1.0 - 1e-6);
            }
        }
        results[static_cast<std::size_t>(s)] = std::move(res);
    }

    // Ordered reduction by seed.
    MonteCarloRegret out;
    out.sample_times = times;
    out.mean_regret.assign(nt, 0.0);
    out.mean_mse.assign(nt, 0.0);
    double mid_sum = 0.0, tail_sum = 0.0;
    std::size_t mid_n = 0, tail_n = 0;
    for (const auto& res : results) {
        for (std::size_t i = 0; i < nt; ++i) {
            out.mean_regret[i] += res.regret_at[i];
            out.mean_mse[i] += res.mse_at[i];
        }
        mid_sum += res.acc.mid_sum;
        tail_sum += res.acc.tail_sum;
        mid_n += res.acc.mid_n;
        tail_n += res.acc.tail_n;
    }
    const double inv = 1.0 / static_cast<double>(seeds);
    for (std::size_t i = 0; i < nt; ++i) {
        out.mean_regret[i] *= inv;
        out.mean_mse[i] *= inv;
    }
    out.scaled_mse_mid = mid_n ? mid_sum / static_cast<double>(mid_n) : 0.0;
    out.scaled_mse_tail = tail_n ? tail_sum / static_cast<double>(tail_n) : 0.0;
    return out;
}

LogFit fit_log_growth(const std::vector<std::size_t>& times,
                      const std::vector<double>& regret, std::size_t window_lo,
                      std::size_t window_hi) {
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (times[i] < window_lo || times[i] > window_hi) continue;
        const double x = std::log(static_cast<double>(times[i]));
        const double y = regret[i];
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++n;
    }
    if (n < 3) throw ConfigError("fit_log_growth: degenerate window");
    const double denom = static_cast<double>(n) * sxx - sx * sx;
    LogFit fit;
    fit.b = (static_cast<double>(n) * sxy - sx * sy) / denom;
    fit.a = (sy - fit.b * sx) / static_cast<double>(n);

    double ss = 0.0, abs_sum = 0.0;
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (times[i] < window_lo || times[i] > window_hi) continue;
        const double pred = fit.a + fit.b * std::log(static_cast<double>(times[i]));
        const double resid = regret[i] - pred;
        ss += resid * resid;
        abs_sum += std::abs(regret[i]);
    }
    const double mean_abs = abs_sum / static_cast<double>(n);
    const double rms = std::sqrt(ss / static_cast<double>(n));
    fit.relative_residual = mean_abs > 0.0 ? rms / mean_abs : rms;
    return fit;
}

LogFit fit_log_growth(const std::vector<double>& regret, std::size_t window_lo,
                      std::size_t window_hi) {
    std::vector<std::size_t> times(regret.size());
    for (std::size_t i = 0; i < regret.size(); ++i) times[i] = i + 1;
    return fit_log_growth(times, regret, window_lo, window_hi);
}

double total_variation(const std::vector<double>& p, const std::vector<double>& q) {
    double tv = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) tv += std::abs(p[i] - q[i]);
    return 0.5 * tv;
}

} // namespace decentmem::theory
