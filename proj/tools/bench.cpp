// Benchmarks the OpenMP kernels against their serial references:
// stationary-distribution matvec, Monte Carlo regret fan-out, and batch
// retrieval scoring. Also asserts the two paths agree.

#include "decentmem/memory.hpp"
#include "decentmem/rng.hpp"
#include "decentmem/sim.hpp"
#include "decentmem/theory.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

using namespace decentmem;
using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

void report(const std::string& name, double serial_s, double parallel_s,
            bool agree) {
    std::printf("%-28s serial %8.3fs   parallel %8.3fs   speedup %5.2fx   %s\n",
                name.c_str(), serial_s, parallel_s, serial_s / parallel_s,
                agree ? "outputs agree" : "OUTPUTS DIFFER");
}

void bench_stationary() {
    Rng rng(11);
    const std::size_t n = 2000;
    auto base = theory::TransitionMatrix::random(n, rng, 0.3);
    auto prior = theory::TeleportPrior::random(n, rng);
    theory::MixedTransition m(std::move(base), std::move(prior), 0.9);

    theory::StationaryOptions serial_opts;
    serial_opts.serial = true;
    auto t0 = Clock::now();
    const auto pi_serial = theory::stationary(m, serial_opts);
    const double s = seconds_since(t0);

    t0 = Clock::now();
    const auto pi_parallel = theory::stationary(m);
    const double p = seconds_since(t0);

    report("stationary matvec n=2000",
           s, p, theory::total_variation(pi_serial, pi_parallel) < 1e-9);
}

void bench_regret() {
    const auto curve = theory::RewardCurve::default_curve();
    const std::size_t horizon = 50'000, seeds = 64;

    auto t0 = Clock::now();
    const auto serial = theory::monte_carlo_regret(
        curve, horizon, theory::RegretMode::RobbinsMonro, seeds, 3, 1'000,
        10'000, /*serial=*/true);
    const double s = seconds_since(t0);

    t0 = Clock::now();
    const auto parallel = theory::monte_carlo_regret(
        curve, horizon, theory::RegretMode::RobbinsMonro, seeds, 3, 1'000,
        10'000, /*serial=*/false);
    const double p = seconds_since(t0);

    bool agree = serial.sample_times == parallel.sample_times;
    for (std::size_t i = 0; agree && i < serial.mean_regret.size(); ++i)
        agree = serial.mean_regret[i] == parallel.mean_regret[i];
    report("monte carlo regret 64 seeds", s, p, agree);
}

void bench_retrieval() {
    const auto embedder = make_hash_embedder();
    Rng rng(5);
    std::vector<MemoryPiece> pool;
    for (std::uint64_t i = 0; i < 50'000; ++i) {
        MemoryPiece piece;
        piece.id = i;
        piece.context_prototype = "piece " + std::to_string(rng.below(4096)) +
                                  " tok" + std::to_string(rng.below(4096));
        piece.context_embedding = embedder.embed(piece.context_prototype);
        piece.created_at = i;
        pool.push_back(std::move(piece));
    }
    const auto query = embedder.embed("piece 100 tok200");

    // The parallel cutover in retrieve() is size-based; time repeated
    // scans so the comparison is stable.
    const int reps = 40;
    auto t0 = Clock::now();
    std::vector<std::pair<MemoryPiece, double>> small_ref;
    for (int r = 0; r < reps; ++r) {
        // sub-cutover slices run the serial path
        for (std::size_t off = 0; off + 256 <= pool.size(); off += 256) {
            std::vector<MemoryPiece> slice(pool.begin() + off,
                                           pool.begin() + off + 256);
            auto hits = retrieve(slice, query, 3, 0.2);
            if (off == 0 && r == 0) small_ref = hits;
        }
    }
    const double s = seconds_since(t0);

    t0 = Clock::now();
    std::vector<std::pair<MemoryPiece, double>> big;
    for (int r = 0; r < reps; ++r) big = retrieve(pool, query, 3, 0.2);
    const double p = seconds_since(t0);

    bool agree = !big.empty();
    for (const auto& [piece, sim] : big)
        agree = agree && std::abs(cosine_sim(piece.context_embedding, query) -
                                  sim) < 1e-12;
    report("batch retrieval 50k pieces", s, p, agree);
}

} // namespace

int main() {
    bench_stationary();
    bench_regret();
    bench_retrieval();
    return 0;
}
