#pragma once

#include "decentmem/rng.hpp"

#include <algorithm>

namespace decentmem {

enum class PoolChoice { Exploit, Explore };

/// Online router state for one agent. The E-pool weight moves with
/// stage-wise feedback; the X-pool weight stays at 1.0.
struct RouterState {
    double w_e = 1.0;
    double w_x = 1.0;       // fixed
    double increment = 0.5;
    double decay = 0.5;
    double floor = 1.0;

    bool operator==(const RouterState&) const = default;
};

/// Probability of selecting the E-pool: w_e / (w_e + w_x).
/// With w_e >= 1 and w_x = 1 this lies in [0.5, 1).
inline double selection_prob(const RouterState& s) {
    return s.w_e / (s.w_e + s.w_x);
}

inline PoolChoice choose(const RouterState& s, Rng& rng) {
    return rng.bernoulli(selection_prob(s)) ? PoolChoice::Exploit
                                            : PoolChoice::Explore;
}

/// Feedback update. Successful exploitation (or failed exploration)
/// grows w_e by `increment`; the opposite outcomes decay it toward the
/// floor. delta must be 0 or 1.
inline RouterState update(RouterState s, PoolChoice choice, int delta) {
    const bool grow = (choice == PoolChoice::Exploit) == (delta == 1);
    if (grow) {
        s.w_e += s.increment;
    } else {
        s.w_e = std::max(s.floor, s.decay * s.w_e);
    }
    return s;
}

} // namespace decentmem
