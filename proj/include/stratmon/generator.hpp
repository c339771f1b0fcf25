// Random iCGS generation for tests and the experiment harness.

#pragma once

#include <cstdint>

#include "stratmon/icgs.hpp"

namespace stratmon {

struct GeneratorConfig {
    int state_count = 20;
    int agent_count = 2;
    int actions_per_agent = 2;
    double branching_density = 0.3;     // extra successor-pool mass per state
    double imperfect_info_target = 0.0; // confused-state ratio to hit (within 0.05)
    int atom_count = 3;
    uint64_t seed = 1;
};

// Deterministic for a fixed config. Every state is reachable from the
// initial state by construction, protocols stay uniform across merged
// classes, and the realized imperfect-information degree lands within 0.05
// of the target (GenerationError when the target is infeasible for the
// state count). The result always passes validate_model.
Icgs generate_random_icgs(const GeneratorConfig& cfg);

// Small deterministic PRNG used by the generator and the sweep (splitmix64
// core); kept independent of std distributions so streams are identical
// across platforms.
class RandomSource {
public:
    explicit RandomSource(uint64_t seed) : state_(seed ^ 0x9e3779b97f4a7c15ull) {}

    uint64_t next() {
        state_ += 0x9e3779b97f4a7c15ull;
        uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    // uniform in [0, n)
    uint64_t below(uint64_t n) { return n ? next() % n : 0; }

    double unit() { return static_cast<double>(next() >> 11) / 9007199254740992.0; }

    bool chance(double p) { return unit() < p; }

private:
    uint64_t state_;
};

} // namespace stratmon
