#pragma once

#include <cstdint>
#include <vector>

#include "qotsim/rng.hpp"

namespace qotsim {

/// Each strategy perturbs exactly the protocol steps it names; everything
/// else stays honest.
struct AdversaryStrategy {
    enum class Kind {
        EquivocateEq,     // plant (u, 1-u) pairs in `count` EqCommitment instances
        FakeSeedFamily,   // substitute non-PRG-derived seed families in `count` pairs
        SkipMeasurement,  // commit random values instead of measuring on `skip_set`
    };
    Kind kind = Kind::EquivocateEq;
    size_t count = 0;
    std::vector<uint32_t> skip_set;
    uint64_t rng_seed = 1;
};

struct AttackStats {
    size_t trials = 0;
    size_t successes = 0;
    double frequency() const { return trials ? double(successes) / double(trials) : 0.0; }
    // binomial 3-sigma interval around an expected rate
    static bool within_3sigma(size_t successes, size_t trials, double p);
};

/// Runs `trials` sessions of `n_instances` sequential EqCommitments where
/// the committer equivocates in t of them, guessing the challenge.
/// Success = every honesty check passed.
AttackStats attack_binding(size_t t, size_t trials, size_t n_instances, uint64_t seed);

} // namespace qotsim
