#pragma once

#include <optional>
#include <string>

#include "qotsim/primitives.hpp"
#include "qotsim/rng.hpp"
#include "qotsim/transport.hpp"

namespace qotsim {

/// Seeds p[gamma][delta] for the four base commitments of one instance.
struct EqSeedQuad {
    BitVec p[2][2];

    static EqSeedQuad fresh(Rng& rng, size_t seed_bits = kLambdaPqs);
};

/// Receiver-side record of one completed commit phase.
struct EqCommitTranscript {
    BitVec key;                 // Naor receiver key, shared by the four commitments
    BitVec payload[2][2];
    uint8_t gamma = 0;          // challenge that was asked
    uint8_t e = 0;              // masked bit b XOR u^{gamma-bar}
};

/// Committer-side record needed to open later.
struct EqCommitterState {
    EqSeedQuad seeds;
    BitVec key;
    uint8_t u[2] = {0, 0};
    uint8_t gamma = 0;
    uint8_t e = 0;
    bool bit = false;
};

struct ReceiverAbort : std::runtime_error {
    explicit ReceiverAbort(const std::string& stage)
        : std::runtime_error("eq-commit receiver abort at " + stage), stage(stage) {}
    std::string stage;
};

/// Commit phase, committer side.  cheat_guess, when set, commits the pair
/// it names honestly and plants (u, 1-u) in the other pair -- the
/// challenge-guess attack; it survives the honesty check iff the guess
/// was right.
EqCommitterState eq_commit_committer(Duplex& chan, bool b, const EqSeedQuad& seeds,
                                     Rng& rng, std::optional<uint8_t> cheat_guess = {});

/// Commit phase, receiver side.  Throws ReceiverAbort{challenge-check} when
/// the opened pair disagrees.
EqCommitTranscript eq_commit_receiver(Duplex& chan, Rng& rng);

enum class EqOpenOutcome { Accept, BadOpening, MaskMismatch };

void eq_decommit_committer(Duplex& chan, const EqCommitterState& st, Rng& rng);

/// Decommit phase, receiver side; on Accept the opened bit is written out.
EqOpenOutcome eq_decommit_receiver(Duplex& chan, const EqCommitTranscript& t, bool* bit_out);

} // namespace qotsim
