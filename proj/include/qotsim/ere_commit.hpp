#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qotsim/bb84.hpp"
#include "qotsim/eq_commit.hpp"
#include "qotsim/ldpc.hpp"
#include "qotsim/rng.hpp"
#include "qotsim/transport.hpp"

namespace qotsim {

struct EreParams {
    size_t lambda_ex = 0;
    size_t m = 0;
    size_t k = 0;      // family pairs; 2k families of size m partition a prefix of E-bar
    size_t w = 0;      // parallel commitments per pair session
    double alpha = 0.0;
    double delta_slack = 0.05;   // honesty-check threshold is alpha + delta_slack
    ChannelModel channel;
    uint64_t channel_seed = 7;

    size_t capacity() const { return w * k; }
};

struct EreAbort : std::runtime_error {
    EreAbort(const std::string& stage_, size_t index_)
        : std::runtime_error("ere abort at " + stage_ + " (index " + std::to_string(index_) + ")"),
          stage(stage_), index(index_) {}
    std::string stage;
    size_t index = 0;
};

struct AdversaryStrategy;  // adversary.hpp

/// Committer-side session: everything needed to open any committed bit.
struct EreCommitterSession {
    size_t n_bits = 0;
    size_t w = 0;
    BitVec bits;                        // committed payload bits (padded to wk)
    std::vector<uint8_t> gamma;         // per pair r
    std::vector<uint8_t> u0, u1;        // per instance (r*w + q): the two random bits
    std::vector<BitVec> keys;           // per instance Naor key
    std::vector<BitVec> open_seed0;     // per instance gamma-bar side seed, delta = 0
    std::vector<BitVec> open_seed1;     // delta = 1
    std::vector<uint8_t> mask;          // e bits per instance
};

/// Receiver-side session: enough to verify any later opening.
struct EreReceiverSession {
    size_t n_bits = 0;
    std::vector<uint8_t> gamma;         // per pair r
    std::vector<BitVec> keys;           // per instance
    std::vector<BitVec> payload0;       // gamma-bar side payloads, delta = 0
    std::vector<BitVec> payload1;
    std::vector<uint8_t> mask;          // e bits
};

/// Runs the commit phase end to end for the committer of `bits`.
/// `adv`, when set, perturbs exactly the steps its strategy names.
EreCommitterSession ere_commit_committer(Duplex& chan, const BitVec& bits,
                                         const EreParams& params, Rng& rng,
                                         const AdversaryStrategy* adv = nullptr);

EreReceiverSession ere_commit_receiver(Duplex& chan, const EreParams& params, Rng& rng);

/// Opens the named bit indices (committer side).
void ere_decommit_committer(Duplex& chan, const EreCommitterSession& s,
                            const std::vector<uint32_t>& indices, Rng& rng);

/// Verifies openings; one result per requested index (nullopt = reject).
std::vector<std::optional<bool>> ere_decommit_receiver(Duplex& chan,
                                                       const EreReceiverSession& s,
                                                       const std::vector<uint32_t>& indices);

} // namespace qotsim
