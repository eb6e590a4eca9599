#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qotsim/adversary.hpp"
#include "qotsim/bb84.hpp"
#include "qotsim/ere_commit.hpp"
#include "qotsim/transport.hpp"

namespace qotsim {

struct SessionConfig {
    size_t lambda_ot = 0;
    size_t lambda_ex = 0;
    size_t m = 0;
    size_t k = 0;
    size_t w = 0;
    size_t msg_len = kLambdaPqs;
    size_t n_ot = 1;               // multi-OT count; 1 = plain Algorithm-5 run
    size_t v = 0;                  // multi-OT block size (0 = whole T-bar)
    double alpha = 0.0;
    double vartheta = 0.0;
    double loss_prob = 0.0;
    double delta_slack = 0.05;
    uint64_t channel_seed = 7;
    bool toy = false;

    ChannelModel channel() const { return ChannelModel{alpha, loss_prob, vartheta}; }
    EreParams ere() const;
    std::array<uint8_t, 32> digest() const;
    void validate() const;

    static SessionConfig toy_profile(size_t lambda_ot, double alpha = 0.0,
                                     double vartheta = 0.0, double loss = 0.0);
};

struct OtAbort : std::runtime_error {
    OtAbort(const std::string& stage_, const std::string& detail_)
        : std::runtime_error("ot abort at " + stage_ + ": " + detail_), stage(stage_) {}
    std::string stage;
};

struct IndexPartition {
    std::vector<uint32_t> i0, i1;   // original instance indices, ascending
};

struct OtAliceResult {
    bool completed = false;         // END
    std::string abort_stage;
    std::array<uint8_t, 32> transcript{};
    // introspection for tests
    std::vector<IndexPartition> partitions;
    std::vector<BitVec> sent_frames_m0_keys;   // x_0 per partition (debug)
};

struct OtBobResult {
    bool completed = false;
    std::string abort_stage;
    bool choice = false;
    std::vector<BitVec> messages;   // recovered m_b per distilled OT
    std::vector<bool> decode_failed;
    std::array<uint8_t, 32> transcript{};
};

struct OtSessionResult {
    OtAliceResult alice;
    OtBobResult bob;
};

/// Test hooks: draw-preserving overrides of Bob's measurement stage.
struct OtTestHooks {
    const BitVec* bob_bases = nullptr;      // forced measurement bases
    const BitVec* bob_outcomes = nullptr;   // forced outcomes (skips measure/rng)
    bool force_decode_failure = false;
};

void ot_alice(Duplex& chan, const std::vector<BitVec>& m0, const std::vector<BitVec>& m1,
              const SessionConfig& cfg, Rng rng, OtAliceResult& out);

void ot_bob(Duplex& chan, const std::vector<bool>& choices, const SessionConfig& cfg,
            Rng rng, OtBobResult& out, const AdversaryStrategy* adv = nullptr,
            const OtTestHooks* hooks = nullptr);

/// Drives both roles over an in-process loopback pair (two threads).
OtSessionResult run_ot(const BitVec& m0, const BitVec& m1, bool b,
                       const SessionConfig& cfg, uint64_t alice_seed, uint64_t bob_seed,
                       const AdversaryStrategy* adv = nullptr,
                       const OtTestHooks* hooks = nullptr);

OtSessionResult run_multi_ot(const std::vector<BitVec>& m0, const std::vector<BitVec>& m1,
                             const std::vector<bool>& choices, const SessionConfig& cfg,
                             uint64_t alice_seed, uint64_t bob_seed);

// --- spec-level helper operations -------------------------------------------

/// Uniform size-`size` subset of [0, universe), ascending.
std::vector<uint32_t> sample_challenge_set(size_t universe, size_t size, Rng& rng);

/// Pairwise-disjoint partitions for multi-OT distillation.  Throws
/// std::invalid_argument("InsufficientIndices") when a pool is short.
std::vector<IndexPartition> partition_for_multi_ot(const std::vector<uint32_t>& tbar,
                                                   const BitVec& theta, const BitVec& theta_hat,
                                                   size_t n_ot, size_t v,
                                                   const std::vector<bool>& choices);

/// Step-9 encryption: c_b = PRG(h(s_b, x_b)) XOR m_b.
struct OtCiphertexts {
    BitVec s0, c0, s1, c1;
};
OtCiphertexts encrypt_messages(const BitVec& x0, const BitVec& x1,
                               const BitVec& s0, const BitVec& s1,
                               const BitVec& m0, const BitVec& m1);
BitVec decrypt_message(const BitVec& x, const BitVec& seed, const BitVec& ciphertext);

} // namespace qotsim
