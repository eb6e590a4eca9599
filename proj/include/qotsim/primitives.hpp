#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "qotsim/bitvec.hpp"

namespace qotsim {

/// Default seed length of the post-quantum-safe PRG, in bits.
inline constexpr size_t kLambdaPqs = 256;

/// PRG expansion via SHAKE-256.  Prefix-consistent: expand(s, a) is a
/// prefix of expand(s, b) whenever a <= b.
BitVec prg_expand(const BitVec& seed, size_t out_bits);

/// Toeplitz 2-universal hash over GF(2).  The seed has |x| + out_bits - 1
/// bits; row i of the matrix is seed[i .. i+|x|) reversed, so the product
/// is out[i] = parity(seed_window_i AND x).
struct ToeplitzSeed {
    BitVec bits;
    size_t seed_bits_for(size_t input_bits, size_t output_bits) const;
};

size_t toeplitz_seed_bits(size_t input_bits, size_t output_bits);
BitVec universal_hash(const BitVec& seed, const BitVec& x, size_t out_bits);

/// Naor's commitment over the PRG: payload = (b ? key : 0) XOR W(r) where
/// W stretches the lambda-bit randomness r to 3*lambda bits.  The receiver
/// samples key; opening reveals (b, r).
struct NaorCommitment {
    BitVec payload;
};

BitVec naor_stretch(const BitVec& r);                         // W(r), 3|r| bits
NaorCommitment naor_commit(const BitVec& key, bool b, const BitVec& r);
bool naor_verify(const BitVec& key, const NaorCommitment& com, bool b, const BitVec& r);

/// Opens a payload against a known seed: returns 0, 1, or -1 when neither
/// bit verifies (dishonest payload/seed pair).
int naor_open_with_seed(const BitVec& key, const BitVec& payload, const BitVec& r);

} // namespace qotsim
