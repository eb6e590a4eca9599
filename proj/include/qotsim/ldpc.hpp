#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "qotsim/bitvec.hpp"

namespace qotsim {

/// Regular-ish LDPC code with a q x n parity-check matrix generated
/// deterministically from a 256-bit seed.  Column weight 3; row weights
/// balance to 3n/q; 4-cycles are avoided greedily while row pairs remain.
struct LinearCode {
    size_t n = 0;
    size_t q = 0;
    std::array<uint8_t, 32> seed{};
    double design_error_rate = 0.006;
    std::vector<std::vector<uint32_t>> row_cols;  // check -> variable indices
    std::vector<std::vector<uint32_t>> col_rows;  // variable -> check indices
};

LinearCode build_code(size_t n, size_t q, const std::array<uint8_t, 32>& seed,
                      double design_error_rate = 0.006);

BitVec syndrome(const LinearCode& code, const BitVec& x);

/// Finds a string with the target syndrome within max_flips of y, or
/// nothing (DecodeFailure is a value, not a fault).  Exhaustive bounded
/// syndrome decoding for n <= 24; belief propagation (50 iterations,
/// early exit) above.
std::optional<BitVec> decode(const LinearCode& code, const BitVec& y,
                             const BitVec& target_syndrome, size_t max_flips);

/// Deterministic per-role code seed derived from a session tag.
std::array<uint8_t, 32> code_seed_from_label(std::string_view label);

} // namespace qotsim
