#pragma once

#include <cstdint>
#include <cstddef>
#include <span>
#include <vector>

#include "qotsim/bitvec.hpp"

namespace qotsim {

/// SHAKE-256 in one-shot XOF mode.  Outputs of different lengths for the
/// same input agree on their common prefix (sponge squeezing), which the
/// PRG contract relies on.
std::vector<uint8_t> shake256(std::span<const uint8_t> input, size_t out_bytes);

/// XOF expansion to an exact bit count (MSB-first within each byte).
BitVec shake256_bits(std::span<const uint8_t> input, size_t out_bits);

} // namespace qotsim
