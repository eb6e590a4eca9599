#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "qotsim/bitvec.hpp"

namespace qotsim {

/// Deterministic, seedable, splittable generator.  Output blocks are
/// SHAKE-256(key || 0x00 || counter); child keys are SHAKE-256(key || 0x01
/// || label).  Same key, same draw sequence, same output — bit for bit.
class Rng {
public:
    static constexpr size_t kKeyBytes = 32;

    explicit Rng(std::span<const uint8_t> key);
    static Rng from_u64(uint64_t seed);

    /// Independent child stream; parent state is untouched.
    Rng split(std::string_view label) const;
    Rng split(uint64_t label) const;

    uint64_t next_u64();
    bool next_bit();
    double next_unit();                 // [0, 1)
    uint64_t uniform(uint64_t n);       // [0, n), unbiased
    BitVec bits(size_t n);
    std::vector<uint8_t> bytes(size_t n);

    std::span<const uint8_t> key() const { return key_; }

private:
    void refill();

    std::array<uint8_t, kKeyBytes> key_{};
    uint64_t counter_ = 0;
    std::vector<uint8_t> buf_;
    size_t pos_ = 0;
    uint64_t bit_word_ = 0;
    int bits_left_ = 0;
};

} // namespace qotsim
