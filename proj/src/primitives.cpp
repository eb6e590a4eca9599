#include "qotsim/primitives.hpp"

#include <stdexcept>

#include "qotsim/xof.hpp"

namespace qotsim {

BitVec prg_expand(const BitVec& seed, size_t out_bits) {
    if (out_bits == 0) throw std::invalid_argument("prg_expand: out_len must be >= 1");
    auto in = seed.to_bytes();
    return shake256_bits(in, out_bits);
}

size_t toeplitz_seed_bits(size_t input_bits, size_t output_bits) {
    return input_bits + output_bits - 1;
}

size_t ToeplitzSeed::seed_bits_for(size_t input_bits, size_t output_bits) const {
    return toeplitz_seed_bits(input_bits, output_bits);
}

BitVec universal_hash(const BitVec& seed, const BitVec& x, size_t out_bits) {
    const size_t m = x.size();
    if (m == 0) throw std::invalid_argument("universal_hash: empty input");
    if (seed.size() != toeplitz_seed_bits(m, out_bits))
        throw std::invalid_argument("universal_hash: seed length != m + l - 1");
    BitVec out(out_bits);
    const size_t words = (m + 63) / 64;
    for (size_t i = 0; i < out_bits; ++i) {
        uint64_t acc = 0;
        for (size_t w = 0; w < words; ++w) {
            uint64_t sw = seed.window64(i + w * 64);
            uint64_t xw = x.window64(w * 64);
            if (w == words - 1 && (m & 63))
                xw &= (uint64_t(1) << (m & 63)) - 1;
            acc ^= sw & xw;
        }
        if (__builtin_parityll(acc)) out.set(i, true);
    }
    return out;
}

BitVec naor_stretch(const BitVec& r) {
    return prg_expand(r, 3 * r.size());
}

NaorCommitment naor_commit(const BitVec& key, bool b, const BitVec& r) {
    if (key.size() != 3 * r.size())
        throw std::invalid_argument("naor_commit: |key| must equal 3*|r|");
    BitVec payload = naor_stretch(r);
    if (b) payload ^= key;
    return NaorCommitment{std::move(payload)};
}

bool naor_verify(const BitVec& key, const NaorCommitment& com, bool b, const BitVec& r) {
    if (key.size() != 3 * r.size() || com.payload.size() != key.size()) return false;
    return com.payload == naor_commit(key, b, r).payload;
}

int naor_open_with_seed(const BitVec& key, const BitVec& payload, const BitVec& r) {
    if (key.size() != 3 * r.size() || payload.size() != key.size()) return -1;
    BitVec w = naor_stretch(r);
    if (payload == w) return 0;
    if (payload == (w ^ key)) return 1;
    return -1;
}

} // namespace qotsim
