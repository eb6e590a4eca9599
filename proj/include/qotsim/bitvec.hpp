#pragma once

#include <cstdint>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <stdexcept>
#include <vector>

namespace qotsim {

/// Packed bit string.  Bit i lives at words()[i/64], bit (i%64), LSB-first
/// internally; wire serialization is MSB-first per byte with zero padding
/// to the byte boundary (lengths always travel separately).
class BitVec {
public:
    BitVec() = default;
    explicit BitVec(size_t nbits) : words_((nbits + 63) / 64, 0), nbits_(nbits) {}

    static BitVec from_bytes(std::span<const uint8_t> bytes, size_t nbits) {
        if (bytes.size() * 8 < nbits)
            throw std::invalid_argument("BitVec::from_bytes: buffer too short");
        BitVec v(nbits);
        for (size_t i = 0; i < nbits; ++i) {
            uint8_t byte = bytes[i / 8];
            if ((byte >> (7 - (i % 8))) & 1) v.set(i, true);
        }
        return v;
    }

    static BitVec from_string(std::string_view s) {
        BitVec v(s.size());
        for (size_t i = 0; i < s.size(); ++i) {
            if (s[i] == '1') v.set(i, true);
            else if (s[i] != '0') throw std::invalid_argument("BitVec::from_string: not a bit");
        }
        return v;
    }

    size_t size() const { return nbits_; }
    bool empty() const { return nbits_ == 0; }

    bool get(size_t i) const { return (words_[i >> 6] >> (i & 63)) & 1; }
    void set(size_t i, bool b) {
        uint64_t mask = uint64_t(1) << (i & 63);
        if (b) words_[i >> 6] |= mask; else words_[i >> 6] &= ~mask;
    }
    void flip(size_t i) { words_[i >> 6] ^= uint64_t(1) << (i & 63); }

    BitVec& operator^=(const BitVec& o) {
        if (o.nbits_ != nbits_) throw std::invalid_argument("BitVec xor: length mismatch");
        for (size_t w = 0; w < words_.size(); ++w) words_[w] ^= o.words_[w];
        return *this;
    }
    friend BitVec operator^(BitVec a, const BitVec& b) { a ^= b; return a; }
    bool operator==(const BitVec&) const = default;

    size_t popcount() const {
        size_t n = 0;
        for (uint64_t w : words_) n += size_t(__builtin_popcountll(w));
        return n;
    }

    /// Parity of the AND with another vector of equal length.
    bool parity_and(const BitVec& o) const {
        if (o.nbits_ != nbits_) throw std::invalid_argument("BitVec parity_and: length mismatch");
        uint64_t acc = 0;
        for (size_t w = 0; w < words_.size(); ++w) acc ^= words_[w] & o.words_[w];
        return __builtin_parityll(acc);
    }

    /// 64 bits starting at bit offset pos, zero-padded past the end.
    uint64_t window64(size_t pos) const {
        if (pos >= nbits_) return 0;
        size_t w = pos >> 6, sh = pos & 63;
        uint64_t lo = words_[w] >> sh;
        uint64_t hi = (sh && w + 1 < words_.size()) ? (words_[w + 1] << (64 - sh)) : 0;
        uint64_t out = lo | hi;
        size_t avail = nbits_ - pos;
        if (avail < 64) out &= (uint64_t(1) << avail) - 1;
        return out;
    }

    BitVec slice(size_t pos, size_t len) const {
        if (pos + len > nbits_) throw std::out_of_range("BitVec::slice");
        BitVec out(len);
        for (size_t w = 0; w * 64 < len; ++w) {
            uint64_t chunk = window64(pos + w * 64);
            size_t rem = len - w * 64;
            if (rem < 64) chunk &= (uint64_t(1) << rem) - 1;
            out.words_[w] = chunk;
        }
        return out;
    }

    void push_back(bool b) {
        if (nbits_ % 64 == 0) words_.push_back(0);
        ++nbits_;
        set(nbits_ - 1, b);
    }

    void append(const BitVec& o) {
        for (size_t i = 0; i < o.nbits_; ++i) push_back(o.get(i));
    }

    std::vector<uint8_t> to_bytes() const {
        std::vector<uint8_t> out((nbits_ + 7) / 8, 0);
        for (size_t i = 0; i < nbits_; ++i)
            if (get(i)) out[i / 8] |= uint8_t(1) << (7 - (i % 8));
        return out;
    }

    std::string to_string() const {
        std::string s(nbits_, '0');
        for (size_t i = 0; i < nbits_; ++i)
            if (get(i)) s[i] = '1';
        return s;
    }

    std::span<const uint64_t> words() const { return words_; }

private:
    std::vector<uint64_t> words_;
    size_t nbits_ = 0;
};

inline size_t hamming_distance(const BitVec& a, const BitVec& b) {
    return (a ^ b).popcount();
}

} // namespace qotsim
