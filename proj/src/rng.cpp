#include "qotsim/rng.hpp"

#include <cstring>
#include <stdexcept>

#include "qotsim/xof.hpp"

namespace qotsim {

namespace {
constexpr size_t kBlockBytes = 1024;

void put_le64(uint8_t* p, uint64_t v) {
    for (int i = 0; i < 8; ++i) p[i] = uint8_t(v >> (8 * i));
}
} // namespace

Rng::Rng(std::span<const uint8_t> key) {
    if (key.size() != kKeyBytes) throw std::invalid_argument("Rng: key must be 32 bytes");
    std::memcpy(key_.data(), key.data(), kKeyBytes);
}

Rng Rng::from_u64(uint64_t seed) {
    uint8_t le[8];
    put_le64(le, seed);
    auto key = shake256(le, kKeyBytes);
    return Rng(key);
}

Rng Rng::split(std::string_view label) const {
    std::vector<uint8_t> in(key_.begin(), key_.end());
    in.push_back(0x01);
    in.insert(in.end(), label.begin(), label.end());
    auto child = shake256(in, kKeyBytes);
    return Rng(child);
}

Rng Rng::split(uint64_t label) const {
    std::vector<uint8_t> in(key_.begin(), key_.end());
    in.push_back(0x02);
    in.resize(in.size() + 8);
    put_le64(in.data() + in.size() - 8, label);
    auto child = shake256(in, kKeyBytes);
    return Rng(child);
}

void Rng::refill() {
    std::vector<uint8_t> in(key_.begin(), key_.end());
    in.push_back(0x00);
    in.resize(in.size() + 8);
    put_le64(in.data() + in.size() - 8, counter_++);
    buf_ = shake256(in, kBlockBytes);
    pos_ = 0;
}

uint64_t Rng::next_u64() {
    if (pos_ + 8 > buf_.size()) refill();
    uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= uint64_t(buf_[pos_ + i]) << (8 * i);
    pos_ += 8;
    return v;
}

bool Rng::next_bit() {
    if (bits_left_ == 0) {
        bit_word_ = next_u64();
        bits_left_ = 64;
    }
    bool b = bit_word_ & 1;
    bit_word_ >>= 1;
    --bits_left_;
    return b;
}

double Rng::next_unit() {
    return double(next_u64() >> 11) * 0x1.0p-53;
}

uint64_t Rng::uniform(uint64_t n) {
    if (n == 0) throw std::invalid_argument("Rng::uniform: n must be positive");
    uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    uint64_t v;
    do { v = next_u64(); } while (v >= limit);
    return v % n;
}

BitVec Rng::bits(size_t n) {
    BitVec out(n);
    for (size_t i = 0; i < n; ++i)
        if (next_bit()) out.set(i, true);
    return out;
}

std::vector<uint8_t> Rng::bytes(size_t n) {
    std::vector<uint8_t> out;
    out.reserve(n);
    while (out.size() < n) {
        if (pos_ >= buf_.size()) refill();
        size_t take = std::min(n - out.size(), buf_.size() - pos_);
        out.insert(out.end(), buf_.begin() + pos_, buf_.begin() + pos_ + take);
        pos_ += take;
    }
    return out;
}

} // namespace qotsim
