#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "qotsim/bitvec.hpp"

namespace qotsim {

struct TransportError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class MsgType : uint8_t {
    ParamsDigest     = 0x01,
    Abort            = 0x02,
    NaorKey          = 0x10,
    NaorPayload      = 0x11,
    EqChallenge      = 0x12,
    EqOpen           = 0x13,
    EqMask           = 0x14,
    EreBb84Batch     = 0x20,
    EreSurvivors     = 0x21,
    EreChallengeSet  = 0x22,
    EreFamilyMeta    = 0x23,
    ErePairChallenge = 0x24,
    ErePairReveal    = 0x25,
    ErePayloadCommit = 0x26,
    EreOpen          = 0x27,
    OtBb84Batch      = 0x30,
    OtSurvivors      = 0x31,
    OtChallengeSet   = 0x32,
    OtBases          = 0x33,
    OtPartition      = 0x34,
    OtSyndromes      = 0x35,
    OtCiphertexts    = 0x36,
    OtAbort          = 0x37,
};

bool msg_type_known(uint8_t tag);
const char* msg_type_name(MsgType t);

inline constexpr size_t kMaxFramePayload = (size_t(1) << 30);  // 1 GiB sanity cap

struct Frame {
    MsgType type{};
    std::vector<uint8_t> payload;

    bool operator==(const Frame&) const = default;
};

/// tag (1 byte) | length (u32 LE) | payload
std::vector<uint8_t> encode_frame(const Frame& f);

enum class DecodeStatus { Ok, NeedMore, BadTag, Oversize };

/// Consumes nothing unless a full, valid frame is present.
DecodeStatus decode_frame(std::span<const uint8_t> buf, Frame& out, size_t& consumed);

// --- payload (de)serialization helpers --------------------------------------

class PayloadWriter {
public:
    void u8(uint8_t v) { buf_.push_back(v); }
    void u32(uint32_t v);
    void u64(uint64_t v);
    void bytes(std::span<const uint8_t> b);
    void bitvec(const BitVec& v);                 // u32 bitlen + MSB-first bytes
    void index_list(const std::vector<uint32_t>& idx);
    std::vector<uint8_t> take() { return std::move(buf_); }

private:
    std::vector<uint8_t> buf_;
};

class PayloadReader {
public:
    explicit PayloadReader(std::span<const uint8_t> buf) : buf_(buf) {}
    uint8_t u8();
    uint32_t u32();
    uint64_t u64();
    std::vector<uint8_t> bytes(size_t n);
    BitVec bitvec();
    std::vector<uint32_t> index_list();
    bool done() const { return pos_ == buf_.size(); }
    void expect_done() const;

private:
    void need(size_t n) const;
    std::span<const uint8_t> buf_;
    size_t pos_ = 0;
};

} // namespace qotsim
