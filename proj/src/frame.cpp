#include "qotsim/frame.hpp"

namespace qotsim {

bool msg_type_known(uint8_t tag) {
    switch (MsgType(tag)) {
        case MsgType::ParamsDigest: case MsgType::Abort:
        case MsgType::NaorKey: case MsgType::NaorPayload:
        case MsgType::EqChallenge: case MsgType::EqOpen: case MsgType::EqMask:
        case MsgType::EreBb84Batch: case MsgType::EreSurvivors:
        case MsgType::EreChallengeSet: case MsgType::EreFamilyMeta:
        case MsgType::ErePairChallenge: case MsgType::ErePairReveal:
        case MsgType::ErePayloadCommit: case MsgType::EreOpen:
        case MsgType::OtBb84Batch: case MsgType::OtSurvivors:
        case MsgType::OtChallengeSet: case MsgType::OtBases:
        case MsgType::OtPartition: case MsgType::OtSyndromes:
        case MsgType::OtCiphertexts: case MsgType::OtAbort:
            return true;
    }
    return false;
}

const char* msg_type_name(MsgType t) {
    switch (t) {
        case MsgType::ParamsDigest: return "PARAMS_DIGEST";
        case MsgType::Abort: return "ABORT";
        case MsgType::NaorKey: return "NAOR_KEY";
        case MsgType::NaorPayload: return "NAOR_PAYLOAD";
        case MsgType::EqChallenge: return "EQ_CHALLENGE";
        case MsgType::EqOpen: return "EQ_OPEN";
        case MsgType::EqMask: return "EQ_MASK";
        case MsgType::EreBb84Batch: return "ERE_BB84_BATCH";
        case MsgType::EreSurvivors: return "ERE_SURVIVORS";
        case MsgType::EreChallengeSet: return "ERE_CHALLENGE_SET";
        case MsgType::EreFamilyMeta: return "ERE_FAMILY_META";
        case MsgType::ErePairChallenge: return "ERE_PAIR_CHALLENGE";
        case MsgType::ErePairReveal: return "ERE_PAIR_REVEAL";
        case MsgType::ErePayloadCommit: return "ERE_PAYLOAD_COMMIT";
        case MsgType::EreOpen: return "ERE_OPEN";
        case MsgType::OtBb84Batch: return "OT_BB84_BATCH";
        case MsgType::OtSurvivors: return "OT_SURVIVORS";
        case MsgType::OtChallengeSet: return "OT_CHALLENGE_SET";
        case MsgType::OtBases: return "OT_BASES";
        case MsgType::OtPartition: return "OT_PARTITION";
        case MsgType::OtSyndromes: return "OT_SYNDROMES";
        case MsgType::OtCiphertexts: return "OT_CIPHERTEXTS";
        case MsgType::OtAbort: return "OT_ABORT";
    }
    return "UNKNOWN";
}

std::vector<uint8_t> encode_frame(const Frame& f) {
    if (f.payload.size() > kMaxFramePayload)
        throw TransportError("encode_frame: payload too large");
    std::vector<uint8_t> out;
    out.reserve(5 + f.payload.size());
    out.push_back(uint8_t(f.type));
    uint32_t len = uint32_t(f.payload.size());
    for (int i = 0; i < 4; ++i) out.push_back(uint8_t(len >> (8 * i)));
    out.insert(out.end(), f.payload.begin(), f.payload.end());
    return out;
}

DecodeStatus decode_frame(std::span<const uint8_t> buf, Frame& out, size_t& consumed) {
    consumed = 0;
    if (buf.size() < 5) return DecodeStatus::NeedMore;
    if (!msg_type_known(buf[0])) return DecodeStatus::BadTag;
    uint32_t len = 0;
    for (int i = 0; i < 4; ++i) len |= uint32_t(buf[1 + i]) << (8 * i);
    if (len > kMaxFramePayload) return DecodeStatus::Oversize;
    if (buf.size() < 5 + size_t(len)) return DecodeStatus::NeedMore;
    out.type = MsgType(buf[0]);
    out.payload.assign(buf.begin() + 5, buf.begin() + 5 + len);
    consumed = 5 + size_t(len);
    return DecodeStatus::Ok;
}

void PayloadWriter::u32(uint32_t v) {
    for (int i = 0; i < 4; ++i) buf_.push_back(uint8_t(v >> (8 * i)));
}
void PayloadWriter::u64(uint64_t v) {
    for (int i = 0; i < 8; ++i) buf_.push_back(uint8_t(v >> (8 * i)));
}
void PayloadWriter::bytes(std::span<const uint8_t> b) {
    buf_.insert(buf_.end(), b.begin(), b.end());
}
void PayloadWriter::bitvec(const BitVec& v) {
    u32(uint32_t(v.size()));
    auto b = v.to_bytes();
    buf_.insert(buf_.end(), b.begin(), b.end());
}
void PayloadWriter::index_list(const std::vector<uint32_t>& idx) {
    u32(uint32_t(idx.size()));
    for (uint32_t v : idx) u32(v);
}

void PayloadReader::need(size_t n) const {
    if (pos_ + n > buf_.size()) throw TransportError("payload truncated");
}
uint8_t PayloadReader::u8() {
    need(1);
    return buf_[pos_++];
}
uint32_t PayloadReader::u32() {
    need(4);
    uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= uint32_t(buf_[pos_ + i]) << (8 * i);
    pos_ += 4;
    return v;
}
uint64_t PayloadReader::u64() {
    need(8);
    uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= uint64_t(buf_[pos_ + i]) << (8 * i);
    pos_ += 8;
    return v;
}
std::vector<uint8_t> PayloadReader::bytes(size_t n) {
    need(n);
    std::vector<uint8_t> out(buf_.begin() + pos_, buf_.begin() + pos_ + n);
    pos_ += n;
    return out;
}
BitVec PayloadReader::bitvec() {
    uint32_t nbits = u32();
    size_t nbytes = (size_t(nbits) + 7) / 8;
    need(nbytes);
    auto v = BitVec::from_bytes(buf_.subspan(pos_, nbytes), nbits);
    pos_ += nbytes;
    return v;
}
std::vector<uint32_t> PayloadReader::index_list() {
    uint32_t n = u32();
    if (size_t(n) * 4 > buf_.size() - pos_) throw TransportError("index list truncated");
    std::vector<uint32_t> out(n);
    for (uint32_t i = 0; i < n; ++i) out[i] = u32();
    return out;
}
void PayloadReader::expect_done() const {
    if (!done()) throw TransportError("trailing bytes in payload");
}

} // namespace qotsim
