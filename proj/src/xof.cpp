#include "qotsim/xof.hpp"

#include <openssl/evp.h>

#include <stdexcept>

namespace qotsim {

namespace {

struct MdCtx {
    EVP_MD_CTX* ctx;
    MdCtx() : ctx(EVP_MD_CTX_new()) {
        if (!ctx) throw std::runtime_error("EVP_MD_CTX_new failed");
    }
    ~MdCtx() { EVP_MD_CTX_free(ctx); }
};

const EVP_MD* shake_md() {
    static const EVP_MD* md = EVP_shake256();
    return md;
}

} // namespace

std::vector<uint8_t> shake256(std::span<const uint8_t> input, size_t out_bytes) {
    thread_local MdCtx tls;
    std::vector<uint8_t> out(out_bytes);
    if (EVP_DigestInit_ex(tls.ctx, shake_md(), nullptr) != 1 ||
        EVP_DigestUpdate(tls.ctx, input.data(), input.size()) != 1 ||
        EVP_DigestFinalXOF(tls.ctx, out.data(), out_bytes) != 1)
        throw std::runtime_error("SHAKE-256 evaluation failed");
    return out;
}

BitVec shake256_bits(std::span<const uint8_t> input, size_t out_bits) {
    auto bytes = shake256(input, (out_bits + 7) / 8);
    return BitVec::from_bytes(bytes, out_bits);
}

} // namespace qotsim
