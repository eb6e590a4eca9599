#include "qotsim/bb84.hpp"

#include <stdexcept>

namespace qotsim {

void ChannelModel::validate(double delta_slack) const {
    if (alpha < 0 || alpha >= 0.5)
        throw std::invalid_argument("ChannelModel: alpha must be in [0, 0.5)");
    if (alpha + delta_slack > 0.5)
        throw std::invalid_argument("ChannelModel: alpha + delta must stay <= 1/2");
    if (loss_prob < 0 || loss_prob >= 1)
        throw std::invalid_argument("ChannelModel: loss_prob must be in [0, 1)");
    if (vartheta < 0 || vartheta >= 1)
        throw std::invalid_argument("ChannelModel: vartheta must be in [0, 1)");
}

std::vector<Bb84Instance> prepare_batch(size_t n, Rng& rng) {
    if (n == 0) throw std::invalid_argument("prepare_batch: n must be >= 1");
    std::vector<Bb84Instance> batch(n);
    for (auto& inst : batch) {
        inst.bit = rng.next_bit() ? 1 : 0;
        inst.basis = rng.next_bit() ? Basis::Diagonal : Basis::Rectilinear;
    }
    return batch;
}

std::vector<Bb84Instance> transmit(std::vector<Bb84Instance> batch,
                                   const ChannelModel& model, Rng& rng) {
    if (batch.empty()) throw std::invalid_argument("transmit: empty batch");
    model.validate();
    for (auto& inst : batch) {
        if (model.loss_prob > 0 && rng.next_unit() < model.loss_prob) inst.lost = true;
        if (model.vartheta > 0 && rng.next_unit() < model.vartheta) inst.multiphoton = true;
    }
    return batch;
}

MeasureResult measure(const Bb84Instance& inst, Basis basis,
                      const ChannelModel& model, Rng& rng) {
    if (inst.lost) return std::nullopt;
    if (basis == inst.basis) {
        uint8_t bit = inst.bit;
        if (model.alpha > 0 && rng.next_unit() < model.alpha) bit ^= 1;
        return bit;
    }
    return uint8_t(rng.next_bit() ? 1 : 0);
}

std::vector<uint8_t> serialize_batch(const std::vector<Bb84Instance>& batch) {
    std::vector<uint8_t> out;
    out.reserve(batch.size());
    for (const auto& inst : batch)
        out.push_back(uint8_t(inst.bit | (uint8_t(inst.basis) << 1) |
                              (uint8_t(inst.lost) << 2) | (uint8_t(inst.multiphoton) << 3)));
    return out;
}

std::vector<Bb84Instance> deserialize_batch(std::span<const uint8_t> bytes) {
    std::vector<Bb84Instance> batch;
    batch.reserve(bytes.size());
    for (uint8_t b : bytes) {
        if (b & 0xF0) throw std::invalid_argument("deserialize_batch: reserved bits set");
        Bb84Instance inst;
        inst.bit = b & 1;
        inst.basis = (b >> 1) & 1 ? Basis::Diagonal : Basis::Rectilinear;
        inst.lost = (b >> 2) & 1;
        inst.multiphoton = (b >> 3) & 1;
        batch.push_back(inst);
    }
    return batch;
}

} // namespace qotsim
