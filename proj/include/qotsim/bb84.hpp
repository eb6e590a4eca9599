#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "qotsim/rng.hpp"

namespace qotsim {

enum class Basis : uint8_t { Rectilinear = 0, Diagonal = 1 };

/// One prepared conjugate-coding symbol.  bit/basis are fixed at
/// preparation; lost/multiphoton are set by the channel only.
struct Bb84Instance {
    uint8_t bit = 0;
    Basis basis = Basis::Rectilinear;
    bool lost = false;
    bool multiphoton = false;

    bool operator==(const Bb84Instance&) const = default;
};

struct ChannelModel {
    double alpha = 0.0;       // bit-flip probability on matched-basis measurement
    double loss_prob = 0.0;
    double vartheta = 0.0;    // per-instance multiphoton leak probability

    void validate(double delta_slack = 0.0) const;
};

struct Lost {};
using MeasureResult = std::optional<uint8_t>;   // nullopt == Lost

std::vector<Bb84Instance> prepare_batch(size_t n, Rng& rng);

/// Marks loss/multiphoton per instance; never touches bit or basis.  The
/// bit-flip noise is applied at measurement so the matched-basis error
/// rate equals alpha exactly.
std::vector<Bb84Instance> transmit(std::vector<Bb84Instance> batch,
                                   const ChannelModel& model, Rng& rng);

MeasureResult measure(const Bb84Instance& inst, Basis basis,
                      const ChannelModel& model, Rng& rng);

/// 1-byte packing per instance: bit | basis<<1 | lost<<2 | multiphoton<<3.
std::vector<uint8_t> serialize_batch(const std::vector<Bb84Instance>& batch);
std::vector<Bb84Instance> deserialize_batch(std::span<const uint8_t> bytes);

} // namespace qotsim
