#pragma once

#include <array>
#include <memory>
#include <string>
#include <utility>

#include "qotsim/frame.hpp"

namespace qotsim {

class Duplex {
public:
    virtual ~Duplex() = default;
    virtual void send(const Frame& f) = 0;
    virtual Frame recv() = 0;   // throws TransportError on disconnect / malformed input
};

/// Two connected in-process endpoints backed by thread-safe queues.
std::pair<std::unique_ptr<Duplex>, std::unique_ptr<Duplex>> make_loopback_pair();

/// Blocking TCP endpoints; one connection per listener call.  TCP_NODELAY set.
std::unique_ptr<Duplex> tcp_listen_accept(uint16_t port);
std::unique_ptr<Duplex> tcp_connect(const std::string& host, uint16_t port);

/// Wraps a transport and folds every frame into per-direction digests so
/// both parties can compare full transcripts afterwards.
class TranscriptDuplex : public Duplex {
public:
    enum class Role { Initiator, Responder };
    TranscriptDuplex(std::unique_ptr<Duplex> inner, Role role);
    ~TranscriptDuplex() override;
    void send(const Frame& f) override;
    Frame recv() override;
    /// Digest over (initiator->responder stream, responder->initiator stream);
    /// identical on both ends for the same conversation.
    std::array<uint8_t, 32> digest() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

} // namespace qotsim
