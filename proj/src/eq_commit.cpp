#include "qotsim/eq_commit.hpp"

namespace qotsim {

EqSeedQuad EqSeedQuad::fresh(Rng& rng, size_t seed_bits) {
    EqSeedQuad q;
    for (int g = 0; g < 2; ++g)
        for (int d = 0; d < 2; ++d)
            q.p[g][d] = rng.bits(seed_bits);
    return q;
}

namespace {

Frame expect(Duplex& chan, MsgType t) {
    Frame f = chan.recv();
    if (f.type == MsgType::Abort) {
        PayloadReader rd(f.payload);
        auto stage = rd.bytes(f.payload.size());
        throw ReceiverAbort(std::string(stage.begin(), stage.end()));
    }
    if (f.type != t)
        throw TransportError(std::string("unexpected frame: got ") + msg_type_name(f.type) +
                             ", wanted " + msg_type_name(t));
    return f;
}

void send_abort(Duplex& chan, const std::string& stage) {
    PayloadWriter w;
    w.bytes(std::span<const uint8_t>(reinterpret_cast<const uint8_t*>(stage.data()),
                                     stage.size()));
    chan.send(Frame{MsgType::Abort, w.take()});
}

} // namespace

EqCommitterState eq_commit_committer(Duplex& chan, bool b, const EqSeedQuad& seeds,
                                     Rng& rng, std::optional<uint8_t> cheat_guess) {
    EqCommitterState st;
    st.seeds = seeds;
    st.bit = b;

    Frame kf = expect(chan, MsgType::NaorKey);
    {
        PayloadReader rd(kf.payload);
        st.key = rd.bitvec();
        rd.expect_done();
    }

    st.u[0] = rng.next_bit();
    st.u[1] = rng.next_bit();

    PayloadWriter pw;
    for (int g = 0; g < 2; ++g)
        for (int d = 0; d < 2; ++d) {
            bool bit = st.u[g];
            if (cheat_guess && g != *cheat_guess && d == 1) bit = !st.u[g];
            pw.bitvec(naor_commit(st.key, bit, seeds.p[g][d]).payload);
        }
    chan.send(Frame{MsgType::NaorPayload, pw.take()});

    Frame cf = expect(chan, MsgType::EqChallenge);
    {
        PayloadReader rd(cf.payload);
        st.gamma = rd.u8() & 1;
        rd.expect_done();
    }

    PayloadWriter ow;
    ow.u8(st.u[st.gamma]);
    ow.u8(st.u[st.gamma]);   // honest committer opens both to the same bit
    ow.bitvec(seeds.p[st.gamma][0]);
    ow.bitvec(seeds.p[st.gamma][1]);
    chan.send(Frame{MsgType::EqOpen, ow.take()});

    st.e = uint8_t(b) ^ st.u[1 - st.gamma];
    PayloadWriter mw;
    mw.u8(st.e);
    chan.send(Frame{MsgType::EqMask, mw.take()});
    return st;
}

EqCommitTranscript eq_commit_receiver(Duplex& chan, Rng& rng) {
    EqCommitTranscript t;
    t.key = rng.bits(3 * kLambdaPqs);
    PayloadWriter kw;
    kw.bitvec(t.key);
    chan.send(Frame{MsgType::NaorKey, kw.take()});

    Frame pf = expect(chan, MsgType::NaorPayload);
    {
        PayloadReader rd(pf.payload);
        for (int g = 0; g < 2; ++g)
            for (int d = 0; d < 2; ++d) t.payload[g][d] = rd.bitvec();
        rd.expect_done();
    }

    t.gamma = rng.next_bit() ? 1 : 0;
    PayloadWriter cw;
    cw.u8(t.gamma);
    chan.send(Frame{MsgType::EqChallenge, cw.take()});

    Frame of = expect(chan, MsgType::EqOpen);
    {
        PayloadReader rd(of.payload);
        uint8_t u0 = rd.u8() & 1, u1 = rd.u8() & 1;
        BitVec p0 = rd.bitvec(), p1 = rd.bitvec();
        rd.expect_done();
        bool ok0 = naor_verify(t.key, NaorCommitment{t.payload[t.gamma][0]}, u0, p0);
        bool ok1 = naor_verify(t.key, NaorCommitment{t.payload[t.gamma][1]}, u1, p1);
        if (!ok0 || !ok1 || u0 != u1) {
            send_abort(chan, "challenge-check");
            throw ReceiverAbort("challenge-check");
        }
    }

    Frame mf = expect(chan, MsgType::EqMask);
    {
        PayloadReader rd(mf.payload);
        t.e = rd.u8() & 1;
        rd.expect_done();
    }
    return t;
}

void eq_decommit_committer(Duplex& chan, const EqCommitterState& st, Rng& rng) {
    uint8_t delta = rng.next_bit() ? 1 : 0;
    PayloadWriter w;
    w.u8(uint8_t(st.bit));
    w.u8(delta);
    w.u8(st.u[1 - st.gamma]);
    w.bitvec(st.seeds.p[1 - st.gamma][delta]);
    chan.send(Frame{MsgType::EqOpen, w.take()});
}

EqOpenOutcome eq_decommit_receiver(Duplex& chan, const EqCommitTranscript& t, bool* bit_out) {
    Frame f = expect(chan, MsgType::EqOpen);
    PayloadReader rd(f.payload);
    uint8_t b = rd.u8() & 1;
    uint8_t delta = rd.u8() & 1;
    uint8_t u = rd.u8() & 1;
    BitVec seed = rd.bitvec();
    rd.expect_done();
    if (!naor_verify(t.key, NaorCommitment{t.payload[1 - t.gamma][delta]}, u, seed))
        return EqOpenOutcome::BadOpening;
    if (u != (b ^ t.e)) return EqOpenOutcome::MaskMismatch;
    if (bit_out) *bit_out = b;
    return EqOpenOutcome::Accept;
}

} // namespace qotsim
