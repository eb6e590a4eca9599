#include "qotsim/ere_commit.hpp"

#include <algorithm>

#include "qotsim/adversary.hpp"
#include "qotsim/primitives.hpp"

namespace qotsim {

namespace {

Frame expect(Duplex& chan, MsgType t, const char* what) {
    Frame f = chan.recv();
    if (f.type == MsgType::Abort) {
        std::string stage(f.payload.begin(), f.payload.end());
        throw EreAbort("peer:" + stage, 0);
    }
    if (f.type != t)
        throw TransportError(std::string("unexpected frame in ") + what + ": " +
                             msg_type_name(f.type));
    return f;
}

void abort_session(Duplex& chan, const std::string& stage, size_t index) {
    PayloadWriter w;
    w.bytes(std::span<const uint8_t>(reinterpret_cast<const uint8_t*>(stage.data()),
                                     stage.size()));
    chan.send(Frame{MsgType::Abort, w.take()});
    throw EreAbort(stage, index);
}

// Sample `size` indices without replacement from `pool`, ascending.
std::vector<uint32_t> sample_subset(const std::vector<uint32_t>& pool, size_t size, Rng& rng) {
    std::vector<uint32_t> shuffled = pool;
    for (size_t i = shuffled.size(); i > 1; --i)
        std::swap(shuffled[i - 1], shuffled[rng.uniform(i)]);
    shuffled.resize(size);
    std::sort(shuffled.begin(), shuffled.end());
    return shuffled;
}

LinearCode family_code(size_t m) {
    size_t q = std::max<size_t>(1, (m + 9) / 10);
    return build_code(m, q, code_seed_from_label("qotsim-ere-family-syndrome"));
}

} // namespace

EreCommitterSession ere_commit_committer(Duplex& chan, const BitVec& bits,
                                         const EreParams& params, Rng& rng,
                                         const AdversaryStrategy* adv) {
    const size_t n4 = 4 * params.lambda_ex;
    const size_t wk = params.capacity();
    if (bits.size() > wk) throw std::invalid_argument("ere: more bits than wk slots");

    EreCommitterSession sess;
    sess.n_bits = bits.size();
    sess.w = params.w;
    sess.bits = bits;
    while (sess.bits.size() < wk) sess.bits.push_back(false);

    // 1. prepare and "send" the BB84 batch
    BitVec x(n4);
    std::vector<Bb84Instance> batch(n4);
    for (size_t i = 0; i < n4; ++i) {
        batch[i].bit = rng.next_bit() ? 1 : 0;
        batch[i].basis = rng.next_bit() ? Basis::Diagonal : Basis::Rectilinear;
        if (batch[i].bit) x.set(i, true);
    }
    {
        auto bytes = serialize_batch(batch);
        PayloadWriter w;
        w.u32(uint32_t(n4));
        w.bytes(bytes);
        chan.send(Frame{MsgType::EreBb84Batch, w.take()});
    }

    // 2. survivors announced by the receiver
    BitVec survivors;
    {
        Frame f = expect(chan, MsgType::EreSurvivors, "ere step 2");
        PayloadReader rd(f.payload);
        survivors = rd.bitvec();
        rd.expect_done();
        if (survivors.size() != n4) abort_session(chan, "survivor-mask-size", 0);
    }
    std::vector<uint32_t> sv;
    for (uint32_t i = 0; i < n4; ++i)
        if (survivors.get(i)) sv.push_back(i);

    // 3. receiver commits to measured (x-hat, theta-hat) pairs; we take the
    // eq-receiver role twice per surviving instance
    std::vector<EqCommitTranscript> step3(2 * sv.size());
    for (size_t j = 0; j < 2 * sv.size(); ++j) {
        try {
            step3[j] = eq_commit_receiver(chan, rng);
        } catch (const ReceiverAbort& a) {
            throw EreAbort(std::string("step3-") + a.stage, j);
        }
    }

    // 4. challenge half of the surviving instances
    std::vector<uint32_t> challenge = sample_subset(sv, sv.size() / 2, rng);
    BitVec emask(n4);
    for (uint32_t i : challenge) emask.set(i, true);
    {
        PayloadWriter w;
        w.bitvec(emask);
        chan.send(Frame{MsgType::EreChallengeSet, w.take()});
    }

    // 5-6. receive openings for E; check matched-basis agreement up to alpha+delta
    size_t matched = 0, mismatched = 0;
    {
        std::vector<size_t> pos_of(n4, SIZE_MAX);
        for (size_t p = 0; p < sv.size(); ++p) pos_of[sv[p]] = p;
        for (uint32_t i : challenge) {
            size_t p = pos_of[i];
            bool xh = false, th = false;
            auto r1 = eq_decommit_receiver(chan, step3[2 * p], &xh);
            auto r2 = eq_decommit_receiver(chan, step3[2 * p + 1], &th);
            if (r1 != EqOpenOutcome::Accept || r2 != EqOpenOutcome::Accept)
                abort_session(chan, "challenge-open", i);
            Basis bh = th ? Basis::Diagonal : Basis::Rectilinear;
            if (bh == batch[i].basis) {
                ++matched;
                if (xh != bool(x.get(i))) ++mismatched;
            }
        }
        double limit = (params.alpha + params.delta_slack) * double(std::max<size_t>(matched, 1));
        if (double(mismatched) > limit) abort_session(chan, "bb84-check", mismatched);
    }
    step3.clear();
    step3.shrink_to_fit();

    // 7-9. seed families over a prefix of the unchallenged survivors
    std::vector<uint32_t> ebar;
    for (uint32_t i : sv)
        if (!emask.get(i)) ebar.push_back(i);
    const size_t k = params.k, m = params.m, w = params.w;
    if (ebar.size() < 2 * k * m) abort_session(chan, "capacity", ebar.size());

    std::vector<std::vector<uint32_t>> member(2 * k);
    std::vector<BitVec> xt(2 * k), rj(2 * k), pj(2 * k);
    const size_t seed_bits = toeplitz_seed_bits(m, kLambdaPqs);
    LinearCode code = family_code(m);
    std::vector<BitVec> synd(2 * k);
    for (size_t j = 0; j < 2 * k; ++j) {
        member[j].assign(ebar.begin() + j * m, ebar.begin() + (j + 1) * m);
        BitVec xs(m);
        for (size_t t = 0; t < m; ++t)
            if (x.get(member[j][t])) xs.set(t, true);
        xt[j] = std::move(xs);
        rj[j] = rng.bits(seed_bits);
        BitVec sj = universal_hash(rj[j], xt[j], kLambdaPqs);
        pj[j] = prg_expand(sj, 2 * w * kLambdaPqs);
        synd[j] = syndrome(code, xt[j]);
    }

    // adversary: substitute non-PRG-derived expansions for family j^{r,0}
    // of the first `count` pairs
    if (adv && adv->kind == AdversaryStrategy::Kind::FakeSeedFamily) {
        Rng arng = Rng::from_u64(adv->rng_seed);
        for (size_t r = 0; r < std::min(adv->count, k); ++r)
            pj[2 * r] = arng.bits(2 * w * kLambdaPqs);
    }

    // 10. family metadata: member sets, bases, hash randomness, syndromes
    {
        PayloadWriter wtr;
        BitVec theta(n4);
        for (size_t i = 0; i < n4; ++i)
            if (batch[i].basis == Basis::Diagonal) theta.set(i, true);
        wtr.bitvec(theta);
        wtr.u32(uint32_t(2 * k));
        for (size_t j = 0; j < 2 * k; ++j) {
            wtr.index_list(member[j]);
            wtr.bitvec(rj[j]);
            wtr.bitvec(synd[j]);
        }
        chan.send(Frame{MsgType::EreFamilyMeta, wtr.take()});
    }

    // 11. k sessions of w parallel EqCommitment seeded from the family pairs
    sess.gamma.resize(k);
    sess.u0.resize(wk);
    sess.u1.resize(wk);
    sess.mask.resize(wk);
    sess.keys.resize(wk);
    sess.open_seed0.resize(wk);
    sess.open_seed1.resize(wk);

    auto family_seed = [&](size_t j, size_t idx) {
        return pj[j].slice(idx * kLambdaPqs, kLambdaPqs);
    };

    for (size_t r = 0; r < k; ++r) {
        // 11.1 keys then payload commitments
        std::vector<BitVec> keys(w);
        {
            Frame f = expect(chan, MsgType::NaorKey, "ere step 11.1");
            PayloadReader rd(f.payload);
            uint32_t cnt = rd.u32();
            if (cnt != w) abort_session(chan, "key-count", r);
            for (size_t q = 0; q < w; ++q) keys[q] = rd.bitvec();
            rd.expect_done();
        }
        PayloadWriter pw;
        for (size_t q = 0; q < w; ++q) {
            size_t g = r * w + q;
            sess.keys[g] = keys[q];
            sess.u0[g] = rng.next_bit();
            sess.u1[g] = rng.next_bit();
            // seeds (p^{2r-1}_{2q-1}, p^{2r-1}_{2q}, p^{2r}_{2q-1}, p^{2r}_{2q})
            pw.bitvec(naor_commit(keys[q], sess.u0[g], family_seed(2 * r, 2 * q)).payload);
            pw.bitvec(naor_commit(keys[q], sess.u0[g], family_seed(2 * r, 2 * q + 1)).payload);
            pw.bitvec(naor_commit(keys[q], sess.u1[g], family_seed(2 * r + 1, 2 * q)).payload);
            pw.bitvec(naor_commit(keys[q], sess.u1[g], family_seed(2 * r + 1, 2 * q + 1)).payload);
        }
        chan.send(Frame{MsgType::ErePayloadCommit, pw.take()});

        // 11.2 pair challenge
        uint8_t gr;
        {
            Frame f = expect(chan, MsgType::ErePairChallenge, "ere step 11.2");
            PayloadReader rd(f.payload);
            gr = rd.u8() & 1;
            rd.expect_done();
        }
        sess.gamma[r] = gr;

        // 11.3 reveal the challenged family
        {
            size_t j = 2 * r + gr;
            PayloadWriter ww;
            ww.bitvec(xt[j]);
            ww.u32(uint32_t(2 * w));
            for (size_t idx = 0; idx < 2 * w; ++idx) ww.bitvec(family_seed(j, idx));
            chan.send(Frame{MsgType::ErePairReveal, ww.take()});
        }

        // 11.4 masked payload bits
        {
            BitVec e(w);
            for (size_t q = 0; q < w; ++q) {
                size_t g = r * w + q;
                uint8_t u_bar = gr ? sess.u0[g] : sess.u1[g];
                uint8_t e_bit = uint8_t(sess.bits.get(g)) ^ u_bar;
                sess.mask[g] = e_bit;
                if (e_bit) e.set(q, true);
                size_t jbar = 2 * r + (1 - gr);
                sess.open_seed0[g] = family_seed(jbar, 2 * q);
                sess.open_seed1[g] = family_seed(jbar, 2 * q + 1);
            }
            PayloadWriter mw;
            mw.bitvec(e);
            chan.send(Frame{MsgType::EqMask, mw.take()});
        }
    }
    return sess;
}

EreReceiverSession ere_commit_receiver(Duplex& chan, const EreParams& params, Rng& rng) {
    const size_t n4 = 4 * params.lambda_ex;
    const size_t wk = params.capacity();

    // 1-2. receive the batch, apply the channel, measure, announce survivors
    std::vector<Bb84Instance> batch;
    {
        Frame f = expect(chan, MsgType::EreBb84Batch, "ere step 1");
        PayloadReader rd(f.payload);
        uint32_t n = rd.u32();
        auto bytes = rd.bytes(n);
        rd.expect_done();
        batch = deserialize_batch(bytes);
        if (batch.size() != n4) abort_session(chan, "batch-size", batch.size());
    }
    Rng channel_rng = Rng::from_u64(params.channel_seed).split("ere-channel");
    batch = transmit(std::move(batch), params.channel, channel_rng);

    BitVec xh(n4), th(n4), survivors(n4);
    for (size_t i = 0; i < n4; ++i) {
        Basis basis = rng.next_bit() ? Basis::Diagonal : Basis::Rectilinear;
        auto res = measure(batch[i], basis, params.channel, channel_rng);
        if (!res) continue;
        survivors.set(i, true);
        if (*res) xh.set(i, true);
        if (basis == Basis::Diagonal) th.set(i, true);
    }
    {
        PayloadWriter w;
        w.bitvec(survivors);
        chan.send(Frame{MsgType::EreSurvivors, w.take()});
    }
    std::vector<uint32_t> sv;
    for (uint32_t i = 0; i < n4; ++i)
        if (survivors.get(i)) sv.push_back(i);

    // 3. commit to each (x-hat, theta-hat), sequentially
    std::vector<EqCommitterState> step3(2 * sv.size());
    for (size_t p = 0; p < sv.size(); ++p) {
        uint32_t i = sv[p];
        step3[2 * p] = eq_commit_committer(chan, xh.get(i), EqSeedQuad::fresh(rng), rng);
        step3[2 * p + 1] = eq_commit_committer(chan, th.get(i), EqSeedQuad::fresh(rng), rng);
    }

    // 4-5. open the challenged half
    BitVec emask;
    {
        Frame f = expect(chan, MsgType::EreChallengeSet, "ere step 4");
        PayloadReader rd(f.payload);
        emask = rd.bitvec();
        rd.expect_done();
        if (emask.size() != n4) abort_session(chan, "challenge-mask-size", 0);
    }
    for (size_t p = 0; p < sv.size(); ++p) {
        if (!emask.get(sv[p])) continue;
        eq_decommit_committer(chan, step3[2 * p], rng);
        eq_decommit_committer(chan, step3[2 * p + 1], rng);
    }
    step3.clear();
    step3.shrink_to_fit();

    // 10. family metadata
    const size_t k = params.k, m = params.m, w = params.w;
    BitVec theta;
    std::vector<std::vector<uint32_t>> member(2 * k);
    std::vector<BitVec> rj(2 * k);
    {
        Frame f = expect(chan, MsgType::EreFamilyMeta, "ere step 10");
        PayloadReader rd(f.payload);
        theta = rd.bitvec();
        uint32_t fam = rd.u32();
        if (fam != 2 * k) abort_session(chan, "family-count", fam);
        for (size_t j = 0; j < 2 * k; ++j) {
            member[j] = rd.index_list();
            rj[j] = rd.bitvec();
            rd.bitvec();   // syndrome: carried on the wire, unused by the honest receiver
            if (member[j].size() != m) abort_session(chan, "family-size", j);
        }
        rd.expect_done();
        if (theta.size() != n4) abort_session(chan, "theta-size", 0);
    }

    // 11. k sessions of w parallel commitments
    EreReceiverSession sess;
    sess.n_bits = wk;
    sess.gamma.resize(k);
    sess.keys.resize(wk);
    sess.payload0.resize(wk);
    sess.payload1.resize(wk);
    sess.mask.resize(wk);

    for (size_t r = 0; r < k; ++r) {
        {
            PayloadWriter ww;
            ww.u32(uint32_t(w));
            std::vector<BitVec> keys(w);
            for (size_t q = 0; q < w; ++q) {
                keys[q] = rng.bits(3 * kLambdaPqs);
                ww.bitvec(keys[q]);
                sess.keys[r * w + q] = keys[q];
            }
            chan.send(Frame{MsgType::NaorKey, ww.take()});
        }
        // payloads arrive as (c00, c01, c10, c11) per q
        std::vector<std::array<BitVec, 4>> payload(w);
        {
            Frame f = expect(chan, MsgType::ErePayloadCommit, "ere step 11.1");
            PayloadReader rd(f.payload);
            for (size_t q = 0; q < w; ++q)
                for (int d = 0; d < 4; ++d) payload[q][size_t(d)] = rd.bitvec();
            rd.expect_done();
        }
        uint8_t gr = rng.next_bit() ? 1 : 0;
        sess.gamma[r] = gr;
        {
            PayloadWriter ww;
            ww.u8(gr);
            chan.send(Frame{MsgType::ErePairChallenge, ww.take()});
        }

        // 11.3 verify the revealed family
        {
            Frame f = expect(chan, MsgType::ErePairReveal, "ere step 11.3");
            PayloadReader rd(f.payload);
            BitVec xtilde = rd.bitvec();
            uint32_t cnt = rd.u32();
            if (xtilde.size() != m || cnt != 2 * w) abort_session(chan, "reveal-shape", r);
            std::vector<BitVec> seeds(2 * w);
            for (size_t i = 0; i < 2 * w; ++i) seeds[i] = rd.bitvec();
            rd.expect_done();

            size_t j = 2 * r + gr;
            // (a) revealed values agree with our measurements where bases match
            size_t matched = 0, mism = 0;
            for (size_t t = 0; t < m; ++t) {
                uint32_t i = member[j][t];
                if (theta.get(i) != th.get(i)) continue;
                ++matched;
                if (xtilde.get(t) != xh.get(i)) ++mism;
            }
            double limit = (params.alpha + params.delta_slack) * double(std::max<size_t>(matched, 1));
            if (double(mism) > limit) abort_session(chan, "error-rate", r);

            // (b) the family really is PRG(h_j(r_j, xtilde))
            BitVec sj = universal_hash(rj[j], xtilde, kLambdaPqs);
            BitVec expect_p = prg_expand(sj, 2 * w * kLambdaPqs);
            BitVec got_p(2 * w * kLambdaPqs);
            for (size_t i = 0; i < 2 * w; ++i)
                for (size_t bpos = 0; bpos < kLambdaPqs; ++bpos)
                    if (seeds[i].get(bpos)) got_p.set(i * kLambdaPqs + bpos, true);
            if (!(expect_p == got_p)) abort_session(chan, "prg-check", r);

            // (c) both challenged-side commitments open, and to equal bits
            for (size_t q = 0; q < w; ++q) {
                const BitVec& c0 = payload[q][gr ? 2 : 0];
                const BitVec& c1 = payload[q][gr ? 3 : 1];
                int b0 = naor_open_with_seed(sess.keys[r * w + q], c0, seeds[2 * q]);
                int b1 = naor_open_with_seed(sess.keys[r * w + q], c1, seeds[2 * q + 1]);
                if (b0 < 0 || b1 < 0 || b0 != b1)
                    abort_session(chan, "decommit-equality", r * w + q);
            }
        }

        // 11.4 masked bits; stash the unchallenged side for later openings
        {
            Frame f = expect(chan, MsgType::EqMask, "ere step 11.4");
            PayloadReader rd(f.payload);
            BitVec e = rd.bitvec();
            rd.expect_done();
            if (e.size() != w) abort_session(chan, "mask-size", r);
            for (size_t q = 0; q < w; ++q) {
                size_t g = r * w + q;
                sess.mask[g] = e.get(q);
                sess.payload0[g] = payload[q][gr ? 0 : 2];
                sess.payload1[g] = payload[q][gr ? 1 : 3];
            }
        }
    }
    return sess;
}

void ere_decommit_committer(Duplex& chan, const EreCommitterSession& s,
                            const std::vector<uint32_t>& indices, Rng& rng) {
    PayloadWriter w;
    w.u32(uint32_t(indices.size()));
    for (uint32_t i : indices) {
        if (i >= s.bits.size()) throw std::invalid_argument("ere open: index out of range");
        uint8_t delta = rng.next_bit() ? 1 : 0;
        // the unchallenged side's committed bit: u^{gamma-bar}
        uint8_t u_bar = s.gamma[i / s.w] ? s.u0[i] : s.u1[i];
        w.u32(i);
        w.u8(uint8_t(s.bits.get(i)));
        w.u8(delta);
        w.u8(u_bar);
        w.bitvec(delta ? s.open_seed1[i] : s.open_seed0[i]);
    }
    chan.send(Frame{MsgType::EreOpen, w.take()});
}

std::vector<std::optional<bool>> ere_decommit_receiver(Duplex& chan,
                                                       const EreReceiverSession& s,
                                                       const std::vector<uint32_t>& indices) {
    Frame f = expect(chan, MsgType::EreOpen, "ere open");
    PayloadReader rd(f.payload);
    uint32_t cnt = rd.u32();
    if (cnt != indices.size()) throw TransportError("ere open: count mismatch");
    std::vector<std::optional<bool>> out(indices.size());
    for (size_t t = 0; t < indices.size(); ++t) {
        uint32_t i = rd.u32();
        uint8_t b = rd.u8() & 1;
        uint8_t delta = rd.u8() & 1;
        uint8_t u = rd.u8() & 1;
        BitVec seed = rd.bitvec();
        if (i != indices[t] || i >= s.n_bits) { out[t] = std::nullopt; continue; }
        const BitVec& payload = delta ? s.payload1[i] : s.payload0[i];
        if (!naor_verify(s.keys[i], NaorCommitment{payload}, u, seed)) {
            out[t] = std::nullopt;
            continue;
        }
        if (u != (b ^ s.mask[i])) {
            out[t] = std::nullopt;
            continue;
        }
        out[t] = bool(b);
    }
    rd.expect_done();
    return out;
}

} // namespace qotsim
