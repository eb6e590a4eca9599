#include "qotsim/ot.hpp"

#include <algorithm>
#include <thread>

#include "qotsim/ldpc.hpp"
#include "qotsim/xof.hpp"

namespace qotsim {

namespace {

Frame expect(Duplex& chan, MsgType t, const char* what) {
    Frame f = chan.recv();
    if (f.type == MsgType::Abort || f.type == MsgType::OtAbort) {
        std::string stage(f.payload.begin(), f.payload.end());
        throw OtAbort("peer", stage);
    }
    if (f.type != t)
        throw TransportError(std::string("unexpected frame in ") + what + ": " +
                             msg_type_name(f.type));
    return f;
}

void send_ot_abort(Duplex& chan, const std::string& stage) {
    PayloadWriter w;
    w.bytes(std::span<const uint8_t>(reinterpret_cast<const uint8_t*>(stage.data()),
                                     stage.size()));
    chan.send(Frame{MsgType::OtAbort, w.take()});
}

LinearCode ot_code(size_t n, int side) {
    size_t q = std::max<size_t>(1, (n + 9) / 10);
    return build_code(n, q, code_seed_from_label(side == 0 ? "qotsim-ot-syndrome-0"
                                                           : "qotsim-ot-syndrome-1"));
}

void params_handshake(Duplex& chan, const SessionConfig& cfg) {
    auto d = cfg.digest();
    PayloadWriter w;
    w.bytes(d);
    chan.send(Frame{MsgType::ParamsDigest, w.take()});
    Frame f = chan.recv();
    if (f.type != MsgType::ParamsDigest)
        throw OtAbort("handshake", "expected params digest");
    if (!std::equal(d.begin(), d.end(), f.payload.begin(), f.payload.end()))
        throw OtAbort("handshake", "params digest mismatch");
}

} // namespace

EreParams SessionConfig::ere() const {
    EreParams p;
    p.lambda_ex = lambda_ex;
    p.m = m;
    p.k = k;
    p.w = w;
    p.alpha = alpha;
    p.delta_slack = delta_slack;
    p.channel = channel();
    p.channel_seed = channel_seed;
    return p;
}

std::array<uint8_t, 32> SessionConfig::digest() const {
    PayloadWriter wr;
    wr.u64(lambda_ot);
    wr.u64(lambda_ex);
    wr.u64(m);
    wr.u64(k);
    wr.u64(w);
    wr.u64(msg_len);
    wr.u64(n_ot);
    wr.u64(v);
    wr.u64(uint64_t(alpha * 1e12));
    wr.u64(uint64_t(vartheta * 1e12));
    wr.u64(uint64_t(loss_prob * 1e12));
    wr.u64(uint64_t(delta_slack * 1e12));
    wr.u64(channel_seed);
    wr.u8(toy ? 1 : 0);
    auto bytes = wr.take();
    auto d = shake256(bytes, 32);
    std::array<uint8_t, 32> out{};
    std::copy(d.begin(), d.end(), out.begin());
    return out;
}

void SessionConfig::validate() const {
    if (lambda_ot < 8 || lambda_ex < 8) throw std::invalid_argument("config: sizes too small");
    if (m == 0 || k == 0 || w == 0) throw std::invalid_argument("config: m, k, w required");
    if (k != lambda_ex / m) throw std::invalid_argument("config: k != floor(lambda_ex/m)");
    if (w * k < 4 * lambda_ot)
        throw std::invalid_argument("config: wk must be >= 4*lambda_ot commit slots");
    channel().validate(delta_slack);
    if (n_ot > 1 && v == 0) throw std::invalid_argument("config: multi-OT needs v");
}

SessionConfig SessionConfig::toy_profile(size_t lambda_ot, double alpha, double vartheta,
                                         double loss) {
    SessionConfig c;
    c.lambda_ot = lambda_ot;
    c.alpha = alpha;
    c.vartheta = vartheta;
    c.loss_prob = loss;
    c.toy = true;
    size_t lex = lambda_ot;
    if (loss > 0) lex = size_t(double(lex) * (1.0 + 2.5 * loss)) + 64;
    size_t m = alpha > 0 ? 256 : 64;
    if (m * 2 > lex) m = std::max<size_t>(16, lex / 2);
    size_t k = std::max<size_t>(1, lex / m);
    c.lambda_ex = lex;
    c.m = m;
    c.k = k;
    c.w = (4 * lambda_ot + k - 1) / k;
    c.delta_slack = 0.05;
    return c;
}

std::vector<uint32_t> sample_challenge_set(size_t universe, size_t size, Rng& rng) {
    if (size > universe) throw std::invalid_argument("sample_challenge_set: size > universe");
    std::vector<uint32_t> pool(universe);
    for (size_t i = 0; i < universe; ++i) pool[i] = uint32_t(i);
    for (size_t i = universe; i > 1; --i)
        std::swap(pool[i - 1], pool[rng.uniform(i)]);
    pool.resize(size);
    std::sort(pool.begin(), pool.end());
    return pool;
}

std::vector<IndexPartition> partition_for_multi_ot(const std::vector<uint32_t>& tbar,
                                                   const BitVec& theta, const BitVec& theta_hat,
                                                   size_t n_ot, size_t v,
                                                   const std::vector<bool>& choices) {
    if (choices.size() != n_ot) throw std::invalid_argument("choices size != n_ot");
    std::vector<uint32_t> matched, mismatched;
    for (uint32_t i : tbar)
        (theta.get(i) == theta_hat.get(i) ? matched : mismatched).push_back(i);
    size_t half = n_ot == 1 ? 0 : v / 2;
    if (n_ot > 1 && (matched.size() < n_ot * half || mismatched.size() < n_ot * half))
        throw std::invalid_argument("InsufficientIndices");

    std::vector<IndexPartition> parts(n_ot);
    if (n_ot == 1) {
        // plain Algorithm-5 step 7: I_b = matched, I_bbar = the rest
        parts[0].i0 = choices[0] ? mismatched : matched;
        parts[0].i1 = choices[0] ? matched : mismatched;
        return parts;
    }
    size_t mpos = 0, upos = 0;
    for (size_t j = 0; j < n_ot; ++j) {
        std::vector<uint32_t> mside(matched.begin() + mpos, matched.begin() + mpos + half);
        std::vector<uint32_t> uside(mismatched.begin() + upos, mismatched.begin() + upos + half);
        mpos += half; upos += half;
        parts[j].i0 = choices[j] ? uside : mside;
        parts[j].i1 = choices[j] ? mside : uside;
    }
    return parts;
}

OtCiphertexts encrypt_messages(const BitVec& x0, const BitVec& x1,
                               const BitVec& s0, const BitVec& s1,
                               const BitVec& m0, const BitVec& m1) {
    if (m0.size() != m1.size()) throw std::invalid_argument("message length mismatch");
    if (s0.size() != toeplitz_seed_bits(x0.size(), kLambdaPqs) ||
        s1.size() != toeplitz_seed_bits(x1.size(), kLambdaPqs))
        throw std::invalid_argument("hash seed length mismatch");
    OtCiphertexts out;
    out.s0 = s0;
    out.s1 = s1;
    BitVec k0 = universal_hash(s0, x0, kLambdaPqs);
    BitVec k1 = universal_hash(s1, x1, kLambdaPqs);
    out.c0 = prg_expand(k0, m0.size()) ^ m0;
    out.c1 = prg_expand(k1, m1.size()) ^ m1;
    return out;
}

BitVec decrypt_message(const BitVec& x, const BitVec& seed, const BitVec& ciphertext) {
    BitVec key = universal_hash(seed, x, kLambdaPqs);
    return prg_expand(key, ciphertext.size()) ^ ciphertext;
}

// ---------------------------------------------------------------------------

void ot_alice(Duplex& chan, const std::vector<BitVec>& m0, const std::vector<BitVec>& m1,
              const SessionConfig& cfg, Rng rng, OtAliceResult& out) {
    params_handshake(chan, cfg);
    const size_t n2 = 2 * cfg.lambda_ot;

    // 1. prepare and send the batch
    std::vector<Bb84Instance> batch(n2);
    BitVec x(n2), theta(n2);
    for (size_t i = 0; i < n2; ++i) {
        batch[i].bit = rng.next_bit() ? 1 : 0;
        batch[i].basis = rng.next_bit() ? Basis::Diagonal : Basis::Rectilinear;
        if (batch[i].bit) x.set(i, true);
        if (batch[i].basis == Basis::Diagonal) theta.set(i, true);
    }
    {
        PayloadWriter w;
        auto bytes = serialize_batch(batch);
        w.u32(uint32_t(n2));
        w.bytes(bytes);
        chan.send(Frame{MsgType::OtBb84Batch, w.take()});
    }

    BitVec survivors;
    {
        Frame f = expect(chan, MsgType::OtSurvivors, "ot step 2");
        PayloadReader rd(f.payload);
        survivors = rd.bitvec();
        rd.expect_done();
        if (survivors.size() != n2) throw OtAbort("step2", "survivor mask size");
    }
    std::vector<uint32_t> sv;
    for (uint32_t i = 0; i < n2; ++i)
        if (survivors.get(i)) sv.push_back(i);

    // 2. ERE commitment of Bob's measurement record (we are the receiver)
    EreReceiverSession ere = ere_commit_receiver(chan, cfg.ere(), rng);
    if (ere.n_bits < 2 * sv.size()) throw OtAbort("step2", "commit capacity");

    // 3-4. challenge half of T and obtain the openings
    std::vector<uint32_t> tset = sample_challenge_set(sv.size(), sv.size() / 2, rng);
    {
        BitVec mask(n2);
        for (uint32_t p : tset) mask.set(sv[p], true);
        PayloadWriter w;
        w.bitvec(mask);
        chan.send(Frame{MsgType::OtChallengeSet, w.take()});
    }
    std::vector<uint32_t> open_idx;
    open_idx.reserve(2 * tset.size());
    for (uint32_t p : tset) {
        open_idx.push_back(2 * p);
        open_idx.push_back(2 * p + 1);
    }
    auto opened = ere_decommit_receiver(chan, ere, open_idx);

    // 5. matched-basis agreement check over T
    size_t matched = 0, mism = 0;
    for (size_t t = 0; t < tset.size(); ++t) {
        auto xb = opened[2 * t], tb = opened[2 * t + 1];
        if (!xb || !tb) {
            send_ot_abort(chan, "step4-open");
            throw OtAbort("step4-open", "rejected opening");
        }
        uint32_t i = sv[tset[t]];
        bool basis_match = (*tb == theta.get(i));
        if (basis_match) {
            ++matched;
            if (*xb != x.get(i)) ++mism;
        }
    }
    if (double(mism) > (cfg.alpha + cfg.delta_slack) * double(std::max<size_t>(matched, 1))) {
        send_ot_abort(chan, "step5-check");
        throw OtAbort("step5-check", "error rate above alpha + delta");
    }

    // 6. announce bases on the remaining positions
    std::vector<uint32_t> tbar;
    {
        BitVec in_t(sv.size());
        for (uint32_t p : tset) in_t.set(p, true);
        for (size_t p = 0; p < sv.size(); ++p)
            if (!in_t.get(p)) tbar.push_back(sv[p]);
    }
    {
        BitVec tb(tbar.size());
        for (size_t j = 0; j < tbar.size(); ++j)
            if (theta.get(tbar[j])) tb.set(j, true);
        PayloadWriter w;
        w.bitvec(tb);
        chan.send(Frame{MsgType::OtBases, w.take()});
    }

    // 7. receive the partitions
    size_t n_ot = std::max<size_t>(1, cfg.n_ot);
    std::vector<IndexPartition> parts(n_ot);
    {
        Frame f = expect(chan, MsgType::OtPartition, "ot step 7");
        PayloadReader rd(f.payload);
        uint32_t cnt = rd.u32();
        if (cnt != n_ot) throw OtAbort("step7", "partition count");
        for (auto& p : parts) {
            p.i0 = rd.index_list();
            p.i1 = rd.index_list();
        }
        rd.expect_done();
        BitVec in_tbar(n2);
        for (uint32_t i : tbar) in_tbar.set(i, true);
        BitVec seen(n2);
        for (const auto& p : parts)
            for (const auto* side : {&p.i0, &p.i1})
                for (uint32_t i : *side) {
                    if (i >= n2 || !in_tbar.get(i) || seen.get(i))
                        throw OtAbort("step7", "partition not disjoint in T-bar");
                    seen.set(i, true);
                }
    }
    out.partitions = parts;

    // 8-9. per distilled OT: syndromes, then seeds + ciphertexts.  For
    // multi-OT the message pair j is assigned to a uniformly chosen
    // partition, announced in the clear.
    std::vector<uint32_t> assign(n_ot);
    for (size_t j = 0; j < n_ot; ++j) assign[j] = uint32_t(j);
    if (n_ot > 1)
        for (size_t i = n_ot; i > 1; --i)
            std::swap(assign[i - 1], assign[rng.uniform(i)]);

    PayloadWriter synw;
    PayloadWriter cw;
    cw.u32(uint32_t(n_ot));
    synw.u32(uint32_t(n_ot));
    for (size_t j = 0; j < n_ot; ++j) {
        const IndexPartition& p = parts[assign[j]];
        BitVec x0(p.i0.size()), x1(p.i1.size());
        for (size_t t = 0; t < p.i0.size(); ++t)
            if (x.get(p.i0[t])) x0.set(t, true);
        for (size_t t = 0; t < p.i1.size(); ++t)
            if (x.get(p.i1[t])) x1.set(t, true);

        LinearCode c0 = ot_code(x0.size(), 0), c1 = ot_code(x1.size(), 1);
        synw.u32(assign[j]);
        synw.bitvec(syndrome(c0, x0));
        synw.bitvec(syndrome(c1, x1));

        BitVec s0 = rng.bits(toeplitz_seed_bits(x0.size(), kLambdaPqs));
        BitVec s1 = rng.bits(toeplitz_seed_bits(x1.size(), kLambdaPqs));
        auto ct = encrypt_messages(x0, x1, s0, s1, m0[j], m1[j]);
        cw.u32(assign[j]);
        cw.bitvec(ct.s0);
        cw.bitvec(ct.c0);
        cw.bitvec(ct.s1);
        cw.bitvec(ct.c1);
    }
    chan.send(Frame{MsgType::OtSyndromes, synw.take()});
    chan.send(Frame{MsgType::OtCiphertexts, cw.take()});
    out.completed = true;
}

void ot_bob(Duplex& chan, const std::vector<bool>& choices, const SessionConfig& cfg,
            Rng rng, OtBobResult& out, const AdversaryStrategy* adv,
            const OtTestHooks* hooks) {
    params_handshake(chan, cfg);
    const size_t n2 = 2 * cfg.lambda_ot;
    out.choice = choices.empty() ? false : choices[0];

    // 1-2. receive, pass through the channel, measure
    std::vector<Bb84Instance> batch;
    {
        Frame f = expect(chan, MsgType::OtBb84Batch, "ot step 1");
        PayloadReader rd(f.payload);
        uint32_t n = rd.u32();
        auto bytes = rd.bytes(n);
        rd.expect_done();
        batch = deserialize_batch(bytes);
        if (batch.size() != n2) throw OtAbort("step1", "batch size");
    }
    Rng channel_rng = Rng::from_u64(cfg.channel_seed).split("ot-channel");
    batch = transmit(std::move(batch), cfg.channel(), channel_rng);

    BitVec xh(n2), th(n2), survivors(n2);
    if (hooks && hooks->bob_bases && hooks->bob_outcomes) {
        th = *hooks->bob_bases;
        xh = *hooks->bob_outcomes;
        for (size_t i = 0; i < n2; ++i)
            if (!batch[i].lost) survivors.set(i, true);
    } else {
        for (size_t i = 0; i < n2; ++i) {
            Basis basis = rng.next_bit() ? Basis::Diagonal : Basis::Rectilinear;
            auto res = measure(batch[i], basis, cfg.channel(), channel_rng);
            if (basis == Basis::Diagonal) th.set(i, true);
            if (!res) continue;
            survivors.set(i, true);
            if (*res) xh.set(i, true);
        }
    }
    if (adv && adv->kind == AdversaryStrategy::Kind::SkipMeasurement) {
        Rng arng = Rng::from_u64(adv->rng_seed);
        for (uint32_t i : adv->skip_set)
            if (i < n2 && survivors.get(i)) xh.set(i, arng.next_bit());
    }
    {
        PayloadWriter w;
        w.bitvec(survivors);
        chan.send(Frame{MsgType::OtSurvivors, w.take()});
    }
    std::vector<uint32_t> sv;
    for (uint32_t i = 0; i < n2; ++i)
        if (survivors.get(i)) sv.push_back(i);

    // 2. commit to the measurement record through ERE (we are the committer)
    BitVec record(2 * sv.size());
    for (size_t p = 0; p < sv.size(); ++p) {
        if (xh.get(sv[p])) record.set(2 * p, true);
        if (th.get(sv[p])) record.set(2 * p + 1, true);
    }
    EreCommitterSession ere = ere_commit_committer(chan, record, cfg.ere(), rng, adv);

    // 3-4. open the challenged half
    std::vector<uint32_t> tpos;
    {
        Frame f = expect(chan, MsgType::OtChallengeSet, "ot step 3");
        PayloadReader rd(f.payload);
        BitVec mask = rd.bitvec();
        rd.expect_done();
        if (mask.size() != n2) throw OtAbort("step3", "challenge mask size");
        for (size_t p = 0; p < sv.size(); ++p)
            if (mask.get(sv[p])) tpos.push_back(uint32_t(p));
    }
    std::vector<uint32_t> open_idx;
    for (uint32_t p : tpos) {
        open_idx.push_back(2 * p);
        open_idx.push_back(2 * p + 1);
    }
    ere_decommit_committer(chan, ere, open_idx, rng);

    // 6. bases for the unchallenged half
    std::vector<uint32_t> tbar;
    {
        BitVec in_t(sv.size());
        for (uint32_t p : tpos) in_t.set(p, true);
        for (size_t p = 0; p < sv.size(); ++p)
            if (!in_t.get(p)) tbar.push_back(sv[p]);
    }
    BitVec theta(n2);
    {
        Frame f = expect(chan, MsgType::OtBases, "ot step 6");
        PayloadReader rd(f.payload);
        BitVec tb = rd.bitvec();
        rd.expect_done();
        if (tb.size() != tbar.size()) throw OtAbort("step6", "bases length");
        for (size_t j = 0; j < tbar.size(); ++j)
            if (tb.get(j)) theta.set(tbar[j], true);
    }

    // 7. partition by basis agreement and send
    size_t n_ot = std::max<size_t>(1, cfg.n_ot);
    std::vector<bool> ch = choices;
    ch.resize(n_ot, false);
    auto parts = partition_for_multi_ot(tbar, theta, th, n_ot, cfg.v, ch);
    {
        PayloadWriter w;
        w.u32(uint32_t(n_ot));
        for (auto& p : parts) {
            w.index_list(p.i0);
            w.index_list(p.i1);
        }
        chan.send(Frame{MsgType::OtPartition, w.take()});
    }

    // 8-10. receive syndromes and ciphertexts, correct, decrypt
    std::vector<BitVec> synd0(n_ot), synd1(n_ot);
    {
        Frame f = expect(chan, MsgType::OtSyndromes, "ot step 8");
        PayloadReader rd(f.payload);
        uint32_t cnt = rd.u32();
        if (cnt != n_ot) throw OtAbort("step8", "syndrome count");
        for (size_t j = 0; j < n_ot; ++j) {
            uint32_t part = rd.u32();
            if (part >= n_ot) throw OtAbort("step8", "bad partition ref");
            synd0[part] = rd.bitvec();
            synd1[part] = rd.bitvec();
        }
        rd.expect_done();
    }
    out.messages.resize(n_ot);
    out.decode_failed.assign(n_ot, false);
    {
        Frame f = expect(chan, MsgType::OtCiphertexts, "ot step 9");
        PayloadReader rd(f.payload);
        uint32_t cnt = rd.u32();
        if (cnt != n_ot) throw OtAbort("step9", "ciphertext count");
        for (size_t j = 0; j < n_ot; ++j) {
            uint32_t part = rd.u32();
            if (part >= n_ot) throw OtAbort("step9", "bad partition ref");
            BitVec s0 = rd.bitvec(), c0 = rd.bitvec(), s1 = rd.bitvec(), c1 = rd.bitvec();
            bool b = ch[part];
            const auto& mine = b ? parts[part].i1 : parts[part].i0;
            BitVec y(mine.size());
            for (size_t t = 0; t < mine.size(); ++t)
                if (xh.get(mine[t])) y.set(t, true);
            LinearCode code = ot_code(y.size(), b ? 1 : 0);
            const BitVec& target = b ? synd1[part] : synd0[part];
            size_t max_flips = size_t((cfg.alpha + cfg.delta_slack) * double(y.size())) + 8;
            auto corrected = (hooks && hooks->force_decode_failure)
                                 ? std::nullopt
                                 : decode(code, y, target, max_flips);
            BitVec xb;
            if (corrected) {
                xb = *corrected;
            } else {
                out.decode_failed[part] = true;
                xb = rng.bits(y.size());
            }
            out.messages[part] = decrypt_message(xb, b ? s1 : s0, b ? c1 : c0);
        }
        rd.expect_done();
    }
    out.completed = true;
}

namespace {

OtSessionResult run_pair(const std::vector<BitVec>& m0, const std::vector<BitVec>& m1,
                         const std::vector<bool>& choices, const SessionConfig& cfg,
                         uint64_t alice_seed, uint64_t bob_seed,
                         const AdversaryStrategy* adv, const OtTestHooks* hooks) {
    auto [a_end, b_end] = make_loopback_pair();
    TranscriptDuplex a_chan(std::move(a_end), TranscriptDuplex::Role::Initiator);
    TranscriptDuplex b_chan(std::move(b_end), TranscriptDuplex::Role::Responder);

    OtSessionResult res;
    std::thread bob([&] {
        try {
            ot_bob(b_chan, choices, cfg, Rng::from_u64(bob_seed), res.bob, adv, hooks);
        } catch (const OtAbort& a) {
            res.bob.abort_stage = a.stage;
        } catch (const EreAbort& a) {
            res.bob.abort_stage = a.stage;
        } catch (const std::exception&) {
            res.bob.abort_stage = "transport";
        }
        res.bob.transcript = b_chan.digest();
    });
    try {
        ot_alice(a_chan, m0, m1, cfg, Rng::from_u64(alice_seed), res.alice);
    } catch (const OtAbort& a) {
        res.alice.abort_stage = a.stage;
    } catch (const EreAbort& a) {
        res.alice.abort_stage = a.stage;
    } catch (const std::exception&) {
        res.alice.abort_stage = "transport";
    }
    res.alice.transcript = a_chan.digest();
    bob.join();
    return res;
}

} // namespace

OtSessionResult run_ot(const BitVec& m0, const BitVec& m1, bool b,
                       const SessionConfig& cfg, uint64_t alice_seed, uint64_t bob_seed,
                       const AdversaryStrategy* adv, const OtTestHooks* hooks) {
    return run_pair({m0}, {m1}, {b}, cfg, alice_seed, bob_seed, adv, hooks);
}

OtSessionResult run_multi_ot(const std::vector<BitVec>& m0, const std::vector<BitVec>& m1,
                             const std::vector<bool>& choices, const SessionConfig& cfg,
                             uint64_t alice_seed, uint64_t bob_seed) {
    return run_pair(m0, m1, choices, cfg, alice_seed, bob_seed, nullptr, nullptr);
}

} // namespace qotsim
