/**
 * Copyright 2026 The Imitater Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "imitater/replica/imitater_replica.hpp"

#include "imitater/primitives/hash.hpp"

namespace imitater::replica {

using netsim::StrategyKind;
using smp::AvailabilityCertificate;

namespace {

consensus::Behavior behavior_for(const netsim::Strategy &s, const consensus::EngineConfig &engine) {
    consensus::Behavior b;
    switch (s.kind) {
    case StrategyKind::SilentLeader:
        b.silent_leader = true;
        break;
    case StrategyKind::EquivocatingLeader:
        b.equivocate = true;
        break;
    case StrategyKind::CensoringLeader:
        b.censored_chains = s.censored;
        break;
    case StrategyKind::DelayedVoter:
        b.vote_delay = engine.base_timeout;
        break;
    default:
        break;
    }
    return b;
}

constexpr std::uint32_t kJunkClient = 0xffffffffu;

} // namespace

ImitaterReplica::ImitaterReplica(netsim::Context &ctx, const primitives::SignatureScheme &scheme, ReplicaConfig config,
                                 netsim::Strategy strategy)
    : ctx_(ctx), scheme_(scheme), config_(std::move(config)), strategy_(std::move(strategy)), self_(ctx.self()),
      n_(ctx.n()), mempool_(self_, config_.params, scheme, scheme.signer(self_)),
      engine_(ctx, *this, scheme, scheme.signer(self_), config_.engine, behavior_for(strategy_, config_.engine)),
      pacer_(config_.pacer) {
    latest_.resize(n_);
    last_committed_.assign(n_, 0);
    if (config_.guard_enabled) {
        mempool_.set_guard([this](NodeId chain, Position position) {
            return pacing::over_distribution_guard(chain, position, last_committed_[chain], config_.k_threshold) ==
                   pacing::GuardDecision::Allow;
        });
    }
}

void ImitaterReplica::start() {
    if (strategy_.kind == StrategyKind::Crash)
        return;
    engine_.start();
    try_disperse();
}

void ImitaterReplica::on_message(NodeId from, const netsim::MessagePtr &msg) {
    if (strategy_.kind == StrategyKind::Crash)
        return;
    std::visit(
        [&](const auto &body) {
            using T = std::decay_t<decltype(body)>;
            if constexpr (std::is_same_v<T, smp::MbDis>)
                on_mb_dis(from, body);
            else if constexpr (std::is_same_v<T, smp::MbAck>)
                on_mb_ack(from, body);
            else if constexpr (std::is_same_v<T, smp::MbChk>)
                on_mb_chk(from, body);
            else if constexpr (std::is_same_v<T, consensus::Proposal>)
                engine_.on_proposal(from, body);
            else if constexpr (std::is_same_v<T, consensus::Vote>)
                engine_.on_vote(from, body);
            else if constexpr (std::is_same_v<T, consensus::NewView>)
                engine_.on_new_view(from, body);
            else if constexpr (std::is_same_v<T, consensus::BlockRequest>)
                engine_.on_block_request(from, body);
            else if constexpr (std::is_same_v<T, consensus::BlockResponse>)
                engine_.on_block_response(from, body);
        },
        msg->body);
}

void ImitaterReplica::on_client_tx(smp::TxPtr tx) {
    if (strategy_.kind == StrategyKind::Crash)
        return;
    ctx_.observer().on_submit(self_, *tx);
    pending_.push_back(std::move(tx));
    try_disperse();
}

// -- dispersal ---------------------------------------------------------------

void ImitaterReplica::schedule_tick(SimTime delay) {
    if (tick_armed_)
        return;
    tick_armed_ = true;
    ctx_.schedule(std::max<SimTime>(delay, 1), [this] {
        tick_armed_ = false;
        try_disperse();
    });
}

std::vector<smp::TxPtr> ImitaterReplica::take_pending(std::size_t count) {
    std::vector<smp::TxPtr> txs;
    txs.reserve(count);
    while (count-- > 0 && !pending_.empty()) {
        txs.push_back(std::move(pending_.front()));
        pending_.pop_front();
    }
    return txs;
}

void ImitaterReplica::try_disperse() {
    if (strategy_.kind == StrategyKind::Crash)
        return;
    const auto top = mempool_.highest_ac();
    const Position next = top.position + 1;
    const bool flooder = strategy_.kind == StrategyKind::Flooder;
    bool ready = !mempool_.has_dispersed(next);
    // Honest dispersers never run further ahead than their own guard would allow.
    if (!flooder && next - last_committed_[self_] > config_.k_threshold)
        ready = false;
    if (!ready)
        return;

    if (flooder) {
        auto junk = std::make_shared<smp::Transaction>(smp::Transaction::make(
            kJunkClient, junk_seq_++, smp::TxOp::Put, self_, 0, {}, config_.junk_size));
        auto built = smp::make_microblock(self_, next, {junk}, top, ctx_.now(), config_.params);
        auto msgs = mempool_.start_dispersal(built);
        for (NodeId j = 0; j < n_; ++j)
            ctx_.send(j, netsim::make_message(std::move(msgs[j]), n_));
        return;
    }

    pacer_.retrieved = mempool_.own_retrievals_completed();
    const bool idle = top.position == last_committed_[self_];
    auto take = pacing::next_dispersal(pacer_, ctx_.now(), last_dispersal_, pending_.size(), true, idle);
    if (!take) {
        if (last_dispersal_ && (!pending_.empty() || idle))
            schedule_tick(*last_dispersal_ + pacer_.tau - ctx_.now());
        return;
    }
    if (strategy_.kind == StrategyKind::EquivocateDisperser)
        disperse_equivocating(*take);
    else
        disperse_honest(*take);

    last_dispersal_ = ctx_.now();
    pacer_.dispersed = mempool_.dispersals_started();
    pacing::pacer_step(pacer_);
    ctx_.observer().on_pacer(self_, pacer_.tau, pacer_.dispersed, pacer_.retrieved);
}

void ImitaterReplica::disperse_honest(std::size_t take) {
    const auto top = mempool_.highest_ac();
    auto built = smp::make_microblock(self_, top.position + 1, take_pending(take), top, ctx_.now(), config_.params);
    auto msgs = mempool_.start_dispersal(built);
    for (NodeId j = 0; j < n_; ++j)
        ctx_.send(j, netsim::make_message(std::move(msgs[j]), n_));
}

void ImitaterReplica::disperse_equivocating(std::size_t take) {
    const auto top = mempool_.highest_ac();
    const Position p = top.position + 1;
    auto txs = take_pending(take);
    std::vector<std::vector<smp::MbDis>> variants;

    if (p % 2 == 1) {
        // Two different microblocks for one position, one per half of the committee.
        auto a = smp::make_microblock(self_, p, txs, top, ctx_.now(), config_.params);
        auto b = smp::make_microblock(self_, p, txs, top, ctx_.now() + 1, config_.params);
        variants.push_back(mempool_.start_dispersal(a));
        variants.push_back({});
        auto vb = std::vector<smp::MbDis>{};
        // start_dispersal refuses a second dispersal at p; build the twin by hand.
        for (std::size_t j = 0; j < n_; ++j)
            vb.push_back(smp::MbDis{self_, p, b.block->id, top, smp::Chunk{static_cast<std::uint32_t>(j),
                                                                           b.encoding->chunks[j], 0},
                                    b.encoding->tree.proofs[j]});
        variants.back() = std::move(vb);
        mempool_.expect_acks(p, b.block->id);
    } else {
        // A valid commitment to chunks that are not a codeword: decoding must yield Empty.
        const std::size_t len = 64;
        std::vector<Bytes> chunks;
        for (std::size_t j = 0; j < n_; ++j) {
            Writer w(16);
            w.u32(self_);
            w.u64(p);
            w.u32(static_cast<std::uint32_t>(j));
            auto seed = primitives::sha256(w.bytes());
            Bytes c(len);
            for (std::size_t i = 0; i < len; ++i)
                c[i] = seed.bytes()[i % kLambda] ^ static_cast<std::uint8_t>(i * 131);
            chunks.push_back(std::move(c));
        }
        auto tree = primitives::merkle_build(chunks);
        std::vector<smp::MbDis> v;
        for (std::size_t j = 0; j < n_; ++j)
            v.push_back(smp::MbDis{self_, p, tree.root, top, smp::Chunk{static_cast<std::uint32_t>(j), chunks[j], 0},
                                   tree.proofs[j]});
        mempool_.expect_acks(p, tree.root);
        variants.push_back(std::move(v));
    }

    for (NodeId j = 0; j < n_; ++j) {
        const auto &v = variants.size() == 1 || j < n_ / 2 ? variants[0] : variants[1];
        ctx_.send(j, netsim::make_message(v[j], n_));
    }
    // Sign every variant itself so that each can reach a quorum with honest help.
    for (const auto &v : variants) {
        const auto &m = v.front();
        smp::MbAck ack{self_, p, m.root,
                       scheme_.signer(self_).sign(AvailabilityCertificate::ack_digest(self_, p, m.root))};
        if (auto ac = mempool_.handle_mb_ack(self_, ack))
            ctx_.observer().on_ac(self_, *ac);
    }
}

void ImitaterReplica::on_mb_dis(NodeId from, const smp::MbDis &m) {
    if (from != m.chain)
        return;
    std::optional<smp::MbAck> ack;
    if (strategy_.byzantine()) {
        if (m.chain != self_ || strategy_.kind != StrategyKind::EquivocateDisperser)
            ack = mempool_.sign_any(m);
        if (m.chain == self_)
            mempool_.handle_mb_dis(from, m); // keep the own chunk for retrieval
    } else {
        ack = mempool_.handle_mb_dis(from, m);
    }
    if (ack)
        ctx_.send(m.chain, netsim::make_message(std::move(*ack), n_));
}

void ImitaterReplica::send_acks(const std::vector<smp::ReleasedAck> &acks) {
    for (const auto &r : acks)
        ctx_.send(r.to, netsim::make_message(r.ack, n_));
}

void ImitaterReplica::on_mb_ack(NodeId from, const smp::MbAck &m) {
    if (auto ac = mempool_.handle_mb_ack(from, m)) {
        ctx_.observer().on_ac(self_, *ac);
        try_disperse();
    }
}

// -- retrieval ---------------------------------------------------------------

void ImitaterReplica::broadcast_chunks(const smp::RetrievalOutput &out) {
    // Byzantine nodes keep their chunks to themselves.
    if (strategy_.byzantine())
        return;
    for (const auto &chk : out.broadcasts) {
        ctx_.observer().on_chk_broadcast(self_, chk.root);
        ctx_.broadcast(netsim::make_message(chk, n_));
    }
}

void ImitaterReplica::on_mb_chk(NodeId from, const smp::MbChk &m) {
    auto trig = mempool_.handle_mb_chk(from, m);
    if (!trig)
        return;
    mempool_.finalize_decode(trig->root);
    broadcast_chunks(mempool_.after_decode(trig->root));
    try_execute();
}

// -- consensus hooks ---------------------------------------------------------

AvailabilityCertificate ImitaterReplica::own_highest_ac() {
    if (strategy_.kind == StrategyKind::Flooder)
        return AvailabilityCertificate::genesis(self_);
    return mempool_.highest_ac();
}

void ImitaterReplica::on_reported_ac(NodeId from, const AvailabilityCertificate &ac) {
    if (ac.chain != from || ac.chain >= n_ || ac.position == 0)
        return;
    auto &slot = latest_[ac.chain];
    if (slot && slot->position >= ac.position)
        return;
    if (smp::verify_ac(ac, scheme_))
        slot = ac;
}

std::vector<AvailabilityCertificate> ImitaterReplica::proposal_acs(const std::vector<Position> &included) {
    std::vector<AvailabilityCertificate> out;
    for (NodeId c = 0; c < n_; ++c) {
        std::optional<AvailabilityCertificate> cand = latest_[c];
        if (c == self_) {
            auto own = own_highest_ac();
            if (own.position > 0)
                cand = own;
        }
        if (cand && cand->position > included[c])
            out.push_back(*cand);
    }
    return out;
}

void ImitaterReplica::on_commit(const consensus::BlockPtr &block, std::uint64_t height) {
    ctx_.observer().on_commit(self_, height, *block);
    for (const auto &ac : block->mbs)
        if (ac.position > last_committed_[ac.chain])
            broadcast_chunks(mempool_.trigger_retrieval(ac.root, ac.chain, ac.position));
    exec_queue_.emplace_back(block, height);
    try_execute();
}

// -- execution ---------------------------------------------------------------

Digest ImitaterReplica::content_digest(const smp::Microblock &mb) const {
    Writer w(64 + mb.txs.size() * kLambda);
    w.digest(mb.id);
    w.digest(mb.prev_ac.root);
    w.i64(mb.created_at);
    for (const auto &tx : mb.txs)
        w.digest(tx->hash);
    return primitives::sha256(w.bytes());
}

void ImitaterReplica::try_execute() {
    bool progress = false;
    const ordering::Resolver resolve = [this](const Digest &root) {
        return ordering::Resolution{mempool_.state_of(root), mempool_.block_of(root)};
    };
    const ordering::LinkVerifier verify = [this](const AvailabilityCertificate &ac) {
        return smp::verify_ac(ac, scheme_);
    };
    while (!exec_queue_.empty()) {
        const auto block = exec_queue_.front().first;
        auto committed = last_committed_;
        std::vector<ordering::ExpandedMicroblock> slots;
        try {
            slots = ordering::expand_block(block->mbs, committed, resolve, verify);
        } catch (const ordering::NotYetAvailable &e) {
            broadcast_chunks(mempool_.trigger_retrieval(e.root, e.chain, e.position));
            break;
        }
        auto txs = ordering::build_tx_list(slots, executed_);
        const auto base = ledger_.size();
        ledger_.execute(txs, config_.keep_log);
        for (std::size_t i = 0; i < txs.size(); ++i)
            ctx_.observer().on_execute(self_, base + i, *txs[i].tx, txs[i].key.chain, txs[i].key.position);

        std::vector<std::vector<Digest>> roots(n_);
        for (const auto &s : slots) {
            const auto state = s.block ? smp::EntryState::Decoded : smp::EntryState::Empty;
            ctx_.observer().on_resolve(self_, s.chain, s.position, s.root, state,
                                       s.block ? content_digest(*s.block) : Digest{});
            if (!s.root.is_zero())
                roots[s.chain].push_back(s.root);
        }
        for (NodeId c = 0; c < n_; ++c)
            if (committed[c] > last_committed_[c] || !roots[c].empty())
                mempool_.release(c, committed[c], roots[c]);
        last_committed_ = std::move(committed);
        exec_queue_.pop_front();
        progress = true;
    }
    if (progress) {
        if (strategy_.honest())
            send_acks(mempool_.release_withheld());
        try_disperse();
    }
}

netsim::NodeStats ImitaterReplica::stats() const {
    netsim::NodeStats s;
    s.stored_bytes = mempool_.stored_bytes();
    s.held_positions.resize(n_);
    for (NodeId c = 0; c < n_; ++c)
        s.held_positions[c] = mempool_.held_positions(c);
    s.dispersals = mempool_.dispersals_started();
    s.retrievals = mempool_.own_retrievals_completed();
    s.tau = pacer_.tau;
    s.view = engine_.view();
    s.committed_height = engine_.committed_height();
    return s;
}

} // namespace imitater::replica
