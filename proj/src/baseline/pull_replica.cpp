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

#include "imitater/baseline/pull_replica.hpp"

namespace imitater::baseline {

using netsim::StrategyKind;

namespace {

consensus::EngineConfig pull_engine(consensus::EngineConfig c) {
    c.certified_refs = false;
    return c;
}

consensus::Behavior behavior_for(const netsim::Strategy &s, const consensus::EngineConfig &engine) {
    consensus::Behavior b;
    if (s.kind == StrategyKind::SilentLeader)
        b.silent_leader = true;
    if (s.kind == StrategyKind::EquivocatingLeader)
        b.equivocate = true;
    if (s.kind == StrategyKind::CensoringLeader)
        b.censored_chains = s.censored;
    if (s.kind == StrategyKind::DelayedVoter)
        b.vote_delay = engine.base_timeout;
    return b;
}

} // namespace

PullReplica::PullReplica(netsim::Context &ctx, const primitives::SignatureScheme &scheme, PullConfig config,
                         netsim::Strategy strategy)
    : ctx_(ctx), scheme_(scheme), config_(std::move(config)), strategy_(std::move(strategy)), self_(ctx.self()),
      n_(ctx.n()), engine_(ctx, *this, scheme, scheme.signer(self_), pull_engine(config_.engine),
                           behavior_for(strategy_, config_.engine)),
      own_ref_(smp::AvailabilityCertificate::genesis(self_)) {
    chains_.resize(n_);
    last_committed_.assign(n_, 0);
}

void PullReplica::start() {
    if (strategy_.kind == StrategyKind::Crash)
        return;
    engine_.start();
    if (strategy_.honest())
        tick();
}

void PullReplica::on_client_tx(smp::TxPtr tx) {
    if (strategy_.kind == StrategyKind::Crash)
        return;
    ctx_.observer().on_submit(self_, *tx);
    pending_.push_back(std::move(tx));
}

void PullReplica::tick() {
    if (!pending_.empty() && ctx_.uplink_backlog() < config_.max_backlog)
        cut_microblock();
    ctx_.schedule(config_.poll_interval, [this] { tick(); });
}

void PullReplica::cut_microblock() {
    std::vector<smp::TxPtr> txs;
    while (txs.size() < config_.batch_size && !pending_.empty()) {
        txs.push_back(std::move(pending_.front()));
        pending_.pop_front();
    }
    ++own_position_;
    auto fm = make_full_microblock(self_, own_position_, std::move(txs), own_ref_, ctx_.now(), n_);
    own_ref_ = make_ref(self_, own_position_, fm.block->id);
    auto msg = netsim::make_message(MbFull{fm}, n_);
    store(fm);
    for (NodeId j = 0; j < n_; ++j)
        if (j != self_)
            ctx_.send(j, msg);
}

// -- messages ----------------------------------------------------------------

void PullReplica::on_message(NodeId from, const netsim::MessagePtr &msg) {
    if (strategy_.kind == StrategyKind::Crash)
        return;
    std::visit(
        [&](const auto &body) {
            using T = std::decay_t<decltype(body)>;
            if constexpr (std::is_same_v<T, MbFull>) {
                if (from != body.mb.block->chain)
                    return;
                if (strategy_.kind == StrategyKind::PullSpammer)
                    spam(body.mb.block->chain, body.mb.block->position, body.mb.block->id);
                store(body.mb);
            } else if constexpr (std::is_same_v<T, PullRequest>) {
                if (!strategy_.honest())
                    return;
                auto it = by_id_.find(body.id);
                if (it == by_id_.end() && body.chain < n_) {
                    auto c = chains_[body.chain].find(body.position);
                    if (c != chains_[body.chain].end())
                        it = by_id_.find(c->second);
                }
                PullResponse resp{body.id, std::nullopt};
                if (it != by_id_.end()) {
                    resp.mb = it->second;
                    ++pulls_served_;
                }
                ctx_.send(from, netsim::make_message(std::move(resp), n_));
            } else if constexpr (std::is_same_v<T, PullResponse>) {
                if (body.mb && microblock_id(*body.mb->body) == body.mb->block->id)
                    store(*body.mb);
            } else if constexpr (std::is_same_v<T, consensus::Proposal>) {
                engine_.on_proposal(from, body);
            } else if constexpr (std::is_same_v<T, consensus::Vote>) {
                engine_.on_vote(from, body);
            } else if constexpr (std::is_same_v<T, consensus::NewView>) {
                engine_.on_new_view(from, body);
            } else if constexpr (std::is_same_v<T, consensus::BlockRequest>) {
                engine_.on_block_request(from, body);
            } else if constexpr (std::is_same_v<T, consensus::BlockResponse>) {
                engine_.on_block_response(from, body);
            }
        },
        msg->body);
}

void PullReplica::store(const FullMicroblock &mb) {
    const auto &b = *mb.block;
    if (b.chain >= n_ || by_id_.contains(b.id) || chains_[b.chain].contains(b.position))
        return;
    if (b.position <= last_committed_[b.chain])
        return;
    by_id_.emplace(b.id, mb);
    chains_[b.chain].emplace(b.position, b.id);
    stored_bytes_ += mb.wire_size();
    engine_.resume();
    try_execute();
}

bool PullReplica::holds(NodeId chain, Position position) const { return chains_[chain].contains(position); }

void PullReplica::pull(NodeId chain, Position position, const Digest &id) {
    if (!pulled_.insert({chain, position}).second)
        return;
    ctx_.schedule(config_.pull_delay, [this, chain, position, id] {
        if (holds(chain, position) || position <= last_committed_[chain])
            return;
        auto msg = netsim::make_message(PullRequest{chain, position, id}, n_);
        for (NodeId j = 0; j < n_; ++j)
            if (j != self_)
                ctx_.send(j, msg);
    });
}

/// Asks every other node for a microblock this node already has.
void PullReplica::spam(NodeId chain, Position position, const Digest &id) {
    if (!spammed_.insert({chain, position}).second)
        return;
    // Wait until honest nodes are likely to hold the microblock, so each request
    // costs them a full copy rather than an empty reply.
    ctx_.schedule(config_.spam_delay, [this, chain, position, id] {
        auto msg = netsim::make_message(PullRequest{chain, position, id}, n_);
        for (NodeId j = 0; j < n_; ++j)
            if (j != self_ && j != chain)
                ctx_.send(j, msg);
    });
}

// -- consensus hooks ---------------------------------------------------------

smp::AvailabilityCertificate PullReplica::own_highest_ac() { return own_ref_; }

std::vector<smp::AvailabilityCertificate> PullReplica::proposal_acs(const std::vector<Position> &included) {
    std::vector<smp::AvailabilityCertificate> out;
    for (NodeId c = 0; c < n_; ++c) {
        Position h = std::max(included[c], last_committed_[c]);
        while (holds(c, h + 1))
            ++h;
        if (h > included[c] && holds(c, h))
            out.push_back(make_ref(c, h, chains_[c].at(h)));
    }
    return out;
}

bool PullReplica::ready_to_vote(const consensus::Block &block) {
    const auto *included = engine_.included(block.parent);
    if (!included)
        return false;
    bool all = true;
    for (const auto &ref : block.mbs) {
        if (ref.chain >= n_)
            return false;
        const Position from = std::max((*included)[ref.chain], last_committed_[ref.chain]);
        for (Position q = ref.position; q > from; --q) {
            if (holds(ref.chain, q))
                continue;
            all = false;
            Digest id;
            if (q == ref.position)
                id = ref.root;
            else if (auto next = chains_[ref.chain].find(q + 1); next != chains_[ref.chain].end())
                id = by_id_.at(next->second).block->prev_ac.root;
            pull(ref.chain, q, id);
        }
    }
    return all;
}

void PullReplica::on_commit(const consensus::BlockPtr &block, std::uint64_t height) {
    ctx_.observer().on_commit(self_, height, *block);
    exec_queue_.push_back(block);
    try_execute();
}

void PullReplica::try_execute() {
    const ordering::Resolver resolve = [this](const Digest &id) {
        auto it = by_id_.find(id);
        if (it == by_id_.end())
            return ordering::Resolution{};
        return ordering::Resolution{smp::EntryState::Decoded, it->second.block};
    };
    while (!exec_queue_.empty()) {
        const auto block = exec_queue_.front();
        auto committed = last_committed_;
        std::vector<ordering::ExpandedMicroblock> slots;
        try {
            slots = ordering::expand_block(block->mbs, committed, resolve);
        } catch (const ordering::NotYetAvailable &e) {
            pull(e.chain, e.position, e.root);
            return;
        }
        auto txs = ordering::build_tx_list(slots, executed_);
        const auto base = ledger_.size();
        ledger_.execute(txs, config_.keep_log);
        for (std::size_t i = 0; i < txs.size(); ++i)
            ctx_.observer().on_execute(self_, base + i, *txs[i].tx, txs[i].key.chain, txs[i].key.position);
        for (const auto &s : slots)
            ctx_.observer().on_resolve(self_, s.chain, s.position, s.root,
                                       s.block ? smp::EntryState::Decoded : smp::EntryState::Empty,
                                       s.block ? s.block->id : Digest{});
        last_committed_ = std::move(committed);
        exec_queue_.pop_front();
    }
}

netsim::NodeStats PullReplica::stats() const {
    netsim::NodeStats s;
    s.stored_bytes = stored_bytes_;
    s.held_positions.resize(n_);
    for (NodeId c = 0; c < n_; ++c) {
        const auto &m = chains_[c];
        s.held_positions[c] = static_cast<std::uint64_t>(
            std::distance(m.upper_bound(last_committed_[c]), m.end()));
    }
    s.view = engine_.view();
    s.committed_height = engine_.committed_height();
    return s;
}

} // namespace imitater::baseline
