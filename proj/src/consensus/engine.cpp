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

#include "imitater/consensus/engine.hpp"

#include <algorithm>

namespace imitater::consensus {

Engine::Engine(netsim::Context &ctx, EngineHost &host, const SignatureScheme &scheme, primitives::Signer signer,
               EngineConfig config, Behavior behavior)
    : ctx_(ctx), host_(host), scheme_(scheme), signer_(std::move(signer)), config_(config),
      behavior_(std::move(behavior)), n_(scheme.n()), hqc_(QuorumCertificate::genesis()),
      committed_tip_(Block::genesis().hash) {
    auto g = std::make_shared<Block>(Block::genesis());
    blocks_.emplace(g->hash, Entry{g, std::vector<Position>(n_, 0), 0});
    peer_view_.assign(n_, 0);
}

void Engine::start() {
    enter_view(1);
    if (leader_of(1, n_) == ctx_.self())
        pending_qc_ = QuorumCertificate::genesis();
    try_propose();
}

BlockPtr Engine::block(const Digest &hash) const {
    auto it = blocks_.find(hash);
    return it == blocks_.end() ? nullptr : it->second.block;
}

const std::vector<Position> *Engine::included(const Digest &hash) const {
    auto it = blocks_.find(hash);
    return it == blocks_.end() ? nullptr : &it->second.included;
}

void Engine::send(NodeId to, netsim::Body body) { ctx_.send(to, netsim::make_message(std::move(body), n_)); }

void Engine::broadcast(netsim::Body body) { ctx_.broadcast(netsim::make_message(std::move(body), n_)); }

// -- blocks ------------------------------------------------------------------

void Engine::on_proposal(NodeId from, const Proposal &p) {
    if (p.block)
        process_block(from, p.block, true);
}

void Engine::on_block_response(NodeId from, const BlockResponse &resp) {
    if (resp.block)
        process_block(from, resp.block, false);
}

void Engine::on_block_request(NodeId from, const BlockRequest &req) {
    if (auto b = block(req.hash); b && !b->is_genesis())
        send(from, BlockResponse{b});
}

void Engine::process_block(NodeId from, BlockPtr b, bool direct) {
    if (b->is_genesis() || blocks_.contains(b->hash))
        return;
    if (b->hash != b->compute_hash(n_))
        return;
    // Structural validity only; the view freshness check belongs to voting.
    bool ok = false;
    if (config_.certified_refs) {
        ok = safe_proposal(*b, 0, scheme_);
    } else {
        Block stripped = *b;
        stripped.mbs.clear();
        ok = safe_proposal(stripped, 0, scheme_);
        for (std::size_t i = 1; ok && i < b->mbs.size(); ++i)
            ok = b->mbs[i].chain > b->mbs[i - 1].chain;
        for (const auto &ref : b->mbs)
            ok = ok && ref.chain < n_ && ref.position > 0;
    }
    if (!ok)
        return;

    auto parent = blocks_.find(b->parent);
    if (parent == blocks_.end()) {
        orphans_.emplace(b->parent, std::make_pair(direct ? from : static_cast<NodeId>(n_), b));
        request_block(b->parent, from);
        return;
    }

    Entry e{b, parent->second.included, parent->second.height + 1};
    for (const auto &ac : b->mbs)
        e.included[ac.chain] = std::max(e.included[ac.chain], ac.position);
    const auto &stored = blocks_.emplace(b->hash, std::move(e)).first->second;

    host_.on_block(b);
    update_hqc(b->justify());
    try_commit(stored);
    if (direct)
        try_vote(from, b);

    auto [lo, hi] = orphans_.equal_range(b->hash);
    std::vector<std::pair<NodeId, BlockPtr>> children;
    for (auto it = lo; it != hi; ++it)
        children.push_back(it->second);
    orphans_.erase(lo, hi);
    for (auto &[origin, child] : children) {
        const bool was_direct = origin < n_;
        process_block(was_direct ? origin : from, child, was_direct);
    }
    try_propose();
}

void Engine::request_block(const Digest &hash, NodeId from) {
    if (from >= n_ || from == ctx_.self())
        return;
    if (requested_.insert({hash, from}).second)
        send(from, BlockRequest{hash});
}

void Engine::update_hqc(const QuorumCertificate &qc) {
    if (qc.view > hqc_.view)
        hqc_ = qc;
}

// -- voting ------------------------------------------------------------------

void Engine::try_vote(NodeId from, const BlockPtr &b) {
    if (b->view < view_ || b->view <= last_voted_ || from != leader_of(b->view, n_))
        return;
    if (!host_.ready_to_vote(*b)) {
        deferred_ = std::make_pair(from, b);
        return;
    }
    deferred_.reset();
    last_voted_ = b->view;
    failed_ = 0;
    enter_view(b->view + 1);

    Vote v{b->view, b->hash, signer_.sign(vote_digest(b->view, b->hash)), host_.own_highest_ac()};
    const NodeId next = leader_of(b->view + 1, n_);
    if (behavior_.vote_delay > 0) {
        ctx_.schedule(behavior_.vote_delay, [this, next, v] { send(next, v); });
    } else {
        send(next, std::move(v));
    }
}

void Engine::resume() {
    if (deferred_) {
        auto [from, b] = *deferred_;
        try_vote(from, b);
    }
}

void Engine::on_vote(NodeId from, const Vote &v) {
    if (from >= n_)
        return;
    host_.on_reported_ac(from, v.ac);
    if (leader_of(v.view + 1, n_) != ctx_.self() || v.view + 1 <= proposed_upto_)
        return;
    auto &set = votes_[{v.view, v.block}];
    if (set.seen.empty())
        set.seen.assign(n_, false);
    if (set.done || set.seen[from] || v.sig.signer != from)
        return;
    if (!scheme_.verify_partial(vote_digest(v.view, v.block), v.sig))
        return;
    set.seen[from] = true;
    set.votes.emplace_back(from, v);
    if (set.votes.size() < scheme_.quorum())
        return;

    set.done = true;
    auto qc = create_qc(set.votes, scheme_);
    set.votes.clear();
    ctx_.observer().on_qc(ctx_.self(), qc);
    update_hqc(qc);
    if (!pending_qc_ || pending_qc_->view < qc.view)
        pending_qc_ = qc;
    // Old vote sets can never be used again.
    votes_.erase(votes_.begin(), votes_.lower_bound({v.view, Digest{}}));
    try_propose();
}

// -- commit ------------------------------------------------------------------

void Engine::try_commit(const Entry &e) {
    auto p1 = blocks_.find(e.block->parent);
    if (p1 == blocks_.end() || p1->second.block->is_genesis())
        return;
    auto p2 = blocks_.find(p1->second.block->parent);
    if (p2 == blocks_.end() || p2->second.block->is_genesis())
        return;
    if (p1->second.block->view == p2->second.block->view + 1)
        commit_upto(p2->first);
}

void Engine::commit_upto(const Digest &hash) {
    auto it = blocks_.find(hash);
    if (it == blocks_.end() || it->second.height <= committed_height_)
        return;
    std::vector<const Entry *> chain;
    const Entry *cur = &it->second;
    while (cur->height > committed_height_) {
        chain.push_back(cur);
        cur = &blocks_.at(cur->block->parent);
    }
    if (cur->block->hash != committed_tip_)
        throw std::logic_error("commit conflicts with the committed chain");
    for (auto e = chain.rbegin(); e != chain.rend(); ++e) {
        committed_height_ = (*e)->height;
        committed_tip_ = (*e)->block->hash;
        host_.on_commit((*e)->block, committed_height_);
    }
}

// -- proposing ---------------------------------------------------------------

void Engine::try_propose() {
    if (behavior_.silent_leader)
        return;
    if (pending_qc_ && pending_qc_->view + 1 > proposed_upto_ && pending_qc_->view + 1 >= view_ &&
        leader_of(pending_qc_->view + 1, n_) == ctx_.self()) {
        auto parent = blocks_.find(pending_qc_->block);
        if (parent == blocks_.end()) {
            for (NodeId j = 0; j < n_; ++j)
                request_block(pending_qc_->block, j);
            return;
        }
        auto qc = *pending_qc_;
        pending_qc_.reset();
        propose(qc.view + 1, qc, std::nullopt, parent->second);
        return;
    }
    if (pending_agg_ && pending_agg_->view > proposed_upto_ && pending_agg_->view >= view_) {
        const auto &hqc = pending_agg_->hqc();
        auto parent = blocks_.find(hqc.block);
        if (parent == blocks_.end()) {
            for (const auto &e : pending_agg_->entries)
                if (e.qc.view == hqc.view)
                    request_block(hqc.block, e.sender);
            return;
        }
        auto agg = *pending_agg_;
        pending_agg_.reset();
        propose(agg.view, std::nullopt, std::move(agg), parent->second);
    }
}

void Engine::propose(View view, std::optional<QuorumCertificate> qc, std::optional<AggregatedQC> agg,
                     const Entry &parent) {
    if (view_ < view)
        enter_view(view);
    proposed_upto_ = view;
    auto acs = host_.proposal_acs(parent.included);
    if (!behavior_.censored_chains.empty()) {
        std::erase_if(acs, [&](const auto &ac) {
            return std::find(behavior_.censored_chains.begin(), behavior_.censored_chains.end(), ac.chain) !=
                   behavior_.censored_chains.end();
        });
    }
    auto block = std::make_shared<Block>(create_block(view, qc, agg, *parent.block, acs, n_));
    if (!behavior_.equivocate || acs.empty()) {
        broadcast(Proposal{block});
        return;
    }
    auto twin = std::make_shared<Block>(create_block(view, qc, agg, *parent.block, {}, n_));
    auto first = netsim::make_message(Proposal{block}, n_);
    auto second = netsim::make_message(Proposal{twin}, n_);
    for (NodeId j = 0; j < n_; ++j)
        ctx_.send(j, j < n_ / 2 ? first : second);
}

// -- view changes ------------------------------------------------------------

void Engine::enter_view(View v) {
    view_ = v;
    arm_timer();
}

void Engine::arm_timer() {
    const auto gen = ++timer_gen_;
    const auto duration = config_.base_timeout << std::min(failed_, config_.max_backoff);
    ctx_.schedule(duration, [this, gen] {
        if (gen == timer_gen_)
            on_timeout();
    });
}

void Engine::on_timeout() {
    ++failed_;
    ++timeouts_;
    timeout_into(view_ + 1);
}

void Engine::timeout_into(View v) {
    if (v > new_view_sent_) {
        new_view_sent_ = v;
        NewView nv{v, hqc_, signer_.sign(new_view_digest(v, hqc_)), host_.own_highest_ac()};
        broadcast(std::move(nv));
    }
    enter_view(v);
}

void Engine::on_new_view(NodeId from, const NewView &nv) {
    if (from >= n_ || nv.sig.signer != from || nv.hqc.view >= nv.view)
        return;
    if (!scheme_.verify_partial(new_view_digest(nv.view, nv.hqc), nv.sig) || !verify_qc(nv.hqc, scheme_))
        return;
    host_.on_reported_ac(from, nv.ac);
    update_hqc(nv.hqc);
    peer_view_[from] = std::max(peer_view_[from], nv.view);

    if (leader_of(nv.view, n_) == ctx_.self() && nv.view > proposed_upto_) {
        auto &bucket = new_views_[nv.view];
        const bool dup =
            std::any_of(bucket.begin(), bucket.end(), [&](const auto &e) { return e.first == from; });
        if (!dup)
            bucket.emplace_back(from, nv);
        if (bucket.size() >= scheme_.quorum() && (!pending_agg_ || pending_agg_->view < nv.view)) {
            pending_agg_ = create_agg_qc(nv.view, bucket, scheme_);
            new_views_.erase(new_views_.begin(), new_views_.upper_bound(nv.view));
        }
    }
    sync_views();
    try_propose();
}

/// f+1 peers announcing higher views include an honest one; follow them so that
/// honest nodes that drifted apart meet in one view again.
void Engine::sync_views() {
    std::vector<View> ahead;
    for (NodeId j = 0; j < n_; ++j)
        if (j != ctx_.self() && peer_view_[j] > view_)
            ahead.push_back(peer_view_[j]);
    const auto need = scheme_.f() + 1;
    if (ahead.size() < need)
        return;
    std::nth_element(ahead.begin(), ahead.begin() + static_cast<std::ptrdiff_t>(need - 1), ahead.end(),
                     std::greater<>());
    timeout_into(ahead[need - 1]);
}

} // namespace imitater::consensus
