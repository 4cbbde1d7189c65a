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

#pragma once

#include <map>
#include <set>
#include <unordered_map>

#include "imitater/netsim/context.hpp"

namespace imitater::consensus {

struct EngineConfig {
    SimTime base_timeout = 400 * kMillisecond;
    /// Timeouts double per consecutive failed view, up to base << max_backoff.
    unsigned max_backoff = 3;
    /// Mempool references carry availability certificates that must verify.
    /// The pull-based mempool references by id only and turns this off.
    bool certified_refs = true;
};

/// Byzantine deviations a strategy can switch on. Honest nodes use the defaults.
struct Behavior {
    bool silent_leader = false;
    bool equivocate = false;
    std::vector<NodeId> censored_chains;
    SimTime vote_delay = 0;
};

/// What the consensus engine needs from the node that hosts it.
class EngineHost {
  public:
    virtual ~EngineHost() = default;
    /// Highest AC of this node's own chain; attached to votes and New-Views.
    virtual smp::AvailabilityCertificate own_highest_ac() = 0;
    /// An AC reported by a peer in a vote or New-View (unverified).
    virtual void on_reported_ac(NodeId from, const smp::AvailabilityCertificate &ac) = 0;
    /// Certificates for a new block, given the highest position per chain already
    /// included by the parent branch.
    virtual std::vector<smp::AvailabilityCertificate> proposal_acs(const std::vector<Position> &included) = 0;
    /// False defers the vote until the host calls Engine::resume().
    virtual bool ready_to_vote(const Block &) { return true; }
    /// Blocks are committed in height order, each exactly once.
    virtual void on_commit(const BlockPtr &block, std::uint64_t height) = 0;
    virtual void on_block(const BlockPtr &) {}
};

/// Pipelined Fast-HotStuff with round-robin leaders. One instance per node,
/// driven from the node's event loop.
class Engine {
  public:
    Engine(netsim::Context &ctx, EngineHost &host, const SignatureScheme &scheme, primitives::Signer signer,
           EngineConfig config, Behavior behavior = {});

    void start();

    void on_proposal(NodeId from, const Proposal &p);
    void on_vote(NodeId from, const Vote &v);
    void on_new_view(NodeId from, const NewView &nv);
    void on_block_request(NodeId from, const BlockRequest &req);
    void on_block_response(NodeId from, const BlockResponse &resp);

    /// Retries a vote that ready_to_vote() deferred.
    void resume();

    View view() const { return view_; }
    View last_voted() const { return last_voted_; }
    const QuorumCertificate &high_qc() const { return hqc_; }
    std::uint64_t committed_height() const { return committed_height_; }
    const Digest &committed_tip() const { return committed_tip_; }
    BlockPtr block(const Digest &hash) const;
    /// Highest mempool position per chain included by `hash` and its ancestors.
    const std::vector<Position> *included(const Digest &hash) const;
    std::uint64_t views_failed() const { return timeouts_; }

  private:
    struct Entry {
        BlockPtr block;
        std::vector<Position> included;
        std::uint64_t height = 0;
    };

    void process_block(NodeId from, BlockPtr b, bool direct);
    void try_vote(NodeId from, const BlockPtr &b);
    void try_commit(const Entry &e);
    void commit_upto(const Digest &hash);
    void update_hqc(const QuorumCertificate &qc);
    void try_propose();
    void propose(View view, std::optional<QuorumCertificate> qc, std::optional<AggregatedQC> agg,
                 const Entry &parent);
    void request_block(const Digest &hash, NodeId from);
    void enter_view(View v);
    void arm_timer();
    void on_timeout();
    void timeout_into(View v);
    void sync_views();
    void send(NodeId to, netsim::Body body);
    void broadcast(netsim::Body body);

    netsim::Context &ctx_;
    EngineHost &host_;
    const SignatureScheme &scheme_;
    primitives::Signer signer_;
    EngineConfig config_;
    Behavior behavior_;
    std::size_t n_;

    View view_ = 1;
    View last_voted_ = 0;
    View proposed_upto_ = 0;
    View new_view_sent_ = 0;
    QuorumCertificate hqc_;
    std::uint64_t committed_height_ = 0;
    Digest committed_tip_;

    std::unordered_map<Digest, Entry, DigestHash> blocks_;
    std::multimap<Digest, std::pair<NodeId, BlockPtr>> orphans_;
    std::set<std::pair<Digest, NodeId>> requested_;

    struct VoteSet {
        std::vector<std::pair<NodeId, Vote>> votes;
        std::vector<bool> seen;
        bool done = false;
    };
    std::map<std::pair<View, Digest>, VoteSet> votes_;
    std::map<View, std::vector<std::pair<NodeId, NewView>>> new_views_;
    std::vector<View> peer_view_;
    std::optional<QuorumCertificate> pending_qc_;
    std::optional<AggregatedQC> pending_agg_;
    std::optional<std::pair<NodeId, BlockPtr>> deferred_;

    std::uint64_t timer_gen_ = 0;
    unsigned failed_ = 0;
    std::uint64_t timeouts_ = 0;
};

} // namespace imitater::consensus
