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

#include <deque>

#include "imitater/consensus/engine.hpp"
#include "imitater/netsim/strategy.hpp"
#include "imitater/ordering/ordering.hpp"

namespace imitater::baseline {

struct PullConfig {
    consensus::EngineConfig engine;
    std::size_t batch_size = 256;
    /// A new microblock is cut only while the uplink backlog is below this.
    SimTime max_backlog = 2 * kMillisecond;
    /// How often an idle node re-checks whether to cut a microblock.
    SimTime poll_interval = 2 * kMillisecond;
    /// Grace period for a missing microblock to arrive on its own before pulling.
    SimTime pull_delay = 400 * kMillisecond;
    /// PullSpammer only: how long after receiving a microblock it asks everyone for it.
    SimTime spam_delay = 200 * kMillisecond;
    bool keep_log = true;
};

/// Pull-based shared mempool under the same consensus: full microblocks are
/// broadcast, leaders reference them by id, and a node pulls whatever it is
/// missing from every peer before voting or executing.
class PullReplica : public netsim::Node, public consensus::EngineHost {
  public:
    PullReplica(netsim::Context &ctx, const primitives::SignatureScheme &scheme, PullConfig config,
                netsim::Strategy strategy);

    void start() override;
    void on_message(NodeId from, const netsim::MessagePtr &msg) override;
    void on_client_tx(smp::TxPtr tx) override;
    netsim::NodeStats stats() const override;
    View current_view() const override { return engine_.view(); }

    smp::AvailabilityCertificate own_highest_ac() override;
    void on_reported_ac(NodeId, const smp::AvailabilityCertificate &) override {}
    std::vector<smp::AvailabilityCertificate> proposal_acs(const std::vector<Position> &included) override;
    bool ready_to_vote(const consensus::Block &block) override;
    void on_commit(const consensus::BlockPtr &block, std::uint64_t height) override;

    const ordering::LedgerState &ledger() const { return ledger_; }
    const consensus::Engine &engine() const { return engine_; }
    std::uint64_t pulls_served() const { return pulls_served_; }

  private:
    void store(const FullMicroblock &mb);
    bool holds(NodeId chain, Position position) const;
    void pull(NodeId chain, Position position, const Digest &id);
    void spam(NodeId chain, Position position, const Digest &id);
    void tick();
    void cut_microblock();
    void try_execute();

    netsim::Context &ctx_;
    const primitives::SignatureScheme &scheme_;
    PullConfig config_;
    netsim::Strategy strategy_;
    NodeId self_;
    std::size_t n_;
    consensus::Engine engine_;
    ordering::LedgerState ledger_;
    std::unordered_set<Digest, DigestHash> executed_;

    std::unordered_map<Digest, FullMicroblock, DigestHash> by_id_;
    std::vector<std::map<Position, Digest>> chains_;
    std::set<std::pair<NodeId, Position>> pulled_;
    std::set<std::pair<NodeId, Position>> spammed_;
    std::deque<smp::TxPtr> pending_;
    Position own_position_ = 0;
    smp::AvailabilityCertificate own_ref_;
    std::vector<Position> last_committed_;
    std::deque<consensus::BlockPtr> exec_queue_;
    std::uint64_t stored_bytes_ = 0;
    std::uint64_t pulls_served_ = 0;
};

} // namespace imitater::baseline
