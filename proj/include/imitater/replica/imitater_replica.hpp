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
#include "imitater/pacing/pacer.hpp"

namespace imitater::replica {

struct ReplicaConfig {
    primitives::CodingParams params;
    consensus::EngineConfig engine;
    pacing::PacerConfig pacer;
    std::uint64_t k_threshold = 32;
    bool guard_enabled = true;
    bool keep_log = true;
    /// Payload of each junk transaction a Flooder packs (virtual bytes).
    std::uint32_t junk_size = 1024;
};

/// An Imitater-FHS node: shared mempool, consensus, pacing and execution on one
/// event loop. Byzantine strategies are deviations switched on inside it.
class ImitaterReplica : public netsim::Node, public consensus::EngineHost {
  public:
    ImitaterReplica(netsim::Context &ctx, const primitives::SignatureScheme &scheme, ReplicaConfig config,
                    netsim::Strategy strategy);

    // netsim::Node
    void start() override;
    void on_message(NodeId from, const netsim::MessagePtr &msg) override;
    void on_client_tx(smp::TxPtr tx) override;
    netsim::NodeStats stats() const override;
    View current_view() const override { return engine_.view(); }

    // consensus::EngineHost
    smp::AvailabilityCertificate own_highest_ac() override;
    void on_reported_ac(NodeId from, const smp::AvailabilityCertificate &ac) override;
    std::vector<smp::AvailabilityCertificate> proposal_acs(const std::vector<Position> &included) override;
    void on_commit(const consensus::BlockPtr &block, std::uint64_t height) override;

    const ordering::LedgerState &ledger() const { return ledger_; }
    const smp::Mempool &mempool() const { return mempool_; }
    const consensus::Engine &engine() const { return engine_; }
    const pacing::PacerState &pacer() const { return pacer_; }
    const std::vector<Position> &last_committed() const { return last_committed_; }
    std::size_t pending_txs() const { return pending_.size(); }

  private:
    void on_mb_dis(NodeId from, const smp::MbDis &m);
    void on_mb_ack(NodeId from, const smp::MbAck &m);
    void on_mb_chk(NodeId from, const smp::MbChk &m);
    void broadcast_chunks(const smp::RetrievalOutput &out);
    void try_disperse();
    void disperse_honest(std::size_t take);
    void disperse_equivocating(std::size_t take);
    void schedule_tick(SimTime delay);
    void try_execute();
    void send_acks(const std::vector<smp::ReleasedAck> &acks);
    std::vector<smp::TxPtr> take_pending(std::size_t count);
    Digest content_digest(const smp::Microblock &mb) const;

    netsim::Context &ctx_;
    const primitives::SignatureScheme &scheme_;
    ReplicaConfig config_;
    netsim::Strategy strategy_;
    NodeId self_;
    std::size_t n_;

    smp::Mempool mempool_;
    consensus::Engine engine_;
    pacing::PacerState pacer_;
    ordering::LedgerState ledger_;
    std::unordered_set<Digest, DigestHash> executed_;

    std::deque<smp::TxPtr> pending_;
    std::vector<std::optional<smp::AvailabilityCertificate>> latest_;
    std::vector<Position> last_committed_;
    std::deque<std::pair<consensus::BlockPtr, std::uint64_t>> exec_queue_;
    std::optional<SimTime> last_dispersal_;
    bool tick_armed_ = false;
    std::uint64_t junk_seq_ = 0;
};

} // namespace imitater::replica
