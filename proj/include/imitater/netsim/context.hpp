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

#include "imitater/netsim/message.hpp"
#include "imitater/smp/mempool.hpp"

namespace imitater::netsim {

/// Protocol events reported by nodes. The simulator turns them into metrics and,
/// optionally, a trace that the post-run invariant checks consume.
class Observer {
  public:
    virtual ~Observer() = default;
    virtual void on_submit(NodeId, const smp::Transaction &) {}
    virtual void on_ac(NodeId, const smp::AvailabilityCertificate &) {}
    virtual void on_chk_broadcast(NodeId, const Digest &) {}
    virtual void on_resolve(NodeId, NodeId, Position, const Digest &, smp::EntryState, const Digest &) {}
    virtual void on_commit(NodeId, std::uint64_t, const consensus::Block &) {}
    virtual void on_execute(NodeId, std::uint64_t, const smp::Transaction &, NodeId, Position) {}
    virtual void on_qc(NodeId, const consensus::QuorumCertificate &) {}
    virtual void on_pacer(NodeId, SimTime, std::uint64_t, std::uint64_t) {}
};

/// What a node may do: read the clock, send, and schedule callbacks on itself.
class Context {
  public:
    virtual ~Context() = default;
    virtual SimTime now() const = 0;
    virtual NodeId self() const = 0;
    virtual std::size_t n() const = 0;
    virtual void send(NodeId to, MessagePtr msg) = 0;
    /// To every node, this one included.
    virtual void broadcast(const MessagePtr &msg) = 0;
    virtual void schedule(SimTime delay, std::function<void()> fn) = 0;
    /// Time until this node's uplink has drained everything queued so far.
    virtual SimTime uplink_backlog() const = 0;
    virtual Observer &observer() = 0;
};

struct NodeStats {
    std::uint64_t stored_bytes = 0;
    /// Per chain: positions held above the last committed one.
    std::vector<std::uint64_t> held_positions;
    std::uint64_t dispersals = 0;
    std::uint64_t retrievals = 0;
    SimTime tau = 0;
    View view = 0;
    std::uint64_t committed_height = 0;
};

class Node {
  public:
    virtual ~Node() = default;
    virtual void start() = 0;
    virtual void on_message(NodeId from, const MessagePtr &msg) = 0;
    virtual void on_client_tx(smp::TxPtr tx) = 0;
    virtual NodeStats stats() const = 0;
    virtual View current_view() const = 0;
};

} // namespace imitater::netsim
