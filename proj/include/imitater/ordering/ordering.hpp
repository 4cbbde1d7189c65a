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
#include <ostream>
#include <unordered_set>

#include "imitater/consensus/types.hpp"
#include "imitater/smp/mempool.hpp"

namespace imitater::ordering {

/// A microblock slot produced by expanding a committed block. `block` is null for
/// Empty slots, which count as zero transactions.
struct ExpandedMicroblock {
    NodeId chain = 0;
    Position position = 0;
    Digest root; ///< zero when an earlier link was already broken
    smp::MicroblockPtr block;
};

/// Thrown while some slot is still being retrieved.
class NotYetAvailable : public ProtocolError {
  public:
    NotYetAvailable(const Digest &root, NodeId chain, Position position);
    Digest root;
    NodeId chain;
    Position position;
};

struct Resolution {
    smp::EntryState state = smp::EntryState::Pending;
    smp::MicroblockPtr block;
};

using Resolver = std::function<Resolution(const Digest &)>;
/// Checks a predecessor certificate found inside a decoded body.
using LinkVerifier = std::function<bool(const smp::AvailabilityCertificate &)>;

/// For every certificate (chain i, position p) in `mbs`, yields positions q+1..p of
/// chain i in ascending order, where q = last_committed[i], walking predecessor links
/// from the certified root. A slot that is Empty, inconsistent with its (chain,
/// position), or links to an invalid predecessor makes it and every earlier
/// uncommitted slot of that chain Empty. Updates last_committed on success; throws
/// NotYetAvailable (leaving last_committed untouched) when a slot is Pending.
std::vector<ExpandedMicroblock> expand_block(std::span<const smp::AvailabilityCertificate> mbs,
                                             std::vector<Position> &last_committed, const Resolver &resolve,
                                             const LinkVerifier &verify_link = {});

struct TxKey {
    Position position = 0;
    SimTime created_at = 0;
    NodeId chain = 0;
    std::uint32_t intra_index = 0;
    Digest tx_hash;
    auto operator<=>(const TxKey &) const = default;
};

struct OrderedTx {
    TxKey key;
    smp::TxPtr tx;
};

/// Sorted by TxKey; drops transactions whose hash is in `seen` or repeats within
/// the input, and adds the kept hashes to `seen`.
std::vector<OrderedTx> build_tx_list(std::span<const ExpandedMicroblock> mbs,
                                     std::unordered_set<Digest, DigestHash> &seen);

struct Response {
    std::uint32_t client = 0;
    std::uint64_t seq = 0;
    bool ok = false;
    std::int64_t value = 0;
    bool operator==(const Response &) const = default;
};

struct LogRecord {
    std::uint64_t index = 0;
    NodeId chain = 0;
    Position position = 0;
    std::uint32_t client = 0;
    std::uint64_t seq = 0;
    Digest tx_hash;
    bool ok = false;
    bool operator==(const LogRecord &) const = default;
};

/// A toy key-value/balance state machine with an append-only log.
class LedgerState {
  public:
    /// Applies `txs` in order; returns one response per transaction.
    std::vector<Response> execute(std::span<const OrderedTx> txs, bool keep_log = true);

    std::int64_t get(std::uint32_t key) const;
    std::uint64_t size() const { return applied_; }
    /// Chained digest over every applied transaction and its outcome.
    const Digest &log_digest() const { return log_digest_; }
    /// Digest of the key-value map.
    Digest state_digest() const;
    const std::vector<LogRecord> &log() const { return log_; }
    /// One line per record: index chain position client seq hash ok.
    void export_log(std::ostream &out) const;

  private:
    std::map<std::uint32_t, std::int64_t> kv_;
    std::vector<LogRecord> log_;
    std::uint64_t applied_ = 0;
    Digest log_digest_;
};

} // namespace imitater::ordering
