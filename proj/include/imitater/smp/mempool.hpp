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

#include <functional>
#include <map>
#include <unordered_map>
#include <unordered_set>

#include "imitater/smp/messages.hpp"

namespace imitater::smp {

enum class EntryState : std::uint8_t { Pending, Decoded, Empty };

const char *to_string(EntryState s);

/// Per-root retrieval bookkeeping (Algorithm 2's local variables plus flags).
struct RetrievalState {
    NodeId chain = 0;
    Position position = 0;
    std::vector<primitives::Fragment> collected; ///< distinct indices, first wins
    std::vector<bool> sender_seen;
    std::uint32_t chk_seen = 0;     ///< distinct Mb-Chk senders
    std::uint64_t held_bytes = 0;   ///< fragments or decoded block, incl. virtual
    bool triggered = false;
    bool broadcast = false;
    bool decode_triggered = false;
    bool completed_by_observation = false;
    EntryState outcome = EntryState::Pending;
    MicroblockPtr block;
};

/// An acked chunk of (chain, position), kept until the position is committed.
struct ChainSlot {
    Digest root;
    Digest prev_root;
    Chunk chunk;
    primitives::MerkleProof proof;
};

/// Returns true to ack an Mb-Dis for (chain, position), false to withhold.
using AckGuard = std::function<bool(NodeId chain, Position position)>;

struct DecodeTrigger {
    Digest root;
};

struct RetrievalOutput {
    std::vector<MbChk> broadcasts;
    std::vector<Digest> triggered; ///< oldest first
};

/// A withheld Mb-Dis that became acceptable, and the ack to send to `to`.
struct ReleasedAck {
    NodeId to;
    MbAck ack;
};

/// One node's Imitater shared-mempool state: n local chains, the dispersal
/// side of its own chain, and retrieval of everyone's microblocks.
///
/// Not thread-safe; each node drives its own instance from a single event loop.
class Mempool {
  public:
    Mempool(NodeId self, CodingParams params, const SignatureScheme &scheme, primitives::Signer signer);

    NodeId self() const { return self_; }
    const CodingParams &params() const { return params_; }

    void set_guard(AckGuard guard) { guard_ = std::move(guard); }

    // -- dispersal --------------------------------------------------------

    /// Mb-Dis for every node j (index j), including this node. Throws ProtocolError
    /// if this node already dispersed at the microblock's position.
    std::vector<MbDis> start_dispersal(const BuiltMicroblock &mb);

    /// Acks the first valid Mb-Dis per (chain, position). Messages that fail the AC
    /// or Merkle check are dropped; messages the guard rejects are buffered until
    /// release_withheld() accepts them.
    std::optional<MbAck> handle_mb_dis(NodeId from, const MbDis &msg);

    /// Signs any Mb-Dis whose proof verifies, ignoring the first-message rule.
    /// Only Byzantine strategies call this.
    std::optional<MbAck> sign_any(const MbDis &msg) const;

    /// Accepts acks for a microblock dispersed outside start_dispersal().
    void expect_acks(Position p, const Digest &root);

    /// Re-checks buffered Mb-Dis against the guard.
    std::vector<ReleasedAck> release_withheld();

    /// Collects partials for this node's own microblocks; returns the AC on the
    /// (2f+1)-th distinct valid partial.
    std::optional<AvailabilityCertificate> handle_mb_ack(NodeId from, const MbAck &msg);

    // -- retrieval --------------------------------------------------------

    /// Starts retrieval of `root` at most once, broadcasting the local chunk when
    /// one is held and recursing into untriggered predecessors.
    RetrievalOutput trigger_retrieval(const Digest &root, NodeId chain, Position position);

    /// Adds a verified chunk (first per sender per root). Returns a decode trigger
    /// exactly once, when f+1 distinct chunks are held.
    std::optional<DecodeTrigger> handle_mb_chk(NodeId from, const MbChk &msg);

    /// Decodes, re-encodes and compares roots: Decoded on match, Empty otherwise.
    EntryState finalize_decode(const Digest &root);

    /// After a decode, continues retrieval into the decoded predecessor link.
    RetrievalOutput after_decode(const Digest &root);

    // -- queries ----------------------------------------------------------

    AvailabilityCertificate highest_ac() const;
    std::optional<AvailabilityCertificate> own_ac(Position p) const;
    Position next_position() const { return highest_position_ + 1; }
    bool has_dispersed(Position p) const { return dispersed_.contains(p); }

    EntryState state_of(const Digest &root) const;
    MicroblockPtr block_of(const Digest &root) const;
    const RetrievalState *retrieval(const Digest &root) const;
    bool retrieval_triggered(const Digest &root) const;

    /// Positions of `chain` holding an acked chunk that is not yet resolved.
    std::size_t undecoded_positions(NodeId chain) const;
    /// Chunk, fragment and decoded-microblock bytes currently held (incl. virtual).
    std::uint64_t stored_bytes() const { return stored_bytes_; }
    std::size_t withheld_count() const { return withheld_.size(); }
    /// Acked chunks held for `chain` (positions above its last release).
    std::size_t held_positions(NodeId chain) const { return chains_.at(chain).size(); }

    std::uint64_t dispersals_started() const { return dispersed_.size(); }
    std::uint64_t own_retrievals_completed() const { return own_completed_; }

    // -- garbage collection -----------------------------------------------

    /// Frees everything held for positions <= `position` of `chain`, and the
    /// retrieval state of the listed roots. Late Mb-Chk for freed roots are ignored.
    void release(NodeId chain, Position position, std::span<const Digest> roots);

  private:
    RetrievalState &state_for(const Digest &root, NodeId chain, Position position);
    void note_own_completion(const Digest &root);
    std::optional<MbAck> accept_dis(const MbDis &msg);
    bool verify_dis(const MbDis &msg) const;
    std::uint64_t chunk_bytes(const Chunk &c) const { return c.data.size() + c.virtual_len; }

    NodeId self_;
    CodingParams params_;
    const SignatureScheme &scheme_;
    primitives::Signer signer_;
    AckGuard guard_;

    // chain -> position -> slot
    std::vector<std::map<Position, ChainSlot>> chains_;
    std::vector<Position> gc_floor_;
    // (chain, position) -> first withheld message
    std::map<std::pair<NodeId, Position>, MbDis> withheld_;

    struct AckAccumulator {
        std::vector<PartialSignature> partials;
        std::vector<bool> seen;
        bool done = false;
    };
    std::map<std::pair<Position, Digest>, AckAccumulator> acks_;
    std::map<Position, AvailabilityCertificate> own_acs_;
    std::unordered_set<Position> dispersed_;
    Position highest_position_ = 0;

    std::unordered_map<Digest, RetrievalState, DigestHash> retrievals_;
    std::unordered_set<Digest, DigestHash> finished_;
    std::unordered_set<Digest, DigestHash> own_roots_;
    std::unordered_set<Digest, DigestHash> own_counted_;
    std::uint64_t own_completed_ = 0;
    std::uint64_t stored_bytes_ = 0;
};

} // namespace imitater::smp
