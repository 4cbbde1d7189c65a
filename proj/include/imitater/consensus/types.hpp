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

#include <memory>
#include <optional>

#include "imitater/smp/types.hpp"

namespace imitater::consensus {

using primitives::AggregateSignature;
using primitives::PartialSignature;
using primitives::SignatureScheme;
using smp::AvailabilityCertificate;

/// Round-robin leader rotation.
NodeId leader_of(View view, std::size_t n);

/// Digest signed by a vote for `block` proposed in `view`.
Digest vote_digest(View view, const Digest &block);

struct QuorumCertificate {
    View view = 0;
    Digest block;
    AggregateSignature sig;

    static QuorumCertificate genesis();
    bool is_genesis() const;

    void serialize(Writer &w, std::size_t n) const;
    static QuorumCertificate parse(Reader &r);
    std::size_t wire_size(std::size_t n) const { return 8 + kLambda + sig.wire_size(n); }
    bool operator==(const QuorumCertificate &) const = default;
};
using QC = QuorumCertificate;

bool verify_qc(const QuorumCertificate &qc, const SignatureScheme &scheme);

/// Digest a New-View for `view` carrying `qc` is signed over.
Digest new_view_digest(View view, const QuorumCertificate &qc);

struct AggEntry {
    NodeId sender = 0;
    QuorumCertificate qc;
    PartialSignature sig;
    bool operator==(const AggEntry &) const = default;
};

struct AggregatedQC {
    View view = 0; ///< the view the New-Views moved into
    std::vector<AggEntry> entries;

    /// Highest-view member; the first such entry on ties.
    const QuorumCertificate &hqc() const;

    void serialize(Writer &w, std::size_t n) const;
    static AggregatedQC parse(Reader &r);
    std::size_t wire_size(std::size_t n) const;
    bool operator==(const AggregatedQC &) const = default;
};

bool verify_agg_qc(const AggregatedQC &agg, const SignatureScheme &scheme);

struct Block {
    View view = 0;
    std::optional<QuorumCertificate> qc;
    std::optional<AggregatedQC> agg_qc;
    Digest parent;
    std::vector<AvailabilityCertificate> mbs; ///< sorted by chain, one per chain
    Digest hash;

    static const Block &genesis();
    bool is_genesis() const { return view == 0; }
    /// QC certifying the parent: qc, or the hqc of agg_qc.
    const QuorumCertificate &justify() const;

    void serialize(Writer &w, std::size_t n) const;
    static Block parse(Reader &r, std::size_t n);
    std::size_t wire_size(std::size_t n) const;
    Digest compute_hash(std::size_t n) const;
};
using BlockPtr = std::shared_ptr<const Block>;

struct Proposal {
    BlockPtr block;
    std::size_t wire_size(std::size_t n) const { return 1 + block->wire_size(n); }
    Bytes serialize(std::size_t n) const;
    static Proposal parse(ByteView b, std::size_t n);
};

struct Vote {
    View view = 0;
    Digest block;
    PartialSignature sig;
    AvailabilityCertificate ac; ///< voter's highest own AC

    std::size_t wire_size(std::size_t n) const { return 1 + 8 + kLambda + sig.wire_size() + ac.wire_size(n); }
    Bytes serialize(std::size_t n) const;
    static Vote parse(ByteView b);
};

struct NewView {
    View view = 0; ///< the view being entered
    QuorumCertificate hqc;
    PartialSignature sig;
    AvailabilityCertificate ac;

    std::size_t wire_size(std::size_t n) const {
        return 1 + 8 + hqc.wire_size(n) + sig.wire_size() + ac.wire_size(n);
    }
    Bytes serialize(std::size_t n) const;
    static NewView parse(ByteView b);
};

/// Asks a peer for a block this node is missing (an unknown parent).
struct BlockRequest {
    Digest hash;
    std::size_t wire_size(std::size_t) const { return 1 + kLambda; }
    Bytes serialize(std::size_t n) const;
    static BlockRequest parse(ByteView b);
};

struct BlockResponse {
    BlockPtr block;
    std::size_t wire_size(std::size_t n) const { return 1 + block->wire_size(n); }
    Bytes serialize(std::size_t n) const;
    static BlockResponse parse(ByteView b, std::size_t n);
};

/// Builds a QC from at least quorum votes over one block. Throws
/// primitives::ThresholdNotMet on too few valid distinct votes and
/// ProtocolError when the votes name different blocks or views.
QuorumCertificate create_qc(std::span<const std::pair<NodeId, Vote>> votes, const SignatureScheme &scheme);

/// Bundles the QCs of at least quorum New-Views for `view` from distinct senders.
AggregatedQC create_agg_qc(View view, std::span<const std::pair<NodeId, NewView>> new_views,
                           const SignatureScheme &scheme);

/// Block for `view` on top of `parent`, justified by qc (normal case) or agg_qc
/// (after a view change). `acs` are the certificates to carry, one per chain.
Block create_block(View view, std::optional<QuorumCertificate> qc, std::optional<AggregatedQC> agg_qc,
                   const Block &parent, std::vector<AvailabilityCertificate> acs, std::size_t n);

/// Proposal check against the local view: all ACs verify, the justification verifies
/// and the block extends the block it certifies. With a qc, B.view >= current_view and
/// B.view == qc.view + 1; with an agg_qc, B.view == agg_qc.view >= current_view.
bool safe_proposal(const Block &b, View current_view, const SignatureScheme &scheme);

} // namespace imitater::consensus
