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

#include "imitater/bytes.hpp"
#include "imitater/primitives/erasure.hpp"
#include "imitater/primitives/merkle.hpp"
#include "imitater/primitives/signature.hpp"

namespace imitater::smp {

using primitives::AggregateSignature;
using primitives::CodingParams;
using primitives::PartialSignature;
using primitives::SignatureScheme;

enum class TxOp : std::uint8_t { Put = 0, Get = 1, Credit = 2, Debit = 3 };

/// A client request. `data` is carried and coded for real; `virtual_size` bytes are
/// only charged by the bandwidth model (used to simulate large payloads cheaply).
struct Transaction {
    std::uint32_t client = 0;
    std::uint64_t seq = 0;
    std::uint8_t op = 0;
    std::uint32_t key = 0;
    std::int64_t value = 0;
    Bytes data;
    std::uint32_t virtual_size = 0;
    Digest hash;

    static Transaction make(std::uint32_t client, std::uint64_t seq, TxOp op, std::uint32_t key, std::int64_t value,
                            Bytes data = {}, std::uint32_t virtual_size = 0);

    void serialize(Writer &w) const;
    static Transaction parse(Reader &r);
    /// Serialized length (without virtual bytes).
    std::size_t encoded_size() const { return 4 + 8 + 1 + 4 + 8 + 4 + data.size() + 4; }
    Digest compute_hash() const;
};
using TxPtr = std::shared_ptr<const Transaction>;

/// C_p^i: an aggregate over (chain, position, root). Position 0 is the genesis
/// certificate of each chain, accepted without a signature.
struct AvailabilityCertificate {
    NodeId chain = 0;
    Position position = 0;
    Digest root;
    AggregateSignature sig;

    static AvailabilityCertificate genesis(NodeId chain) { return AvailabilityCertificate{chain, 0, Digest{}, {}}; }
    bool is_genesis() const { return position == 0 && root.is_zero() && sig.empty(); }

    /// The digest partial signatures (Mb-Ack) are computed over.
    static Digest ack_digest(NodeId chain, Position position, const Digest &root);

    void serialize(Writer &w, std::size_t n) const;
    static AvailabilityCertificate parse(Reader &r);
    std::size_t wire_size(std::size_t n) const { return 4 + 8 + kLambda + sig.wire_size(n); }

    bool operator==(const AvailabilityCertificate &) const = default;
};
using AC = AvailabilityCertificate;

bool verify_ac(const AvailabilityCertificate &ac, const SignatureScheme &scheme);

/// Aggregate signatures serialize their signer set as a bitmap of ceil(n/8) bytes.
void serialize_aggregate(Writer &w, const AggregateSignature &sig, std::size_t n);
AggregateSignature parse_aggregate(Reader &r);
void serialize_partial(Writer &w, const PartialSignature &sig);
PartialSignature parse_partial(Reader &r);

class ChainBreak : public ProtocolError {
  public:
    using ProtocolError::ProtocolError;
};

/// Chunks, proofs and root of one coded microblock.
struct Encoding {
    std::vector<Bytes> chunks;
    primitives::MerkleTree tree;
    std::size_t frame_size = 0;
};

/// b_p^i: a batch of transactions on chain i at position p, linked to its
/// predecessor through prev_ac. Its identifier is the Merkle root of its coded chunks.
struct Microblock {
    NodeId chain = 0;
    Position position = 0;
    SimTime created_at = 0;
    AvailabilityCertificate prev_ac;
    std::vector<TxPtr> txs;
    Digest id;
    std::size_t body_size = 0;     ///< serialized body bytes
    std::uint64_t virtual_total = 0; ///< sum of transaction virtual sizes

    /// Serialized size plus virtual payload; the "m" of the cost model.
    std::uint64_t modeled_size() const { return body_size + virtual_total; }
};
using MicroblockPtr = std::shared_ptr<const Microblock>;

/// Canonical body: chain, position, created_at, prev_ac, tx count, txs.
Bytes serialize_body(NodeId chain, Position position, SimTime created_at, const AvailabilityCertificate &prev_ac,
                     std::span<const TxPtr> txs, std::size_t n);
/// Parses a body; the id is supplied by the caller (it is not part of the body).
Microblock parse_body(ByteView body, const Digest &id);

/// Codes `body` and commits to the chunks.
Encoding encode_body(ByteView body, const CodingParams &params);

struct BuiltMicroblock {
    MicroblockPtr block;
    std::shared_ptr<const Encoding> encoding;
};

/// Builds the next microblock of `chain`. Throws ChainBreak unless prev_ac is for
/// (chain, position-1), or the genesis certificate when position == 1.
BuiltMicroblock make_microblock(NodeId chain, Position position, std::vector<TxPtr> txs,
                                const AvailabilityCertificate &prev_ac, SimTime now, const CodingParams &params);

} // namespace imitater::smp
