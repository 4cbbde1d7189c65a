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

#include "imitater/smp/types.hpp"

namespace imitater::smp {

/// An indexed chunk. `virtual_len` is this chunk's share of the microblock's
/// virtual payload; it is charged by the bandwidth model and serialized as zeros.
struct Chunk {
    std::uint32_t index = 0;
    Bytes data;
    std::uint32_t virtual_len = 0;

    bool operator==(const Chunk &) const = default;
};

// Canonical layouts (little-endian, every field fixed width unless noted):
//
//   Mb-Dis  u8 tag | u32 chain | u64 position | root | AC | chunk | proof
//   Mb-Ack  u8 tag | u32 chain | u64 position | root | partial
//   Mb-Chk  u8 tag | u32 chain | u64 position | root | chunk | proof
//
//   AC      u32 chain | u64 position | root | aggregate
//   aggregate  u32 len | signer bitmap | u32 len | material
//   partial u32 signer | u32 len | material
//   chunk   u32 index | u32 len | data | u32 virtual_len | virtual_len zero bytes
//   proof   u32 count | count digests
//
// wire_size() returns exactly serialize().size().

struct MbDis {
    NodeId chain = 0;
    Position position = 0;
    Digest root;
    AvailabilityCertificate prev_ac;
    Chunk chunk;
    primitives::MerkleProof proof;

    std::size_t wire_size(std::size_t n) const;
    Bytes serialize(std::size_t n) const;
    static MbDis parse(ByteView b);
};

struct MbAck {
    NodeId chain = 0;
    Position position = 0;
    Digest root;
    PartialSignature sig;

    std::size_t wire_size(std::size_t n) const;
    Bytes serialize(std::size_t n) const;
    static MbAck parse(ByteView b);
};

struct MbChk {
    NodeId chain = 0;
    Position position = 0;
    Digest root;
    Chunk chunk;
    primitives::MerkleProof proof;

    std::size_t wire_size(std::size_t n) const;
    Bytes serialize(std::size_t n) const;
    static MbChk parse(ByteView b);
};

enum class WireTag : std::uint8_t {
    MbDis = 1,
    MbAck = 2,
    MbChk = 3,
    Proposal = 4,
    Vote = 5,
    NewView = 6,
    MbFull = 7,
    PullRequest = 8,
    PullResponse = 9,
    BlockRequest = 10,
    BlockResponse = 11,
};

void serialize_chunk(Writer &w, const Chunk &c);
Chunk parse_chunk(Reader &r);
std::size_t chunk_wire_size(const Chunk &c);
void serialize_proof(Writer &w, const primitives::MerkleProof &p);
primitives::MerkleProof parse_proof(Reader &r);

} // namespace imitater::smp
