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

#include "imitater/smp/messages.hpp"

namespace imitater::baseline {

/// A microblock as broadcast in full by the pull-based mempool. Its id is the
/// hash of the body; the predecessor reference reuses the AC layout with an
/// empty signature.
struct FullMicroblock {
    smp::MicroblockPtr block;
    std::shared_ptr<const Bytes> body;

    std::size_t wire_size() const { return kLambda + 4 + body->size() + 4 + block->virtual_total; }
};

Digest microblock_id(ByteView body);

/// A reference to (chain, position, id) in consensus blocks and body links.
smp::AvailabilityCertificate make_ref(NodeId chain, Position position, const Digest &id);

FullMicroblock make_full_microblock(NodeId chain, Position position, std::vector<smp::TxPtr> txs,
                                    const smp::AvailabilityCertificate &prev_ref, SimTime now, std::size_t n);

/// Parses a full microblock and checks its id. Throws ProtocolError.
FullMicroblock parse_full_microblock(ByteView body, std::uint32_t virtual_total);

struct MbFull {
    FullMicroblock mb;
    std::size_t wire_size(std::size_t) const { return 1 + mb.wire_size(); }
    Bytes serialize(std::size_t n) const;
};

struct PullRequest {
    NodeId chain = 0;
    Position position = 0;
    Digest id;
    std::size_t wire_size(std::size_t) const { return 1 + 4 + 8 + kLambda; }
    Bytes serialize(std::size_t n) const;
    static PullRequest parse(ByteView b);
};

/// Answer to a pull; `mb` is empty when the responder does not hold the id.
struct PullResponse {
    Digest id;
    std::optional<FullMicroblock> mb;
    std::size_t wire_size(std::size_t) const { return 1 + kLambda + 1 + (mb ? mb->wire_size() : 0); }
    Bytes serialize(std::size_t n) const;
};

} // namespace imitater::baseline
