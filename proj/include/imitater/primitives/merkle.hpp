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

#include "imitater/common.hpp"

namespace imitater::primitives {

/// Sibling digests from leaf level upwards.
struct MerkleProof {
    std::vector<Digest> siblings;

    std::size_t wire_size() const { return siblings.size() * kLambda; }
    bool operator==(const MerkleProof &) const = default;
};

struct MerkleTree {
    Digest root;
    std::vector<MerkleProof> proofs;
};

/// Leaves are hashed as H(0x00 || leaf), interior nodes as H(0x01 || l || r).
/// An odd level duplicates its last node, so every proof has ceil(log2 n) entries.
MerkleTree merkle_build(std::span<const Bytes> leaves);

/// Root only; avoids materialising proofs.
Digest merkle_root(std::span<const Bytes> leaves);

/// True iff `leaf` sits at `index` of a tree with the given root.
bool merkle_verify(const MerkleProof &proof, ByteView leaf, std::size_t index, const Digest &root);

/// ceil(log2 n), the proof length for an n-leaf tree.
std::size_t merkle_depth(std::size_t n);

} // namespace imitater::primitives
