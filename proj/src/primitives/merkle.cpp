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

#include "imitater/primitives/merkle.hpp"

#include "imitater/primitives/hash.hpp"

namespace imitater::primitives {

namespace {

constexpr std::uint8_t kLeafTag = 0x00;
constexpr std::uint8_t kNodeTag = 0x01;

Digest hash_leaf(ByteView leaf) {
    const std::uint8_t tag = kLeafTag;
    return sha256({ByteView(&tag, 1), leaf});
}

Digest hash_node(const Digest &l, const Digest &r) {
    const std::uint8_t tag = kNodeTag;
    return sha256({ByteView(&tag, 1), ByteView(l.bytes()), ByteView(r.bytes())});
}

// All levels, leaves first. Odd levels are padded by duplicating the last node.
std::vector<std::vector<Digest>> build_levels(std::span<const Bytes> leaves) {
    if (leaves.empty())
        throw ProtocolError("merkle tree needs at least one leaf");
    std::vector<std::vector<Digest>> levels;
    levels.emplace_back();
    levels.back().reserve(leaves.size());
    for (const auto &leaf : leaves)
        levels.back().push_back(hash_leaf(leaf));
    while (levels.back().size() > 1) {
        auto &cur = levels.back();
        if (cur.size() % 2 == 1)
            cur.push_back(cur.back());
        std::vector<Digest> next;
        next.reserve(cur.size() / 2);
        for (std::size_t i = 0; i < cur.size(); i += 2)
            next.push_back(hash_node(cur[i], cur[i + 1]));
        levels.push_back(std::move(next));
    }
    return levels;
}

} // namespace

std::size_t merkle_depth(std::size_t n) {
    std::size_t d = 0;
    while ((std::size_t{1} << d) < n)
        ++d;
    return d;
}

MerkleTree merkle_build(std::span<const Bytes> leaves) {
    auto levels = build_levels(leaves);
    MerkleTree tree;
    tree.root = levels.back().front();
    tree.proofs.resize(leaves.size());
    for (std::size_t i = 0; i < leaves.size(); ++i) {
        auto idx = i;
        auto &sib = tree.proofs[i].siblings;
        for (std::size_t l = 0; l + 1 < levels.size(); ++l) {
            sib.push_back(levels[l][idx ^ 1]);
            idx >>= 1;
        }
    }
    return tree;
}

Digest merkle_root(std::span<const Bytes> leaves) { return build_levels(leaves).back().front(); }

bool merkle_verify(const MerkleProof &proof, ByteView leaf, std::size_t index, const Digest &root) {
    if (proof.siblings.size() >= 64 || (index >> proof.siblings.size()) != 0)
        return false;
    auto acc = hash_leaf(leaf);
    auto idx = index;
    for (const auto &s : proof.siblings) {
        acc = (idx & 1) ? hash_node(s, acc) : hash_node(acc, s);
        idx >>= 1;
    }
    return acc == root;
}

} // namespace imitater::primitives
