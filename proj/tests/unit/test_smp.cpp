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

#include <gtest/gtest.h>

#include <algorithm>

#include "imitater/smp/mempool.hpp"

using namespace imitater;
using namespace imitater::smp;

namespace {

TxPtr tx(std::uint32_t client, std::uint64_t seq) {
    return std::make_shared<Transaction>(Transaction::make(client, seq, TxOp::Put, seq, 1, Bytes{1, 2, 3}));
}

// n mempools sharing one scheme; messages are passed by hand.
struct Cluster {
    CodingParams params;
    primitives::SimThresholdScheme scheme;
    std::vector<std::unique_ptr<Mempool>> pools;

    explicit Cluster(std::size_t n) : params(CodingParams::for_nodes(n)), scheme(n, params.f, 1) {
        for (NodeId i = 0; i < n; ++i)
            pools.push_back(std::make_unique<Mempool>(i, params, scheme, scheme.signer(i)));
    }
    Mempool &at(NodeId i) { return *pools[i]; }

    // Disperses the next microblock of `chain` to everyone and returns its AC.
    std::pair<BuiltMicroblock, AvailabilityCertificate> certify(NodeId chain, std::vector<TxPtr> txs = {}) {
        auto &owner = at(chain);
        auto prev = owner.highest_ac();
        auto mb = make_microblock(chain, prev.position + 1, std::move(txs), prev, 0, params);
        auto dis = owner.start_dispersal(mb);
        std::optional<AvailabilityCertificate> ac;
        for (NodeId j = 0; j < pools.size(); ++j) {
            auto ack = at(j).handle_mb_dis(chain, dis[j]);
            if (ack && !ac)
                ac = owner.handle_mb_ack(j, *ack);
        }
        if (!ac)
            throw std::logic_error("no certificate formed");
        return {mb, *ac};
    }
};

} // namespace

TEST(Microblock, GenesisLinkAndDeterminism) {
    const auto params = CodingParams::for_nodes(4);
    const auto g = AvailabilityCertificate::genesis(2);
    EXPECT_TRUE(g.is_genesis());
    const auto a = make_microblock(2, 1, {tx(1, 1)}, g, 50, params);
    const auto b = make_microblock(2, 1, {tx(1, 1)}, g, 50, params);
    EXPECT_EQ(a.block->id, b.block->id);
    EXPECT_EQ(a.block->id, a.encoding->tree.root);
    const auto later = make_microblock(2, 1, {tx(1, 1)}, g, 51, params);
    EXPECT_NE(a.block->id, later.block->id);
}

TEST(Microblock, EmptyBatchIsValidAndDistinctPerTimestamp) {
    const auto params = CodingParams::for_nodes(4);
    const auto g = AvailabilityCertificate::genesis(0);
    const auto a = make_microblock(0, 1, {}, g, 10, params);
    const auto b = make_microblock(0, 1, {}, g, 20, params);
    EXPECT_TRUE(a.block->txs.empty());
    EXPECT_NE(a.block->id, b.block->id);
    EXPECT_NE(make_microblock(1, 1, {}, AvailabilityCertificate::genesis(1), 10, params).block->id, a.block->id);
}

TEST(Microblock, MismatchedPredecessorIsChainBreak) {
    const auto params = CodingParams::for_nodes(4);
    EXPECT_THROW(make_microblock(0, 2, {}, AvailabilityCertificate::genesis(0), 0, params), ChainBreak);
    EXPECT_THROW(make_microblock(0, 1, {}, AvailabilityCertificate::genesis(1), 0, params), ChainBreak);
    EXPECT_THROW(make_microblock(0, 0, {}, AvailabilityCertificate::genesis(0), 0, params), ChainBreak);
}

TEST(Microblock, BodyRoundTrips) {
    const auto params = CodingParams::for_nodes(7);
    const auto mb = make_microblock(3, 1, {tx(4, 1), tx(4, 2)}, AvailabilityCertificate::genesis(3), 77, params);
    const auto body = serialize_body(3, 1, 77, mb.block->prev_ac, mb.block->txs, 7);
    const auto parsed = parse_body(body, mb.block->id);
    EXPECT_EQ(parsed.chain, 3u);
    EXPECT_EQ(parsed.created_at, 77);
    ASSERT_EQ(parsed.txs.size(), 2u);
    EXPECT_EQ(parsed.txs[1]->hash, mb.block->txs[1]->hash);
}

TEST(Dispersal, OneMessagePerNodeIndexedByRecipient) {
    Cluster c(4);
    const auto mb = make_microblock(0, 1, {tx(1, 1)}, AvailabilityCertificate::genesis(0), 0, c.params);
    const auto dis = c.at(0).start_dispersal(mb);
    ASSERT_EQ(dis.size(), 4u);
    for (std::uint32_t j = 0; j < 4; ++j) {
        EXPECT_EQ(dis[j].chunk.index, j);
        EXPECT_EQ(dis[j].serialize(4).size(), dis[j].wire_size(4));
        const auto back = MbDis::parse(dis[j].serialize(4));
        EXPECT_EQ(back.root, dis[j].root);
        EXPECT_EQ(back.chunk, dis[j].chunk);
        EXPECT_EQ(back.proof, dis[j].proof);
    }
    EXPECT_THROW(c.at(0).start_dispersal(mb), ProtocolError);
}

TEST(Dispersal, FirstMessageWinsAndBadProofsAreIgnored) {
    Cluster c(4);
    const auto g = AvailabilityCertificate::genesis(0);
    const auto a = make_microblock(0, 1, {tx(1, 1)}, g, 0, c.params);
    const auto b = make_microblock(0, 1, {tx(1, 2)}, g, 0, c.params);
    auto da = c.at(0).start_dispersal(a);
    auto ack = c.at(1).handle_mb_dis(0, da[1]);
    ASSERT_TRUE(ack.has_value());
    EXPECT_TRUE(c.scheme.verify_partial(AvailabilityCertificate::ack_digest(0, 1, a.block->id), ack->sig));
    const auto db = Mempool(0, c.params, c.scheme, c.scheme.signer(0)).start_dispersal(b);
    EXPECT_FALSE(c.at(1).handle_mb_dis(0, db[1]).has_value());
    auto bad = da[2];
    bad.chunk.data[0] ^= 1;
    EXPECT_FALSE(c.at(2).handle_mb_dis(0, bad).has_value());
    EXPECT_FALSE(c.at(3).handle_mb_dis(0, da[2]).has_value()) << "chunk addressed to another node";
}

TEST(Dispersal, CertificateNeedsThreeDistinctSigners) {
    Cluster c(4);
    const auto mb = make_microblock(0, 1, {}, AvailabilityCertificate::genesis(0), 0, c.params);
    auto dis = c.at(0).start_dispersal(mb);
    std::vector<MbAck> acks;
    for (NodeId j = 0; j < 4; ++j)
        acks.push_back(*c.at(j).handle_mb_dis(0, dis[j]));
    EXPECT_FALSE(c.at(0).handle_mb_ack(1, acks[1]));
    EXPECT_FALSE(c.at(0).handle_mb_ack(1, acks[1]));
    EXPECT_FALSE(c.at(0).handle_mb_ack(2, acks[2]));
    EXPECT_FALSE(c.at(0).handle_mb_ack(0, acks[1])) << "ack relayed under another sender";
    const auto ac = c.at(0).handle_mb_ack(3, acks[3]);
    ASSERT_TRUE(ac.has_value());
    EXPECT_TRUE(verify_ac(*ac, c.scheme));
    EXPECT_EQ(ac->sig.signers, (std::vector<NodeId>{1, 2, 3}));
    Writer w;
    ac->serialize(w, 4);
    EXPECT_EQ(w.size(), ac->wire_size(4));
    Reader r(w.bytes());
    EXPECT_EQ(AvailabilityCertificate::parse(r), *ac);
    auto forged = *ac;
    forged.root.bytes()[0] ^= 1;
    EXPECT_FALSE(verify_ac(forged, c.scheme));
}

TEST(Dispersal, HighestCertificateIsMonotone) {
    Cluster c(4);
    EXPECT_TRUE(c.at(1).highest_ac().is_genesis());
    for (int p = 1; p <= 5; ++p) {
        const auto [mb, ac] = c.certify(1);
        EXPECT_EQ(ac.position, static_cast<Position>(p));
        EXPECT_EQ(c.at(1).highest_ac().position, static_cast<Position>(p));
        EXPECT_EQ(mb.block->prev_ac.position + 1, mb.block->position);
    }
}

TEST(Dispersal, GuardWithholdsUntilReleased) {
    Cluster c(4);
    bool open = false;
    c.at(2).set_guard([&](NodeId, Position) { return open; });
    const auto mb = make_microblock(0, 1, {}, AvailabilityCertificate::genesis(0), 0, c.params);
    auto dis = c.at(0).start_dispersal(mb);
    EXPECT_FALSE(c.at(2).handle_mb_dis(0, dis[2]).has_value());
    EXPECT_EQ(c.at(2).withheld_count(), 1u);
    EXPECT_TRUE(c.at(2).release_withheld().empty());
    open = true;
    const auto released = c.at(2).release_withheld();
    ASSERT_EQ(released.size(), 1u);
    EXPECT_EQ(released[0].to, 0u);
    EXPECT_EQ(c.at(2).withheld_count(), 0u);
}

TEST(Retrieval, RecursesOldestFirstAndOnlyOnce) {
    Cluster c(4);
    std::vector<Digest> roots;
    for (int p = 0; p < 3; ++p)
        roots.push_back(c.certify(0).first.block->id);
    auto out = c.at(2).trigger_retrieval(roots[2], 0, 3);
    EXPECT_EQ(out.triggered, roots);
    ASSERT_EQ(out.broadcasts.size(), 3u);
    for (std::size_t i = 0; i < 3; ++i)
        EXPECT_EQ(out.broadcasts[i].position, i + 1);
    const auto again = c.at(2).trigger_retrieval(roots[2], 0, 3);
    EXPECT_TRUE(again.triggered.empty());
    EXPECT_TRUE(again.broadcasts.empty());
}

TEST(Retrieval, TriggeredPredecessorStopsRecursion) {
    Cluster c(4);
    const auto r1 = c.certify(0).first.block->id;
    const auto r2 = c.certify(0).first.block->id;
    c.at(1).trigger_retrieval(r1, 0, 1);
    const auto out = c.at(1).trigger_retrieval(r2, 0, 2);
    EXPECT_EQ(out.triggered, std::vector<Digest>{r2});
    EXPECT_EQ(out.broadcasts.size(), 1u);
}

TEST(Retrieval, SecondDistinctChunkDecodesIdentically) {
    Cluster c(4);
    const auto [mb, ac] = c.certify(0, {tx(9, 1), tx(9, 2)});
    std::vector<MbChk> chks;
    for (NodeId j = 0; j < 4; ++j) {
        auto out = c.at(j).trigger_retrieval(ac.root, 0, 1);
        ASSERT_EQ(out.broadcasts.size(), 1u);
        chks.push_back(out.broadcasts[0]);
        EXPECT_EQ(chks.back().serialize(4).size(), chks.back().wire_size(4));
    }
    for (NodeId node : {1u, 3u}) {
        auto &m = c.at(node);
        EXPECT_FALSE(m.handle_mb_chk(2, chks[2]).has_value());
        EXPECT_FALSE(m.handle_mb_chk(2, chks[2]).has_value()) << "same sender twice";
        const auto trig = m.handle_mb_chk(0, chks[0]);
        ASSERT_TRUE(trig.has_value());
        EXPECT_EQ(m.finalize_decode(ac.root), EntryState::Decoded);
        const auto got = m.block_of(ac.root);
        ASSERT_EQ(got->txs.size(), 2u);
        EXPECT_EQ(got->txs[0]->hash, mb.block->txs[0]->hash);
        EXPECT_EQ(got->id, mb.block->id);
        EXPECT_FALSE(m.handle_mb_chk(3, chks[3]).has_value()) << "already decoded";
    }
}

TEST(Retrieval, ObservedQuorumSuppressesOwnBroadcast) {
    Cluster c(4);
    const auto [mb, ac] = c.certify(0);
    std::vector<MbChk> chks;
    for (NodeId j = 0; j < 3; ++j)
        chks.push_back(c.at(j).trigger_retrieval(ac.root, 0, 1).broadcasts.at(0));
    auto &late = c.at(3);
    for (NodeId j = 0; j < 3; ++j)
        if (late.handle_mb_chk(j, chks[j])) {
            EXPECT_EQ(late.finalize_decode(ac.root), EntryState::Decoded);
        }
    const auto out = late.trigger_retrieval(ac.root, 0, 1);
    EXPECT_TRUE(out.broadcasts.empty());
    EXPECT_EQ(late.state_of(ac.root), EntryState::Decoded);
}

TEST(Retrieval, MixedEncodingsAreUniformlyEmpty) {
    // The disperser commits to chunks drawn from two different codewords.
    const auto params = CodingParams::for_nodes(4);
    const auto g = AvailabilityCertificate::genesis(0);
    const auto a = make_microblock(0, 1, {tx(1, 1)}, g, 0, params);
    const auto b = make_microblock(0, 1, {tx(1, 2)}, g, 0, params);
    std::vector<Bytes> leaves{a.encoding->chunks[0], a.encoding->chunks[1], b.encoding->chunks[2],
                              b.encoding->chunks[3]};
    const auto tree = primitives::merkle_build(leaves);
    std::vector<MbChk> chks;
    for (std::uint32_t j = 0; j < 4; ++j)
        chks.push_back(MbChk{0, 1, tree.root, Chunk{j, leaves[j], 0}, tree.proofs[j]});

    primitives::SimThresholdScheme scheme(4, 1, 1);
    // Every pair of chunks an honest node could assemble reaches the same verdict.
    for (std::uint32_t x = 0; x < 4; ++x)
        for (std::uint32_t y = x + 1; y < 4; ++y) {
            Mempool m(0, params, scheme, scheme.signer(0));
            m.handle_mb_chk(x, chks[x]);
            ASSERT_TRUE(m.handle_mb_chk(y, chks[y]).has_value());
            EXPECT_EQ(m.finalize_decode(tree.root), EntryState::Empty) << x << "," << y;
        }
}

TEST(Retrieval, ReleaseFreesStorage) {
    Cluster c(4);
    const auto [mb, ac] = c.certify(0);
    auto &m = c.at(2);
    EXPECT_GT(m.stored_bytes(), 0u);
    EXPECT_EQ(m.held_positions(0), 1u);
    EXPECT_EQ(m.undecoded_positions(0), 1u);
    const std::vector<Digest> roots{ac.root};
    m.release(0, 1, roots);
    EXPECT_EQ(m.held_positions(0), 0u);
    EXPECT_EQ(m.stored_bytes(), 0u);
    EXPECT_TRUE(m.retrieval_triggered(ac.root));
}
