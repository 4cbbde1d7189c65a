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

#include "imitater/baseline/pull_replica.hpp"
#include "imitater/netsim/simulator.hpp"

using namespace imitater;
using namespace imitater::baseline;

namespace {

struct RecordingContext : netsim::Context {
    NodeId id = 0;
    std::vector<std::pair<NodeId, netsim::MessagePtr>> outbox;
    netsim::Observer obs;

    SimTime now() const override { return 0; }
    NodeId self() const override { return id; }
    std::size_t n() const override { return 4; }
    void send(NodeId to, netsim::MessagePtr msg) override { outbox.emplace_back(to, std::move(msg)); }
    void broadcast(const netsim::MessagePtr &msg) override {
        for (NodeId j = 0; j < 4; ++j)
            send(j, msg);
    }
    void schedule(SimTime, std::function<void()>) override {}
    SimTime uplink_backlog() const override { return 0; }
    netsim::Observer &observer() override { return obs; }
};

smp::TxPtr tx(std::uint64_t seq) {
    return std::make_shared<smp::Transaction>(
        smp::Transaction::make(1, seq, smp::TxOp::Put, 1, 1, Bytes{}, 100));
}

netsim::SimConfig load(std::size_t n, netsim::Protocol p, double rate) {
    netsim::SimConfig cfg;
    cfg.protocol = p;
    cfg.n = n;
    cfg.f = (n - 1) / 3;
    cfg.seed = 3;
    cfg.tx_rate = rate;
    cfg.tx_size = 512;
    cfg.duration = 4 * kSecond;
    cfg.drain = kSecond;
    cfg.keep_logs = false;
    return cfg;
}

double honest_egress(const netsim::SimConfig &cfg, const netsim::Metrics &m) {
    double total = 0;
    std::size_t count = 0;
    for (NodeId i = 0; i < cfg.n; ++i)
        if (cfg.is_honest(i)) {
            total += static_cast<double>(m.egress_bytes[i]);
            ++count;
        }
    return total / static_cast<double>(count);
}

} // namespace

TEST(FullMicroblock, IdIsBodyHashAndTamperingIsCaught) {
    const auto mb = make_full_microblock(2, 1, {tx(1), tx(2)}, smp::AvailabilityCertificate::genesis(2), 5, 4);
    EXPECT_EQ(mb.block->id, microblock_id(*mb.body));
    EXPECT_EQ(mb.block->virtual_total, 200u);
    const auto back = parse_full_microblock(*mb.body, 200);
    EXPECT_EQ(back.block->id, mb.block->id);
    ASSERT_EQ(back.block->txs.size(), 2u);
    MbFull msg{mb};
    EXPECT_EQ(msg.serialize(4).size(), msg.wire_size(4));
    const auto ref = make_ref(2, 1, mb.block->id);
    EXPECT_EQ(ref.root, mb.block->id);
    EXPECT_TRUE(ref.sig.empty());
}

TEST(Pull, UnknownIdGetsEmptyResponseKnownIdGetsCopy) {
    primitives::SimThresholdScheme scheme(4, 1, 1);
    RecordingContext ctx;
    ctx.id = 1;
    PullReplica node(ctx, scheme, PullConfig{}, netsim::Strategy{});
    const auto mb = make_full_microblock(2, 1, {tx(1)}, smp::AvailabilityCertificate::genesis(2), 0, 4);
    node.on_message(3, netsim::make_message(PullRequest{2, 1, mb.block->id}, 4));
    ASSERT_EQ(ctx.outbox.size(), 1u);
    EXPECT_EQ(ctx.outbox[0].first, 3u);
    EXPECT_FALSE(std::get<PullResponse>(ctx.outbox[0].second->body).mb.has_value());

    node.on_message(2, netsim::make_message(MbFull{mb}, 4));
    ctx.outbox.clear();
    node.on_message(3, netsim::make_message(PullRequest{2, 1, mb.block->id}, 4));
    ASSERT_EQ(ctx.outbox.size(), 1u);
    const auto &resp = std::get<PullResponse>(ctx.outbox[0].second->body);
    ASSERT_TRUE(resp.mb.has_value());
    EXPECT_EQ(resp.mb->block->id, mb.block->id);
    EXPECT_EQ(node.pulls_served(), 1u);
}

TEST(Pull, ForgedSenderIsNotStored) {
    primitives::SimThresholdScheme scheme(4, 1, 1);
    RecordingContext ctx;
    PullReplica node(ctx, scheme, PullConfig{}, netsim::Strategy{});
    const auto mb = make_full_microblock(2, 1, {tx(1)}, smp::AvailabilityCertificate::genesis(2), 0, 4);
    node.on_message(1, netsim::make_message(MbFull{mb}, 4)); // relayed by a non-owner
    node.on_message(3, netsim::make_message(PullRequest{2, 1, mb.block->id}, 4));
    EXPECT_FALSE(std::get<PullResponse>(ctx.outbox.back().second->body).mb.has_value());
}

TEST(BaselineRun, FaultFreeRunCommitsEverything) {
    auto cfg = load(4, netsim::Protocol::Baseline, 150);
    cfg.keep_logs = true;
    const auto r = netsim::run(cfg);
    EXPECT_GT(r.metrics.submitted, 0u);
    EXPECT_EQ(r.metrics.committed, r.metrics.submitted);
    EXPECT_TRUE(r.metrics.logs_consistent);
    EXPECT_EQ(r.metrics.messages_by_type.count("pull-request"), 0u) << "nothing had to be pulled";
}

TEST(BaselineRun, OneSpammerRoughlyDoublesHonestEgress) {
    auto cfg = load(16, netsim::Protocol::Baseline, 100);
    const auto clean = netsim::run(cfg).metrics;
    cfg.byzantine[15] = netsim::Strategy{netsim::StrategyKind::PullSpammer, {}};
    const auto spammed = netsim::run(cfg).metrics;
    EXPECT_GT(spammed.messages_by_type.at("pull-request"), 0u);
    const double ratio = honest_egress(cfg, spammed) / honest_egress(cfg, clean);
    EXPECT_GT(ratio, 1.7);
    EXPECT_LT(ratio, 2.3);
}

TEST(BaselineRun, BeatsCodedMempoolAtFourNodesWithoutSpammers) {
    const auto pull = netsim::run(load(4, netsim::Protocol::Baseline, 4000)).metrics;
    const auto coded = netsim::run(load(4, netsim::Protocol::Imitater, 4000)).metrics;
    EXPECT_GE(pull.throughput, coded.throughput);
}
