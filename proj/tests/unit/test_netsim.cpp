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

#include "imitater/netsim/simulator.hpp"

using namespace imitater;
using namespace imitater::netsim;

namespace {

SimConfig small(std::uint64_t seed = 3) {
    SimConfig cfg;
    cfg.n = 4;
    cfg.f = 1;
    cfg.seed = seed;
    cfg.duration = 3 * kSecond;
    cfg.drain = 2 * kSecond;
    cfg.tx_rate = 150;
    return cfg;
}

} // namespace

TEST(Timing, MebibyteAtHundredMegabits) {
    // 2^20 bytes * 8 bits / 1e8 bit/s = 83886.08 us, rounded up.
    EXPECT_EQ(transmission_time(1u << 20, 100e6), 83887);
    EXPECT_EQ(transmission_time(0, 100e6), 0);
    EXPECT_EQ(transmission_time(125, 1e6), 1000);
}

TEST(Timing, DownlinkQueuesBulkBehindEarlierArrivals) {
    SimTime down_free = 0;
    // 12500 bytes at 100 Mbit/s take 1 ms on each side.
    const auto first = deliver_model(0, 1000, 5000, 12500, 100e6, down_free);
    EXPECT_EQ(first, 6000);
    EXPECT_EQ(down_free, 6000);
    const auto second = deliver_model(0, 1000, 5000, 12500, 100e6, down_free);
    EXPECT_EQ(second, 7000);
    // Control traffic overtakes queued bulk data and pushes it back.
    const auto ctl = deliver_model(0, 10, 5000, 125, 100e6, down_free, true);
    EXPECT_EQ(ctl, 5010);
    EXPECT_EQ(down_free, 7010);
    // A slow sender bounds arrival from below.
    SimTime idle = 0;
    EXPECT_EQ(deliver_model(0, 8000, 5000, 12500, 100e6, idle), 13000);
}

TEST(Config, RejectsInvalidCommittees) {
    auto cfg = small();
    EXPECT_NO_THROW(cfg.validate());
    cfg.n = 5;
    EXPECT_THROW(cfg.validate(), std::invalid_argument);
    cfg = small();
    cfg.byzantine[0] = Strategy{StrategyKind::Crash, {}};
    cfg.byzantine[1] = Strategy{StrategyKind::Crash, {}};
    EXPECT_THROW(cfg.validate(), std::invalid_argument);
    cfg = small();
    cfg.byzantine[9] = Strategy{StrategyKind::Crash, {}};
    EXPECT_THROW(cfg.validate(), std::invalid_argument);
    EXPECT_THROW(run(cfg), std::invalid_argument);
}

TEST(Strategies, NamesRoundTrip) {
    for (auto k : {StrategyKind::Honest, StrategyKind::Crash, StrategyKind::Flooder, StrategyKind::PullSpammer,
                   StrategyKind::EquivocateDisperser, StrategyKind::CensoringLeader})
        EXPECT_EQ(parse_strategy(to_string(k)), k);
    EXPECT_EQ(parse_strategy("pull_spammer"), StrategyKind::PullSpammer);
    EXPECT_EQ(spread_ids(16, 0).size(), 0u);
    const auto ids = spread_ids(16, 5);
    EXPECT_EQ(std::set<NodeId>(ids.begin(), ids.end()).size(), 5u);
}

TEST(Messages, WireSizeMatchesSerialization) {
    const auto params = primitives::CodingParams::for_nodes(4);
    auto tx = std::make_shared<smp::Transaction>(smp::Transaction::make(1, 1, smp::TxOp::Put, 1, 1, Bytes{1, 2}, 500));
    auto mb = smp::make_microblock(0, 1, {tx}, smp::AvailabilityCertificate::genesis(0), 0, params);
    primitives::SimThresholdScheme scheme(4, 1, 1);
    smp::Mempool pool(0, params, scheme, scheme.signer(0));
    for (auto &dis : pool.start_dispersal(mb)) {
        const auto msg = make_message(dis, 4);
        EXPECT_EQ(msg->tag, smp::WireTag::MbDis);
        EXPECT_EQ(serialize(*msg, 4).size(), msg->bytes);
        EXPECT_EQ(msg->priority, Priority::Background);
    }
    const auto block = std::make_shared<consensus::Block>(consensus::create_block(
        1, consensus::QuorumCertificate::genesis(), std::nullopt, consensus::Block::genesis(), {}, 4));
    const auto prop = make_message(consensus::Proposal{block}, 4);
    EXPECT_EQ(serialize(*prop, 4).size(), prop->bytes);
    EXPECT_EQ(prop->priority, Priority::Control);
    EXPECT_FALSE(is_bulk(smp::WireTag::Vote));
    EXPECT_TRUE(is_bulk(smp::WireTag::MbChk));
}

TEST(Run, FaultFreeCommitsEverythingWithEqualLogs) {
    const auto r = run(small());
    EXPECT_GT(r.metrics.submitted, 0u);
    EXPECT_EQ(r.metrics.committed, r.metrics.submitted);
    EXPECT_EQ(r.metrics.uncommitted_after_gst, 0u);
    EXPECT_TRUE(r.metrics.logs_consistent);
    ASSERT_EQ(r.logs.size(), 4u);
    for (const auto &[id, log] : r.logs)
        EXPECT_EQ(log, r.logs.begin()->second) << id;
}

TEST(Run, SameSeedIsBitIdentical) {
    auto cfg = small(8);
    cfg.byzantine[2] = Strategy{StrategyKind::Flooder, {}};
    const auto a = run(cfg), b = run(cfg);
    EXPECT_EQ(a.metrics.to_json(), b.metrics.to_json());
    EXPECT_EQ(a.logs, b.logs);
    cfg.seed = 9;
    EXPECT_NE(run(cfg).metrics.to_json(), a.metrics.to_json());
}

TEST(Run, CrashedNodeKeepsThroughputWithinTenPercent) {
    // Clients only reach honest nodes, so offered load scales with their count;
    // compare throughput per serving node.
    auto cfg = small(4);
    cfg.duration = 10 * kSecond;
    cfg.tx_rate = 300;
    const auto base = run(cfg).metrics;
    cfg.byzantine[3] = Strategy{StrategyKind::Crash, {}};
    const auto crashed = run(cfg).metrics;
    EXPECT_EQ(crashed.uncommitted_after_gst, 0u);
    const double per_node_base = base.throughput / 4, per_node_crash = crashed.throughput / 3;
    EXPECT_NEAR(per_node_crash / per_node_base, 1.0, 0.10);
}

TEST(Run, TraceRoundTripsThroughNdjson) {
    auto cfg = small(2);
    cfg.record_trace = true;
    const auto r = run(cfg);
    ASSERT_FALSE(r.trace.events.empty());
    std::stringstream ss;
    r.trace.write_ndjson(ss);
    const auto back = Trace::read_ndjson(ss);
    EXPECT_EQ(back.n, 4u);
    EXPECT_EQ(back.events, r.trace.events);
}

TEST(ByteAccounting, PhasesTrackTheClosedForms) {
    for (std::size_t n : {4u, 7u, 16u}) {
        const auto m = std::size_t{64} << 10;
        const auto got = measure_phase_bytes(n, m);
        EXPECT_NEAR(got.dispersal / dispersal_formula(n, m), 1.0, 0.10) << n;
        EXPECT_NEAR(got.retrieval / retrieval_formula(n, m), 1.0, 0.10) << n;
    }
}
