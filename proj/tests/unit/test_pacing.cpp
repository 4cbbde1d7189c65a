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
#include "imitater/pacing/pacer.hpp"

using namespace imitater;
using namespace imitater::pacing;

TEST(Pacer, GapAtThresholdSlowsDown) {
    PacerState s(PacerConfig::with_initial(20 * kMillisecond));
    EXPECT_EQ(s.config.alpha, 2 * kMillisecond);
    s.dispersed = s.config.threshold;
    EXPECT_EQ(pacer_step(s), 22 * kMillisecond);
    s.dispersed = s.retrieved = 9;
    EXPECT_EQ(pacer_step(s), 20 * kMillisecond);
}

TEST(Pacer, ClampsAtBounds) {
    PacerConfig cfg;
    cfg.initial_tau = cfg.tau_min;
    PacerState s(cfg);
    EXPECT_EQ(pacer_step(s), cfg.tau_min);
    s.dispersed = 100;
    s.tau = cfg.tau_max;
    EXPECT_EQ(pacer_step(s), cfg.tau_max);
    PacerConfig bad;
    bad.alpha = 0;
    EXPECT_THROW(bad.validate(), ProtocolError);
}

TEST(Pacer, GapNeverUnderflows) {
    PacerState s;
    s.retrieved = 5;
    EXPECT_EQ(s.gap(), 0u);
}

TEST(Dispersal, WaitsForPredecessorAndInterval) {
    PacerState s;
    EXPECT_FALSE(next_dispersal(s, 0, std::nullopt, 10, false, true).has_value());
    EXPECT_EQ(next_dispersal(s, 0, std::nullopt, 10, true, true), 10u);
    EXPECT_FALSE(next_dispersal(s, s.tau - 1, SimTime{0}, 10, true, true).has_value());
    EXPECT_EQ(next_dispersal(s, s.tau, SimTime{0}, 1000, true, true), s.config.batch_size);
}

TEST(Dispersal, IdleNodeSendsEmptyMicroblockOnlyWithBalancing) {
    PacerState on;
    EXPECT_EQ(next_dispersal(on, 0, std::nullopt, 0, true, true), 0u);
    EXPECT_FALSE(next_dispersal(on, 0, std::nullopt, 0, true, false).has_value());
    PacerConfig cfg;
    cfg.idle_balancing = false;
    PacerState off(cfg);
    EXPECT_FALSE(next_dispersal(off, 0, std::nullopt, 0, true, true).has_value());
}

TEST(Guard, AllowsWithinKWithholdsBeyond) {
    EXPECT_EQ(over_distribution_guard(0, 5, 0, 8), GuardDecision::Allow);
    EXPECT_EQ(over_distribution_guard(0, 8, 0, 8), GuardDecision::Allow);
    EXPECT_EQ(over_distribution_guard(0, 9, 0, 8), GuardDecision::Withhold);
    EXPECT_EQ(over_distribution_guard(0, 12, 4, 8), GuardDecision::Allow);
    EXPECT_EQ(over_distribution_guard(0, 3, 7, 8), GuardDecision::Allow);
}

TEST(PacerScenario, HalvedBandwidthRaisesIntervalAndBoundsGap) {
    netsim::SimConfig cfg;
    cfg.n = 4;
    cfg.f = 1;
    cfg.seed = 5;
    cfg.duration = 8 * kSecond;
    cfg.drain = kSecond;
    cfg.tx_rate = 1500;
    cfg.tx_size = 512;
    cfg.bandwidth.mean_bps = 100e6;
    cfg.bandwidth.kind = netsim::BandwidthKind::StepChange;
    cfg.bandwidth.step_at = 4 * kSecond;
    cfg.bandwidth.step_factor = 0.5;
    const auto r = netsim::run(cfg);
    ASSERT_FALSE(r.metrics.pacer.empty());
    SimTime before = 0, after = 0;
    std::uint64_t late_gap = 0;
    for (const auto &p : r.metrics.pacer) {
        if (p.node != 0)
            continue;
        if (p.time < cfg.bandwidth.step_at)
            before = std::max(before, p.tau);
        if (p.time > cfg.bandwidth.step_at + 2 * kSecond && p.time < cfg.duration) {
            after = std::max(after, p.tau);
            late_gap = std::max(late_gap, p.dispersed - p.retrieved);
        }
    }
    EXPECT_GT(after, before);
    EXPECT_LT(late_gap, 4u + 4u);
}
