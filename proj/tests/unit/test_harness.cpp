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

#include <fstream>
#include <sstream>

#include "imitater/harness/experiment.hpp"
#include "imitater/harness/verify.hpp"

using namespace imitater;
using namespace imitater::harness;

namespace {

std::string slurp(const std::filesystem::path &p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::filesystem::path scratch(const std::string &name) {
    auto dir = std::filesystem::temp_directory_path() / ("imitater-test-" + name);
    std::filesystem::remove_all(dir);
    return dir;
}

netsim::Trace small_trace(std::uint64_t seed, std::map<NodeId, netsim::Strategy> byz = {}) {
    netsim::SimConfig cfg;
    cfg.n = 4;
    cfg.f = 1;
    cfg.seed = seed;
    cfg.duration = 2 * kSecond;
    cfg.drain = 2 * kSecond;
    cfg.tx_rate = 100;
    cfg.record_trace = true;
    cfg.byzantine = std::move(byz);
    return netsim::run(cfg).trace;
}

} // namespace

TEST(Sweep, EmptySweepWritesHeaderOnly) {
    ExperimentSpec spec;
    spec.name = "empty";
    spec.seeds = 0;
    spec.out_dir = scratch("empty");
    const auto rows = run_experiment(spec);
    EXPECT_TRUE(rows.empty());
    EXPECT_EQ(slurp(spec.out_dir / "metrics.csv"), std::string(kCsvHeader) + "\n");
}

TEST(Sweep, InfeasiblePointBecomesWarningRow) {
    ExperimentSpec spec;
    spec.nodes = {4};
    spec.faulty = {2};
    spec.strategies = {"crash"};
    const auto points = expand_points(spec);
    ASSERT_EQ(points.size(), 1u);
    EXPECT_FALSE(points[0].feasible);
    EXPECT_EQ(points[0].row.status, "warning");
}

TEST(Sweep, GoldenCsvIsReproduced) {
    auto spec = load_spec(std::filesystem::path(IMITATER_TEST_DATA) / "golden_small.ini");
    spec.out_dir = scratch("golden");
    run_experiment(spec);
    EXPECT_EQ(slurp(spec.out_dir / "metrics.csv"),
              slurp(std::filesystem::path(IMITATER_TEST_DATA) / "golden_small.csv"));
    EXPECT_TRUE(std::filesystem::exists(spec.out_dir / "summary.csv"));
    EXPECT_TRUE(std::filesystem::exists(spec.out_dir / "plots" / "golden-throughput.json"));
    // Thread count must not change a single byte.
    spec.threads = 3;
    spec.out_dir = scratch("golden-mt");
    run_experiment(spec);
    EXPECT_EQ(slurp(spec.out_dir / "metrics.csv"),
              slurp(std::filesystem::path(IMITATER_TEST_DATA) / "golden_small.csv"));
}

TEST(Sweep, FigureSpecsCoverTheirAxes) {
    const auto f3 = fig3_spec();
    EXPECT_EQ(f3.nodes, std::vector<std::size_t>{16});
    EXPECT_EQ(f3.faulty, (std::vector<std::size_t>{0, 1, 2, 3, 4, 5}));
    EXPECT_EQ(expand_points(f3).size(), 12u);
    const auto f4 = fig4_spec();
    const auto pts = expand_points(f4);
    ASSERT_EQ(pts.size(), 8u);
    for (const auto &p : pts)
        EXPECT_EQ(p.row.faulty, (p.row.n - 1) / 3);
    EXPECT_LT(fig4_latency_spec().base.tx_rate, f4.base.tx_rate);
}

TEST(Spec, ParsesSectionsAndRejectsUnknownValues) {
    std::istringstream in(R"(
[experiment]
name = probe
seeds = 3
[sweep]
protocols = baseline
n = 7, 16
faulty = max
[network]
bandwidth = jitter
jitter = 0.2
[workload]
tx_rate = 50
)");
    const auto spec = parse_spec(in);
    EXPECT_EQ(spec.name, "probe");
    EXPECT_EQ(spec.seeds, 3u);
    EXPECT_EQ(spec.nodes, (std::vector<std::size_t>{7, 16}));
    EXPECT_TRUE(spec.faulty_max);
    EXPECT_EQ(spec.base.bandwidth.kind, netsim::BandwidthKind::UniformJitter);
    EXPECT_DOUBLE_EQ(spec.base.bandwidth.jitter, 0.2);
    EXPECT_DOUBLE_EQ(spec.base.tx_rate, 50);
    std::istringstream bad("[sweep]\nprotocols = carrier-pigeon\n");
    EXPECT_ANY_THROW(parse_spec(bad));
}

TEST(Spec, StrategyMixAlternatesAndPlacementPicksIds) {
    const auto tail = assign_strategies(16, 3, "crash+flooder", "tail");
    ASSERT_EQ(tail.size(), 3u);
    EXPECT_EQ(tail.begin()->first, 13u);
    std::size_t crash = 0;
    for (const auto &[id, s] : tail)
        crash += s.kind == netsim::StrategyKind::Crash;
    EXPECT_EQ(crash, 2u);
    EXPECT_TRUE(assign_strategies(16, 0, "crash").empty());
    EXPECT_EQ(assign_strategies(16, 5, "crash").size(), 5u);
}

TEST(Verify, FaultFreeTracePasses) {
    const auto report = verify_run(small_trace(1));
    EXPECT_TRUE(report.ok()) << report.to_text();
    EXPECT_EQ(report.checks.size(), 7u);
}

TEST(Verify, InjectedConflictingCommitFailsSafety) {
    auto trace = small_trace(2);
    std::optional<std::size_t> victim;
    for (std::size_t i = 0; i < trace.events.size(); ++i) {
        const auto &e = trace.events[i];
        if (e.kind == netsim::TraceKind::Commit && e.node == 1 && e.index == 2) {
            victim = i;
            break;
        }
    }
    ASSERT_TRUE(victim.has_value());
    trace.events[*victim].root.bytes()[0] ^= 0xff;
    const auto report = verify_run(trace);
    const auto *safety = report.find("safety");
    ASSERT_NE(safety, nullptr);
    EXPECT_FALSE(safety->pass);
    ASSERT_TRUE(safety->event.has_value());
    EXPECT_NE(report.to_text().find("safety FAIL at event"), std::string::npos);
}

TEST(Verify, ReorderedExecutionFailsOrderKeeping) {
    auto trace = small_trace(3);
    // Swap the sequence numbers of two executions of one client at one node.
    std::vector<std::size_t> hits;
    for (std::size_t i = 0; i < trace.events.size() && hits.size() < 2; ++i) {
        const auto &e = trace.events[i];
        if (e.kind == netsim::TraceKind::Execute && e.node == 0 && e.client == trace.events[i].client &&
            (hits.empty() || trace.events[hits[0]].client == e.client))
            hits.push_back(i);
    }
    ASSERT_EQ(hits.size(), 2u);
    std::swap(trace.events[hits[0]].seq, trace.events[hits[1]].seq);
    EXPECT_FALSE(verify_run(trace).find("order-keeping")->pass);
}

TEST(Verify, TraceFileRoundTripKeepsVerdict) {
    const auto trace = small_trace(4, {{2, netsim::Strategy{netsim::StrategyKind::EquivocateDisperser, {}}}});
    std::stringstream ss;
    trace.write_ndjson(ss);
    const auto report = verify_run(netsim::Trace::read_ndjson(ss));
    EXPECT_TRUE(report.ok()) << report.to_text();
}
