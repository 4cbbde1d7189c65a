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

// imitater-sim: run experiments, verify traces and reproduce the built-in sweeps.

#include <fstream>
#include <iostream>
#include <optional>

#include "CLI11.hpp"

#include "imitater/harness/experiment.hpp"
#include "imitater/harness/verify.hpp"

using namespace imitater;

namespace {

struct Overrides {
    std::optional<std::size_t> n;
    std::optional<std::size_t> faulty;
    std::optional<std::string> protocol;
    std::optional<std::string> strategy;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> seeds;
    std::optional<double> duration;
    std::optional<double> bandwidth;
    std::optional<std::string> bandwidth_profile;
    std::optional<std::uint32_t> tx_size;
    std::optional<double> tx_rate;
    std::optional<std::size_t> mb_batch;
    std::optional<std::uint64_t> k_threshold;
    std::optional<std::size_t> threads;
    std::optional<std::string> out;
    bool no_guard = false;
    bool trace = false;
};

void add_flags(CLI::App &app, Overrides &o) {
    app.add_option("--n", o.n, "committee size (3f+1)");
    app.add_option("--f", o.faulty, "number of Byzantine nodes");
    app.add_option("--protocol", o.protocol, "imitater or baseline");
    app.add_option("--strategy", o.strategy, "faulty-node mix, e.g. crash+flooder");
    app.add_option("--seed", o.seed, "first seed");
    app.add_option("--seeds", o.seeds, "seeds per point");
    app.add_option("--duration", o.duration, "client load duration in seconds");
    app.add_option("--bandwidth", o.bandwidth, "per-node link rate in Mbit/s");
    app.add_option("--bandwidth-profile", o.bandwidth_profile, "constant, jitter or step");
    app.add_option("--tx-size", o.tx_size, "modeled bytes per transaction");
    app.add_option("--tx-rate", o.tx_rate, "transactions per second per honest node");
    app.add_option("--mb-batch", o.mb_batch, "transactions per microblock");
    app.add_option("--k-threshold", o.k_threshold, "over-distribution guard threshold");
    app.add_option("--threads", o.threads, "parallel runs");
    app.add_option("--out", o.out, "output directory");
    app.add_flag("--no-guard", o.no_guard, "disable the over-distribution guard");
    app.add_flag("--trace", o.trace, "write trace-<job>.ndjson per run");
}

void apply(const Overrides &o, harness::ExperimentSpec &spec) {
    auto &c = spec.base;
    if (o.n) spec.nodes = {*o.n};
    if (o.faulty) {
        spec.faulty = {*o.faulty};
        spec.faulty_max = false;
    }
    if (o.protocol) spec.protocols = {netsim::parse_protocol(*o.protocol)};
    if (o.strategy) {
        spec.strategies = {*o.strategy};
        spec.baseline_strategies = {*o.strategy};
    }
    if (o.seed) spec.first_seed = *o.seed;
    if (o.seeds) spec.seeds = *o.seeds;
    if (o.duration) c.duration = static_cast<SimTime>(*o.duration * kSecond);
    if (o.bandwidth) spec.bandwidth_mbps = {*o.bandwidth};
    if (o.bandwidth_profile) {
        const auto &p = *o.bandwidth_profile;
        if (p == "constant")
            c.bandwidth.kind = netsim::BandwidthKind::Constant;
        else if (p == "jitter")
            c.bandwidth.kind = netsim::BandwidthKind::UniformJitter;
        else if (p == "step") {
            c.bandwidth.kind = netsim::BandwidthKind::StepChange;
            c.bandwidth.step_at = c.duration / 2;
        } else
            throw CLI::ValidationError("--bandwidth-profile", "expected constant, jitter or step");
    }
    if (o.tx_size) c.tx_size = *o.tx_size;
    if (o.tx_rate) c.tx_rate = *o.tx_rate;
    if (o.mb_batch) spec.batch_sizes = {*o.mb_batch};
    if (o.k_threshold) c.k_threshold = *o.k_threshold;
    if (o.threads) spec.threads = *o.threads;
    if (o.out) spec.out_dir = *o.out;
    if (o.no_guard) c.guard_enabled = false;
    if (o.trace) spec.write_trace = true;
}

int report(const std::vector<harness::MetricsRow> &rows, const harness::ExperimentSpec &spec) {
    harness::write_csv(std::cout, rows);
    std::cerr << "wrote " << (spec.out_dir / "metrics.csv").string() << '\n';
    return 0;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"Shared-mempool BFT simulator and experiment harness"};
    app.require_subcommand(1);

    Overrides o;
    std::string spec_path;
    auto *run = app.add_subcommand("run", "run an experiment spec (flags override the file)");
    run->add_option("spec", spec_path, "experiment spec (key = value with [sections])");
    add_flags(*run, o);

    std::string trace_path;
    auto *verify = app.add_subcommand("verify", "check the invariants of a recorded trace");
    verify->add_option("trace", trace_path, "trace.ndjson")->required();

    auto *fig3 = app.add_subcommand("sweep-fig3", "throughput against the number of faulty nodes");
    add_flags(*fig3, o);
    auto *fig4 = app.add_subcommand("sweep-fig4", "throughput and latency against committee size");
    add_flags(*fig4, o);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*verify) {
            std::ifstream in(trace_path);
            if (!in) {
                std::cerr << "cannot open " << trace_path << '\n';
                return 2;
            }
            auto report = harness::verify_run(netsim::Trace::read_ndjson(in));
            std::cout << report.to_text();
            return report.ok() ? 0 : 1;
        }
        harness::ExperimentSpec spec;
        if (*fig4) {
            // Throughput at saturation, then latency at moderate load.
            auto tput = harness::fig4_spec();
            auto lat = harness::fig4_latency_spec();
            const std::filesystem::path root = o.out ? *o.out : "out/fig4";
            apply(o, tput);
            apply(o, lat);
            tput.out_dir = root / "throughput";
            lat.out_dir = root / "latency";
            report(harness::run_experiment(tput), tput);
            return report(harness::run_experiment(lat), lat);
        }
        if (*run) {
            if (!spec_path.empty())
                spec = harness::load_spec(spec_path);
        } else {
            spec = harness::fig3_spec();
            spec.out_dir = "out/fig3";
        }
        apply(o, spec);
        return report(harness::run_experiment(spec), spec);
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}
