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

#include "imitater/harness/experiment.hpp"

#include <atomic>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include "json.hpp"

#include "imitater/harness/verify.hpp"

namespace imitater::harness {

using netsim::Protocol;
using netsim::SimConfig;
using netsim::StrategyKind;

const char *const kCsvHeader =
    "status,note,protocol,n,f,faulty,strategy,bandwidth_mbps,batch,seed,throughput,latency_mean_ms,"
    "latency_p95_ms,bytes_dispersal,bytes_retrieval,bytes_consensus,memory_high_water,committed,verified";

namespace {

// Built-in sweeps offer more load than 100 Mbit/s links carry so that both
// mempools run at their bandwidth limit.
constexpr double kSaturatingRate = 2000;
// Latency is compared at a load that leaves both mempools unsaturated at n=16.
constexpr double kModerateRate = 150;
constexpr std::uint32_t kSweepTxSize = 512;
constexpr SimTime kSweepDuration = 8 * kSecond;

std::string csv_field(const std::string &s) {
    if (s.find_first_of(",\"\n") == std::string::npos)
        return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"')
            out.push_back('"');
        out.push_back(c);
    }
    return out + "\"";
}

std::string num(double v) {
    std::ostringstream out;
    out << std::fixed << std::setprecision(3) << v;
    return out.str();
}

std::string point_key(const MetricsRow &r) {
    return r.protocol + "|" + std::to_string(r.n) + "|" + std::to_string(r.faulty) + "|" + r.strategy + "|" +
           num(r.bandwidth_mbps) + "|" + std::to_string(r.batch);
}

} // namespace

void write_csv(std::ostream &out, const std::vector<MetricsRow> &rows) {
    out << kCsvHeader << '\n';
    for (const auto &r : rows) {
        out << r.status << ',' << csv_field(r.note) << ',' << r.protocol << ',' << r.n << ',' << r.f << ','
            << r.faulty << ',' << csv_field(r.strategy) << ',' << num(r.bandwidth_mbps) << ',' << r.batch << ','
            << r.seed << ',' << num(r.throughput) << ',' << num(r.latency_mean_ms) << ',' << num(r.latency_p95_ms)
            << ',' << r.bytes_dispersal << ',' << r.bytes_retrieval << ',' << r.bytes_consensus << ','
            << r.memory_high_water << ',' << r.committed << ',' << (r.verified ? "true" : "false") << '\n';
    }
}

void write_summary_csv(std::ostream &out, const std::vector<MetricsRow> &rows) {
    out << "protocol,n,f,faulty,strategy,bandwidth_mbps,batch,runs,throughput_mean,throughput_std,"
           "latency_mean_ms,latency_std_ms,latency_p95_ms\n";
    std::vector<std::string> order;
    std::map<std::string, std::vector<const MetricsRow *>> groups;
    for (const auto &r : rows) {
        if (r.status != "ok")
            continue;
        auto key = point_key(r);
        if (!groups.contains(key))
            order.push_back(key);
        groups[key].push_back(&r);
    }
    auto stats = [](const std::vector<double> &v) {
        double mean = 0;
        for (double x : v)
            mean += x;
        mean /= static_cast<double>(v.size());
        double var = 0;
        for (double x : v)
            var += (x - mean) * (x - mean);
        const double sd = v.size() > 1 ? std::sqrt(var / static_cast<double>(v.size() - 1)) : 0.0;
        return std::pair{mean, sd};
    };
    for (const auto &key : order) {
        const auto &g = groups[key];
        std::vector<double> tput, lat, p95;
        for (const auto *r : g) {
            tput.push_back(r->throughput);
            lat.push_back(r->latency_mean_ms);
            p95.push_back(r->latency_p95_ms);
        }
        const auto &r = *g.front();
        auto [tm, ts] = stats(tput);
        auto [lm, ls] = stats(lat);
        auto [pm, ps] = stats(p95);
        (void)ps;
        out << r.protocol << ',' << r.n << ',' << r.f << ',' << r.faulty << ',' << csv_field(r.strategy) << ','
            << num(r.bandwidth_mbps) << ',' << r.batch << ',' << g.size() << ',' << num(tm) << ',' << num(ts)
            << ',' << num(lm) << ',' << num(ls) << ',' << num(pm) << '\n';
    }
}

std::map<NodeId, netsim::Strategy> assign_strategies(std::size_t n, std::size_t count, const std::string &mix,
                                                     const std::string &placement) {
    std::vector<StrategyKind> kinds;
    std::stringstream in(mix);
    std::string item;
    while (std::getline(in, item, '+'))
        if (!item.empty())
            kinds.push_back(netsim::parse_strategy(item));
    if (kinds.empty())
        kinds.push_back(StrategyKind::Crash);
    std::map<NodeId, netsim::Strategy> out;
    std::vector<NodeId> ids;
    if (placement == "spread") {
        ids = netsim::spread_ids(n, count);
    } else if (placement == "tail") {
        if (count > n)
            throw std::invalid_argument("more Byzantine nodes than nodes");
        for (std::size_t i = n - count; i < n; ++i)
            ids.push_back(static_cast<NodeId>(i));
    } else {
        throw std::invalid_argument("unknown placement: " + placement);
    }
    for (std::size_t i = 0; i < ids.size(); ++i) {
        netsim::Strategy s;
        s.kind = kinds[i % kinds.size()];
        if (s.kind == StrategyKind::CensoringLeader)
            s.censored = {static_cast<NodeId>((ids[i] + 1) % n)};
        out[ids[i]] = s;
    }
    return out;
}

std::vector<Point> expand_points(const ExperimentSpec &spec) {
    const auto &b = spec.base;
    auto protocols = spec.protocols.empty() ? std::vector<Protocol>{b.protocol} : spec.protocols;
    auto nodes = spec.nodes.empty() ? std::vector<std::size_t>{b.n} : spec.nodes;
    auto bandwidths = spec.bandwidth_mbps.empty() ? std::vector<double>{b.bandwidth.mean_bps / 1e6}
                                                  : spec.bandwidth_mbps;
    auto batches = spec.batch_sizes.empty() ? std::vector<std::size_t>{b.batch_size} : spec.batch_sizes;

    std::vector<Point> points;
    for (auto protocol : protocols) {
        auto mixes = protocol == Protocol::Baseline && !spec.baseline_strategies.empty() ? spec.baseline_strategies
                                                                                         : spec.strategies;
        if (mixes.empty())
            mixes.push_back("crash");
        for (auto n : nodes) {
            std::vector<std::size_t> faulty = spec.faulty;
            if (spec.faulty_max)
                faulty = {n >= 1 ? (n - 1) / 3 : 0};
            else if (faulty.empty())
                faulty = {b.byzantine.size()};
            for (auto count : faulty) {
                for (const auto &mix : mixes) {
                    for (double bw : bandwidths) {
                        for (auto batch : batches) {
                            Point p;
                            p.config = b;
                            p.config.protocol = protocol;
                            p.config.n = n;
                            p.config.f = n >= 1 ? (n - 1) / 3 : 0;
                            p.config.bandwidth.mean_bps = bw * 1e6;
                            p.config.batch_size = batch;
                            auto &r = p.row;
                            r.protocol = netsim::to_string(protocol);
                            r.n = n;
                            r.f = p.config.f;
                            r.faulty = count;
                            r.strategy = count == 0 ? "none" : mix;
                            r.bandwidth_mbps = bw;
                            r.batch = batch;
                            try {
                                p.config.byzantine = assign_strategies(n, count, mix, spec.placement);
                                if (count > p.config.f)
                                    throw std::invalid_argument("more faulty nodes than floor((n-1)/3)");
                                p.config.validate();
                            } catch (const std::exception &e) {
                                p.feasible = false;
                                r.status = "warning";
                                r.note = e.what();
                            }
                            points.push_back(std::move(p));
                        }
                    }
                }
            }
        }
    }
    return points;
}

MetricsRow run_point(const Point &point, bool verify, const std::filesystem::path *trace_path) {
    MetricsRow row = point.row;
    row.seed = point.config.seed;
    if (!point.feasible)
        return row;
    SimConfig cfg = point.config;
    cfg.record_trace = verify || trace_path;
    auto result = netsim::run(cfg);
    const auto &m = result.metrics;
    row.throughput = m.throughput;
    row.latency_mean_ms = m.latency_mean_ms;
    row.latency_p95_ms = m.latency_p95_ms;
    row.committed = m.committed;
    for (const auto &[type, bytes] : m.bytes_by_type) {
        if (type == "mb-dis" || type == "mb-ack" || type == "mb-full")
            row.bytes_dispersal += bytes;
        else if (type == "mb-chk" || type == "pull-request" || type == "pull-response")
            row.bytes_retrieval += bytes;
        else
            row.bytes_consensus += bytes;
    }
    for (auto v : m.memory_high_water)
        row.memory_high_water = std::max(row.memory_high_water, v);
    if (verify) {
        auto report = verify_run(result.trace);
        row.verified = report.ok() && m.logs_consistent;
        if (!row.verified)
            row.note = report.to_text();
    }
    if (trace_path) {
        std::ofstream out(*trace_path);
        result.trace.write_ndjson(out);
    }
    return row;
}

namespace {

void write_plot(const std::filesystem::path &path, const ExperimentSpec &spec, const std::string &x,
                const std::string &y, const std::string &title) {
    nlohmann::ordered_json plot;
    plot["title"] = title;
    plot["data"] = "../summary.csv";
    plot["mark"] = "line";
    plot["x"] = {{"field", x}, {"type", "quantitative"}};
    plot["y"] = {{"field", y}, {"type", "quantitative"}};
    plot["series"] = {{"field", "protocol"}};
    plot["experiment"] = spec.name;
    std::ofstream out(path);
    out << plot.dump(2) << '\n';
}

} // namespace

std::vector<MetricsRow> run_experiment(const ExperimentSpec &spec) {
    const auto points = expand_points(spec);
    struct Job {
        std::size_t point;
        std::uint64_t seed;
    };
    std::vector<Job> jobs;
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (!points[i].feasible) {
            jobs.push_back({i, spec.first_seed});
            continue;
        }
        for (std::size_t s = 0; s < spec.seeds; ++s)
            jobs.push_back({i, spec.first_seed + s});
    }

    std::filesystem::create_directories(spec.out_dir / "plots");
    std::vector<MetricsRow> rows(jobs.size());
    std::atomic<std::size_t> next{0};
    std::mutex log_mutex;
    auto worker = [&] {
        for (std::size_t j = next++; j < jobs.size(); j = next++) {
            Point p = points[jobs[j].point];
            p.config.seed = jobs[j].seed;
            std::filesystem::path trace = spec.out_dir / ("trace-" + std::to_string(j) + ".ndjson");
            rows[j] = run_point(p, false, spec.write_trace && p.feasible ? &trace : nullptr);
            if (rows[j].status != "ok") {
                std::lock_guard lock(log_mutex);
                std::cerr << "warning: skipped " << rows[j].protocol << " n=" << rows[j].n
                          << " faulty=" << rows[j].faulty << ": " << rows[j].note << '\n';
            }
        }
    };
    const auto threads = std::max<std::size_t>(1, std::min(spec.threads, jobs.size()));
    std::vector<std::thread> pool;
    for (std::size_t t = 1; t < threads; ++t)
        pool.emplace_back(worker);
    worker();
    for (auto &t : pool)
        t.join();

    {
        std::ofstream out(spec.out_dir / "metrics.csv");
        write_csv(out, rows);
    }
    {
        std::ofstream out(spec.out_dir / "summary.csv");
        write_summary_csv(out, rows);
    }
    write_plot(spec.out_dir / "plots" / (spec.name + "-throughput.json"), spec,
               spec.faulty_max ? "n" : "faulty", "throughput_mean", spec.name + " throughput (tx/s)");
    write_plot(spec.out_dir / "plots" / (spec.name + "-latency.json"), spec, spec.faulty_max ? "n" : "faulty",
               "latency_mean_ms", spec.name + " mean commit latency (ms)");
    return rows;
}

// -- configuration documents --------------------------------------------------

namespace {

std::vector<std::string> split_list(const std::string &s) {
    std::vector<std::string> out;
    std::stringstream in(s);
    std::string item;
    while (std::getline(in, item, ',')) {
        auto b = item.find_first_not_of(" \t");
        auto e = item.find_last_not_of(" \t");
        if (b != std::string::npos)
            out.push_back(item.substr(b, e - b + 1));
    }
    return out;
}

template <typename T> std::vector<T> numbers(const std::string &s) {
    std::vector<T> out;
    for (const auto &item : split_list(s)) {
        std::istringstream in(item);
        T v{};
        if (!(in >> v) || !in.eof())
            throw std::invalid_argument("not a number: " + item);
        out.push_back(v);
    }
    return out;
}

bool boolean(const std::string &s) {
    if (s == "true" || s == "yes" || s == "on" || s == "1")
        return true;
    if (s == "false" || s == "no" || s == "off" || s == "0")
        return false;
    throw std::invalid_argument("not a boolean: " + s);
}

netsim::BandwidthKind bandwidth_kind(const std::string &s) {
    if (s == "constant")
        return netsim::BandwidthKind::Constant;
    if (s == "jitter")
        return netsim::BandwidthKind::UniformJitter;
    if (s == "step")
        return netsim::BandwidthKind::StepChange;
    throw std::invalid_argument("unknown bandwidth profile: " + s);
}

} // namespace

ExperimentSpec parse_spec(std::istream &in) {
    boost::property_tree::ptree pt;
    boost::property_tree::ini_parser::read_ini(in, pt);
    ExperimentSpec spec;
    auto &c = spec.base;
    auto get = [&](const char *key) { return pt.get_optional<std::string>(key); };
    auto ms = [](const std::string &s) { return static_cast<SimTime>(std::stod(s) * kMillisecond); };

    if (auto v = get("experiment.name")) spec.name = *v;
    if (auto v = get("experiment.seeds")) spec.seeds = std::stoul(*v);
    if (auto v = get("experiment.first_seed")) spec.first_seed = std::stoull(*v);
    if (auto v = get("experiment.threads")) spec.threads = std::stoul(*v);
    if (auto v = get("experiment.out")) spec.out_dir = *v;
    if (auto v = get("experiment.trace")) spec.write_trace = boolean(*v);

    if (auto v = get("sweep.protocols"))
        for (const auto &p : split_list(*v))
            spec.protocols.push_back(netsim::parse_protocol(p));
    if (auto v = get("sweep.n")) spec.nodes = numbers<std::size_t>(*v);
    if (auto v = get("sweep.faulty")) {
        if (*v == "max")
            spec.faulty_max = true;
        else
            spec.faulty = numbers<std::size_t>(*v);
    }
    if (auto v = get("sweep.strategies")) spec.strategies = split_list(*v);
    if (auto v = get("sweep.baseline_strategies")) spec.baseline_strategies = split_list(*v);
    if (auto v = get("sweep.bandwidth_mbps")) spec.bandwidth_mbps = numbers<double>(*v);
    if (auto v = get("sweep.batch")) spec.batch_sizes = numbers<std::size_t>(*v);
    if (auto v = get("sweep.placement")) spec.placement = *v;

    if (auto v = get("network.delta_ms")) c.delta = ms(*v);
    if (auto v = get("network.gst_ms")) c.gst = ms(*v);
    if (auto v = get("network.min_propagation_ms")) c.min_propagation = ms(*v);
    if (auto v = get("network.max_propagation_ms")) c.max_propagation = ms(*v);
    if (auto v = get("network.pre_gst_delay_probability")) c.pre_gst_delay_probability = std::stod(*v);
    if (auto v = get("network.bandwidth")) c.bandwidth.kind = bandwidth_kind(*v);
    if (auto v = get("network.bandwidth_mbps")) c.bandwidth.mean_bps = std::stod(*v) * 1e6;
    if (auto v = get("network.jitter")) c.bandwidth.jitter = std::stod(*v);
    if (auto v = get("network.jitter_period_ms")) c.bandwidth.jitter_period = ms(*v);
    if (auto v = get("network.step_at_ms")) c.bandwidth.step_at = ms(*v);
    if (auto v = get("network.step_factor")) c.bandwidth.step_factor = std::stod(*v);

    if (auto v = get("workload.tx_rate")) c.tx_rate = std::stod(*v);
    if (auto v = get("workload.tx_size")) c.tx_size = static_cast<std::uint32_t>(std::stoul(*v));
    if (auto v = get("workload.tx_data")) c.tx_data = static_cast<std::uint32_t>(std::stoul(*v));
    if (auto v = get("workload.clients_per_node")) c.clients_per_node = static_cast<std::uint32_t>(std::stoul(*v));
    if (auto v = get("workload.duration_ms")) c.duration = ms(*v);
    if (auto v = get("workload.drain_ms")) c.drain = ms(*v);

    if (auto v = get("protocol.signature")) c.signature = *v;
    if (auto v = get("protocol.batch")) c.batch_size = std::stoul(*v);
    if (auto v = get("protocol.k_threshold")) c.k_threshold = std::stoull(*v);
    if (auto v = get("protocol.guard")) c.guard_enabled = boolean(*v);
    if (auto v = get("protocol.idle_balancing")) c.idle_balancing = boolean(*v);
    if (auto v = get("protocol.initial_tau_ms")) c.initial_tau = ms(*v);
    if (auto v = get("protocol.base_timeout_ms")) c.base_timeout = ms(*v);
    if (auto v = get("protocol.baseline_backlog_ms")) c.baseline_backlog = ms(*v);
    return spec;
}

ExperimentSpec load_spec(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open " + path.string());
    return parse_spec(in);
}

ExperimentSpec fig3_spec() {
    ExperimentSpec spec;
    spec.name = "fig3";
    spec.protocols = {Protocol::Imitater, Protocol::Baseline};
    spec.nodes = {16};
    spec.faulty = {0, 1, 2, 3, 4, 5};
    spec.strategies = {"crash+flooder"};
    spec.baseline_strategies = {"pull-spammer"};
    spec.placement = "tail";
    spec.base.tx_rate = kSaturatingRate;
    spec.base.tx_size = kSweepTxSize;
    spec.base.duration = kSweepDuration;
    spec.base.drain = kSecond;
    spec.base.keep_logs = false;
    return spec;
}

ExperimentSpec fig4_spec() {
    ExperimentSpec spec = fig3_spec();
    spec.name = "fig4";
    spec.nodes = {4, 7, 16, 25};
    spec.faulty.clear();
    spec.faulty_max = true;
    // Each mempool faces the attack aimed at it; both attackers stay live in consensus.
    spec.strategies = {"flooder"};
    return spec;
}

ExperimentSpec fig4_latency_spec() {
    ExperimentSpec spec = fig4_spec();
    spec.name = "fig4-latency";
    spec.base.tx_rate = kModerateRate;
    spec.base.duration = 6 * kSecond;
    return spec;
}

} // namespace imitater::harness
