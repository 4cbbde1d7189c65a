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

#include "imitater/netsim/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <random>
#include <sstream>

#include "json.hpp"

namespace imitater::netsim {

// -- configuration -----------------------------------------------------------

std::string to_string(Protocol p) { return p == Protocol::Imitater ? "imitater" : "baseline"; }

Protocol parse_protocol(const std::string &s) {
    if (s == "imitater")
        return Protocol::Imitater;
    if (s == "baseline" || s == "pull")
        return Protocol::Baseline;
    throw std::invalid_argument("unknown protocol: " + s);
}

bool SimConfig::is_honest(NodeId id) const {
    auto it = byzantine.find(id);
    return it == byzantine.end() || it->second.honest();
}

void SimConfig::validate() const {
    if (n < 4 || n != 3 * f + 1)
        throw std::invalid_argument("committee must have n = 3f+1 >= 4 nodes");
    if (n > 255)
        throw std::invalid_argument("at most 255 nodes are supported");
    std::size_t faulty = 0;
    for (const auto &[id, s] : byzantine) {
        if (id >= n)
            throw std::invalid_argument("Byzantine node id outside committee");
        if (s.byzantine())
            ++faulty;
        if (s.kind == StrategyKind::PullSpammer && protocol != Protocol::Baseline)
            throw std::invalid_argument("PullSpammer applies to the pull-based baseline only");
    }
    if (faulty > f)
        throw std::invalid_argument("more than f Byzantine nodes");
    if (delta <= 0 || min_propagation < 0 || max_propagation < min_propagation || max_propagation > delta)
        throw std::invalid_argument("propagation delays must satisfy 0 <= min <= max <= delta");
    if (bandwidth.mean_bps <= 0 || bandwidth.jitter < 0 || bandwidth.jitter >= 1 || bandwidth.step_factor <= 0)
        throw std::invalid_argument("invalid bandwidth profile");
    if (duration <= 0 || drain < 0 || tx_rate < 0 || clients_per_node == 0)
        throw std::invalid_argument("invalid workload");
    if (batch_size == 0 || k_threshold == 0)
        throw std::invalid_argument("batch size and k threshold must be positive");
}

SimTime transmission_time(std::uint64_t bytes, double bps) {
    return static_cast<SimTime>(std::ceil(static_cast<double>(bytes) * 8e6 / bps));
}

SimTime deliver_model(SimTime up_start, SimTime up_done, SimTime prop, std::uint64_t bytes, double down_bps,
                      SimTime &down_free, bool control) {
    const SimTime service = transmission_time(bytes, down_bps);
    if (control) {
        const SimTime begin = up_start + prop;
        down_free = down_free > begin ? down_free + service : begin + service;
        return std::max(begin + service, up_done + prop);
    }
    const SimTime begin = std::max(up_start + prop, down_free);
    const SimTime drained = begin + service;
    down_free = drained;
    return std::max(drained, up_done + prop);
}

double Metrics::chain_quality() const {
    return microblocks_committed == 0 ? 1.0
                                      : static_cast<double>(microblocks_honest) / microblocks_committed;
}

std::string Metrics::to_json() const {
    nlohmann::ordered_json j;
    auto fixed = [](double v) { return std::round(v * 1e6) / 1e6; };
    j["submitted"] = submitted;
    j["committed"] = committed;
    j["throughput"] = fixed(throughput);
    std::vector<double> windows;
    for (double w : window_throughput)
        windows.push_back(fixed(w));
    j["window_throughput"] = windows;
    j["latency_mean_ms"] = fixed(latency_mean_ms);
    j["latency_p50_ms"] = fixed(latency_p50_ms);
    j["latency_p95_ms"] = fixed(latency_p95_ms);
    j["latency_samples"] = latency_samples;
    j["max_views_to_commit"] = max_views_to_commit;
    j["uncommitted_after_gst"] = uncommitted_after_gst;
    j["bytes_by_type"] = bytes_by_type;
    j["messages_by_type"] = messages_by_type;
    j["egress_bytes"] = egress_bytes;
    j["memory_high_water"] = memory_high_water;
    j["max_held_positions"] = max_held_positions;
    j["min_committed_height"] = min_committed_height;
    j["max_view"] = max_view;
    j["microblocks_committed"] = microblocks_committed;
    j["microblocks_honest"] = microblocks_honest;
    j["logs_consistent"] = logs_consistent;
    return j.dump();
}

// -- simulation --------------------------------------------------------------

namespace {

constexpr std::uint32_t kJunkClient = 0xffffffffu;
constexpr SimTime kBucket = kMillisecond;

std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
    std::uint64_t z = a ^ (b + 0x9e3779b97f4a7c15ULL + (a << 6) + (a >> 2));
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

struct Event {
    enum Type : std::uint8_t { Deliver, UplinkDone, Callback, Client, Sample };
    SimTime time = 0;
    std::uint64_t seq = 0;
    Type type = Callback;
    NodeId node = 0;
    NodeId from = 0;
    MessagePtr msg;
    std::function<void()> fn;
};

struct Later {
    bool operator()(const Event &a, const Event &b) const {
        return a.time != b.time ? a.time > b.time : a.seq > b.seq;
    }
};

class Sim;

class NodeContext final : public Context {
  public:
    NodeContext(Sim &sim, NodeId id) : sim_(sim), id_(id) {}
    SimTime now() const override;
    NodeId self() const override { return id_; }
    std::size_t n() const override;
    void send(NodeId to, MessagePtr msg) override;
    void broadcast(const MessagePtr &msg) override;
    void schedule(SimTime delay, std::function<void()> fn) override;
    SimTime uplink_backlog() const override;
    Observer &observer() override;

  private:
    Sim &sim_;
    NodeId id_;
};

class Sim final : public Observer {
  public:
    explicit Sim(const SimConfig &cfg);
    RunResult run();

    SimTime now() const { return now_; }
    std::size_t n() const { return cfg_.n; }
    void send(NodeId src, NodeId dst, const MessagePtr &msg);
    void schedule(NodeId node, SimTime delay, std::function<void()> fn);
    SimTime backlog(NodeId node) const;

    // Observer
    void on_submit(NodeId node, const smp::Transaction &tx) override;
    void on_ac(NodeId node, const smp::AvailabilityCertificate &ac) override;
    void on_chk_broadcast(NodeId node, const Digest &root) override;
    void on_resolve(NodeId node, NodeId chain, Position position, const Digest &root, smp::EntryState state,
                    const Digest &content) override;
    void on_commit(NodeId node, std::uint64_t height, const consensus::Block &block) override;
    void on_execute(NodeId node, std::uint64_t index, const smp::Transaction &tx, NodeId chain,
                    Position position) override;
    void on_pacer(NodeId node, SimTime tau, std::uint64_t dispersed, std::uint64_t retrieved) override;

  private:
    struct Queued {
        NodeId dst;
        MessagePtr msg;
    };
    struct Uplink {
        std::deque<Queued> queue[kPriorityClasses];
        bool busy = false;
        bool served_bulk = false;
        SimTime done_at = 0;
        std::uint64_t queued_bytes = 0;
    };
    struct Submission {
        SimTime time;
        View view;
    };

    void push(Event e);
    void start_transmission(NodeId src);
    double rate(NodeId node, SimTime t);
    double rate_now(NodeId node) const;
    void client_arrival(NodeId node);
    void sample();
    void trace(TraceEvent e);
    Metrics finish();

    SimConfig cfg_;
    SimTime now_ = 0;
    SimTime gst_;
    std::uint64_t seq_ = 0;
    std::vector<Event> heap_;

    std::unique_ptr<primitives::SignatureScheme> scheme_;
    std::vector<std::unique_ptr<NodeContext>> contexts_;
    std::vector<std::unique_ptr<Node>> nodes_;
    std::vector<const ordering::LedgerState *> ledgers_;
    std::vector<bool> honest_;
    NodeId reference_ = 0;

    std::vector<Uplink> uplinks_;
    std::vector<SimTime> down_free_;
    std::vector<std::vector<SimTime>> propagation_;
    std::mt19937_64 net_rng_;
    std::vector<std::int64_t> rate_period_;
    std::vector<double> rate_cache_;

    std::vector<std::mt19937_64> client_rng_;
    std::vector<std::uint64_t> client_seq_;

    Metrics m_;
    Trace trace_;
    std::unordered_map<Digest, Submission, DigestHash> submitted_;
    std::vector<std::vector<std::uint32_t>> exec_buckets_;
    std::vector<std::uint64_t> executed_;
    std::vector<SimTime> latencies_;
};

SimTime NodeContext::now() const { return sim_.now(); }
std::size_t NodeContext::n() const { return sim_.n(); }
void NodeContext::send(NodeId to, MessagePtr msg) { sim_.send(id_, to, msg); }
void NodeContext::broadcast(const MessagePtr &msg) {
    for (NodeId j = 0; j < sim_.n(); ++j)
        sim_.send(id_, j, msg);
}
void NodeContext::schedule(SimTime delay, std::function<void()> fn) { sim_.schedule(id_, delay, std::move(fn)); }
SimTime NodeContext::uplink_backlog() const { return sim_.backlog(id_); }
Observer &NodeContext::observer() { return sim_; }

Sim::Sim(const SimConfig &cfg) : cfg_(cfg), gst_(cfg.effective_gst()), net_rng_(mix(cfg.seed, 0x6e6574)) {
    cfg_.validate();
    const auto n = cfg_.n;
    scheme_ = primitives::make_signature_scheme(cfg_.signature, n, cfg_.f, cfg_.seed);

    honest_.resize(n);
    for (NodeId i = 0; i < n; ++i)
        honest_[i] = cfg_.is_honest(i);
    reference_ = static_cast<NodeId>(std::find(honest_.begin(), honest_.end(), true) - honest_.begin());

    propagation_.assign(n, std::vector<SimTime>(n, 0));
    std::uniform_int_distribution<SimTime> prop(cfg_.min_propagation, cfg_.max_propagation);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            propagation_[i][j] = i == j ? 0 : prop(net_rng_);
    uplinks_.resize(n);
    down_free_.assign(n, 0);
    rate_period_.assign(n, -1);
    rate_cache_.assign(n, cfg_.bandwidth.mean_bps);

    for (NodeId i = 0; i < n; ++i) {
        client_rng_.emplace_back(mix(cfg_.seed, 0x636c69656e74ULL + i));
    }
    client_seq_.assign(n * cfg_.clients_per_node, 0);
    exec_buckets_.assign(n, std::vector<std::uint32_t>(
                                static_cast<std::size_t>((cfg_.duration + cfg_.drain) / kBucket + 1), 0));
    executed_.assign(n, 0);

    m_.egress_bytes.assign(n, 0);
    m_.memory_high_water.assign(n, 0);
    m_.max_held_positions.assign(n, 0);

    trace_.n = n;
    trace_.f = cfg_.f;
    trace_.gst = gst_;
    for (NodeId i = 0; i < n; ++i)
        if (!honest_[i])
            trace_.byzantine.push_back(i);

    consensus::EngineConfig engine;
    engine.base_timeout = cfg_.effective_timeout();
    for (NodeId i = 0; i < n; ++i) {
        contexts_.push_back(std::make_unique<NodeContext>(*this, i));
        Strategy strategy;
        if (auto it = cfg_.byzantine.find(i); it != cfg_.byzantine.end())
            strategy = it->second;
        if (cfg_.protocol == Protocol::Imitater) {
            replica::ReplicaConfig rc;
            rc.params = primitives::CodingParams::for_nodes(n);
            rc.engine = engine;
            rc.pacer = pacing::PacerConfig::with_initial(cfg_.initial_tau);
            rc.pacer.batch_size = cfg_.batch_size;
            rc.pacer.idle_balancing = cfg_.idle_balancing;
            rc.k_threshold = cfg_.k_threshold;
            rc.guard_enabled = cfg_.guard_enabled;
            rc.keep_log = cfg_.keep_logs;
            rc.junk_size = cfg_.tx_size * static_cast<std::uint32_t>(cfg_.batch_size);
            auto node = std::make_unique<replica::ImitaterReplica>(*contexts_.back(), *scheme_, rc, strategy);
            ledgers_.push_back(&node->ledger());
            nodes_.push_back(std::move(node));
        } else {
            baseline::PullConfig pc;
            pc.engine = engine;
            pc.batch_size = cfg_.batch_size;
            pc.max_backlog = cfg_.baseline_backlog;
            pc.pull_delay = cfg_.baseline_pull_delay;
            pc.keep_log = cfg_.keep_logs;
            auto node = std::make_unique<baseline::PullReplica>(*contexts_.back(), *scheme_, pc, strategy);
            ledgers_.push_back(&node->ledger());
            nodes_.push_back(std::move(node));
        }
    }
}

void Sim::push(Event e) {
    e.seq = seq_++;
    heap_.push_back(std::move(e));
    std::push_heap(heap_.begin(), heap_.end(), Later{});
}

void Sim::schedule(NodeId node, SimTime delay, std::function<void()> fn) {
    Event e;
    e.time = now_ + std::max<SimTime>(delay, 0);
    e.type = Event::Callback;
    e.node = node;
    e.fn = std::move(fn);
    push(std::move(e));
}

double Sim::rate(NodeId node, SimTime t) {
    const auto &b = cfg_.bandwidth;
    switch (b.kind) {
    case BandwidthKind::Constant:
        return b.mean_bps;
    case BandwidthKind::StepChange:
        return t < b.step_at ? b.mean_bps : b.mean_bps * b.step_factor;
    case BandwidthKind::UniformJitter: {
        const auto period = t / std::max<SimTime>(b.jitter_period, 1);
        if (rate_period_[node] != period) {
            std::mt19937_64 rng(mix(mix(cfg_.seed, 0x6277 + node), static_cast<std::uint64_t>(period)));
            std::uniform_real_distribution<double> u(-b.jitter, b.jitter);
            rate_period_[node] = period;
            rate_cache_[node] = b.mean_bps * (1.0 + u(rng));
        }
        return rate_cache_[node];
    }
    }
    return b.mean_bps;
}

double Sim::rate_now(NodeId node) const {
    const auto &b = cfg_.bandwidth;
    if (b.kind == BandwidthKind::StepChange)
        return now_ < b.step_at ? b.mean_bps : b.mean_bps * b.step_factor;
    if (b.kind == BandwidthKind::UniformJitter && rate_period_[node] >= 0)
        return rate_cache_[node];
    return b.mean_bps;
}

SimTime Sim::backlog(NodeId node) const {
    const auto &up = uplinks_[node];
    SimTime t = up.busy ? std::max<SimTime>(0, up.done_at - now_) : 0;
    return t + transmission_time(up.queued_bytes, rate_now(node));
}

void Sim::send(NodeId src, NodeId dst, const MessagePtr &msg) {
    if (dst >= cfg_.n)
        return;
    const auto name = tag_name(msg->tag);
    m_.bytes_by_type[name] += msg->bytes;
    m_.messages_by_type[name] += 1;
    if (cfg_.record_trace && cfg_.record_messages) {
        TraceEvent e;
        e.kind = TraceKind::Message;
        e.node = src;
        e.dst = dst;
        e.state = static_cast<std::uint8_t>(msg->tag);
        e.index = msg->bytes;
        trace(e);
    }
    if (dst == src) {
        Event e;
        e.time = now_;
        e.type = Event::Deliver;
        e.node = dst;
        e.from = src;
        e.msg = msg;
        push(std::move(e));
        return;
    }
    m_.egress_bytes[src] += msg->bytes;
    auto &up = uplinks_[src];
    up.queue[static_cast<int>(msg->priority)].push_back(Queued{dst, msg});
    up.queued_bytes += msg->bytes;
    if (!up.busy)
        start_transmission(src);
}

void Sim::start_transmission(NodeId src) {
    auto &up = uplinks_[src];
    // Control goes first; bulk and background data alternate so that neither
    // retrieval nor new dispersal can starve the other.
    auto &control = up.queue[static_cast<int>(Priority::Control)];
    auto &bulk = up.queue[static_cast<int>(Priority::Bulk)];
    auto &background = up.queue[static_cast<int>(Priority::Background)];
    std::deque<Queued> *next = nullptr;
    if (!control.empty())
        next = &control;
    else if (!bulk.empty() && (background.empty() || !up.served_bulk))
        next = &bulk;
    else if (!background.empty())
        next = &background;
    if (!next) {
        up.busy = false;
        return;
    }
    if (next != &control)
        up.served_bulk = next == &bulk;
    auto &q = *next;
    Queued item = std::move(q.front());
    q.pop_front();
    const auto bytes = item.msg->bytes;
    up.queued_bytes -= bytes;
    up.busy = true;

    const SimTime done = now_ + transmission_time(bytes, rate(src, now_));
    up.done_at = done;
    SimTime deliver = deliver_model(now_, done, propagation_[src][item.dst], bytes, rate(item.dst, now_),
                                    down_free_[item.dst], !is_bulk(item.msg->tag));
    if (now_ < gst_) {
        std::uniform_real_distribution<double> coin(0.0, 1.0);
        if (coin(net_rng_) < cfg_.pre_gst_delay_probability) {
            const SimTime bound = gst_ + cfg_.delta;
            if (deliver < bound) {
                std::uniform_int_distribution<SimTime> extra(0, bound - deliver);
                deliver += extra(net_rng_);
            }
        }
    }

    Event d;
    d.time = deliver;
    d.type = Event::Deliver;
    d.node = item.dst;
    d.from = src;
    d.msg = std::move(item.msg);
    push(std::move(d));

    Event u;
    u.time = done;
    u.type = Event::UplinkDone;
    u.node = src;
    push(std::move(u));
}

void Sim::client_arrival(NodeId node) {
    if (now_ >= cfg_.duration)
        return;
    auto &rng = client_rng_[node];
    std::uniform_int_distribution<std::uint32_t> pick_client(0, cfg_.clients_per_node - 1);
    std::uniform_int_distribution<int> pick_op(0, 9);
    std::uniform_int_distribution<std::uint32_t> pick_key(0, 1023);
    std::uniform_int_distribution<std::int64_t> pick_value(1, 100);

    const std::uint32_t client = static_cast<std::uint32_t>(node * cfg_.clients_per_node) + pick_client(rng);
    const int r = pick_op(rng);
    const auto op = r < 4 ? smp::TxOp::Put : r < 7 ? smp::TxOp::Credit : r < 9 ? smp::TxOp::Debit : smp::TxOp::Get;
    const auto key = pick_key(rng);
    const auto value = pick_value(rng);
    Bytes data(cfg_.tx_data);
    for (auto &b : data)
        b = static_cast<std::uint8_t>(rng());
    const std::uint32_t fixed = static_cast<std::uint32_t>(33 + data.size());
    const std::uint32_t virtual_size = cfg_.tx_size > fixed ? cfg_.tx_size - fixed : 0;
    auto tx = std::make_shared<smp::Transaction>(
        smp::Transaction::make(client, ++client_seq_[client], op, key, value, std::move(data), virtual_size));
    nodes_[node]->on_client_tx(std::move(tx));

    std::exponential_distribution<double> gap(cfg_.tx_rate);
    Event e;
    e.time = now_ + std::max<SimTime>(1, static_cast<SimTime>(gap(rng) * 1e6));
    e.type = Event::Client;
    e.node = node;
    push(std::move(e));
}

void Sim::sample() {
    std::vector<std::uint64_t> held(cfg_.n, 0);
    for (NodeId i = 0; i < cfg_.n; ++i) {
        if (!honest_[i])
            continue;
        auto s = nodes_[i]->stats();
        m_.memory_high_water[i] = std::max(m_.memory_high_water[i], s.stored_bytes);
        for (NodeId c = 0; c < cfg_.n && c < s.held_positions.size(); ++c)
            held[c] = std::max(held[c], s.held_positions[c]);
    }
    for (NodeId c = 0; c < cfg_.n; ++c)
        m_.max_held_positions[c] = std::max(m_.max_held_positions[c], held[c]);
    m_.held_series.emplace_back(now_, std::move(held));
}

RunResult Sim::run() {
    for (NodeId i = 0; i < cfg_.n; ++i)
        if (cfg_.byzantine.contains(i) ? cfg_.byzantine.at(i).kind != StrategyKind::Crash : true)
            nodes_[i]->start();
    if (cfg_.tx_rate > 0) {
        for (NodeId i = 0; i < cfg_.n; ++i) {
            if (!honest_[i])
                continue;
            Event e;
            e.time = 1;
            e.type = Event::Client;
            e.node = i;
            push(std::move(e));
        }
    }
    {
        Event e;
        e.time = cfg_.sample_interval;
        e.type = Event::Sample;
        push(std::move(e));
    }

    const SimTime end = cfg_.duration + cfg_.drain;
    while (!heap_.empty()) {
        std::pop_heap(heap_.begin(), heap_.end(), Later{});
        Event e = std::move(heap_.back());
        heap_.pop_back();
        if (e.time > end)
            break;
        now_ = e.time;
        switch (e.type) {
        case Event::Deliver:
            if (!cfg_.byzantine.contains(e.node) || cfg_.byzantine.at(e.node).kind != StrategyKind::Crash)
                nodes_[e.node]->on_message(e.from, e.msg);
            break;
        case Event::UplinkDone:
            uplinks_[e.node].busy = false;
            start_transmission(e.node);
            break;
        case Event::Callback:
            e.fn();
            break;
        case Event::Client:
            client_arrival(e.node);
            break;
        case Event::Sample: {
            sample();
            Event next;
            next.time = now_ + cfg_.sample_interval;
            next.type = Event::Sample;
            push(std::move(next));
            break;
        }
        }
    }
    now_ = end;

    RunResult result;
    result.metrics = finish();
    result.trace = std::move(trace_);
    if (cfg_.keep_logs) {
        for (NodeId i = 0; i < cfg_.n; ++i) {
            if (!honest_[i])
                continue;
            std::ostringstream out;
            ledgers_[i]->export_log(out);
            result.logs[i] = out.str();
        }
    }
    return result;
}

// -- observer ----------------------------------------------------------------

void Sim::trace(TraceEvent e) {
    if (!cfg_.record_trace)
        return;
    e.time = now_;
    trace_.events.push_back(e);
}

void Sim::on_submit(NodeId node, const smp::Transaction &tx) {
    ++m_.submitted;
    submitted_.emplace(tx.hash, Submission{now_, nodes_[node]->current_view()});
    TraceEvent e;
    e.kind = TraceKind::Submit;
    e.node = node;
    e.client = tx.client;
    e.seq = tx.seq;
    e.root = tx.hash;
    trace(e);
}

void Sim::on_ac(NodeId node, const smp::AvailabilityCertificate &ac) {
    TraceEvent e;
    e.kind = TraceKind::Ac;
    e.node = node;
    e.chain = ac.chain;
    e.position = ac.position;
    e.root = ac.root;
    trace(e);
}

void Sim::on_chk_broadcast(NodeId node, const Digest &root) {
    TraceEvent e;
    e.kind = TraceKind::ChkBroadcast;
    e.node = node;
    e.root = root;
    trace(e);
}

void Sim::on_resolve(NodeId node, NodeId chain, Position position, const Digest &root, smp::EntryState state,
                     const Digest &content) {
    if (node == reference_) {
        ++m_.microblocks_committed;
        if (honest_[chain])
            ++m_.microblocks_honest;
    }
    TraceEvent e;
    e.kind = TraceKind::Resolve;
    e.node = node;
    e.chain = chain;
    e.position = position;
    e.root = root;
    e.state = state == smp::EntryState::Decoded ? 1 : 2;
    e.digest = content;
    trace(e);
}

void Sim::on_commit(NodeId node, std::uint64_t height, const consensus::Block &block) {
    TraceEvent e;
    e.kind = TraceKind::Commit;
    e.node = node;
    e.index = height;
    e.seq = block.view;
    e.root = block.hash;
    trace(e);
}

void Sim::on_execute(NodeId node, std::uint64_t index, const smp::Transaction &tx, NodeId chain,
                     Position position) {
    if (tx.client != kJunkClient && honest_[node]) {
        ++executed_[node];
        const auto bucket = static_cast<std::size_t>(now_ / kBucket);
        if (bucket < exec_buckets_[node].size())
            ++exec_buckets_[node][bucket];
        if (node == chain) {
            auto it = submitted_.find(tx.hash);
            if (it != submitted_.end()) {
                const auto &s = it->second;
                if (s.time >= cfg_.duration / 5 && s.time < cfg_.duration * 95 / 100)
                    latencies_.push_back(now_ - s.time);
                if (s.time >= gst_) {
                    const View v = nodes_[node]->current_view();
                    m_.max_views_to_commit = std::max<std::uint64_t>(m_.max_views_to_commit, v > s.view ? v - s.view : 0);
                }
                submitted_.erase(it);
            }
        }
    }
    TraceEvent e;
    e.kind = TraceKind::Execute;
    e.node = node;
    e.index = index;
    e.chain = chain;
    e.position = position;
    e.client = tx.client;
    e.seq = tx.seq;
    e.root = tx.hash;
    trace(e);
}

void Sim::on_pacer(NodeId node, SimTime tau, std::uint64_t dispersed, std::uint64_t retrieved) {
    if (honest_[node])
        m_.pacer.push_back(PacerSample{now_, node, tau, dispersed, retrieved});
}

Metrics Sim::finish() {
    const auto honest_count = static_cast<double>(std::count(honest_.begin(), honest_.end(), true));
    const SimTime lo = cfg_.duration / 5;
    const SimTime hi = cfg_.duration * 95 / 100;

    auto window_rate = [&](SimTime a, SimTime b) {
        double total = 0;
        for (NodeId i = 0; i < cfg_.n; ++i) {
            if (!honest_[i])
                continue;
            for (auto t = static_cast<std::size_t>(a / kBucket); t < static_cast<std::size_t>(b / kBucket); ++t)
                total += exec_buckets_[i][t];
        }
        return total / honest_count / (static_cast<double>(b - a) / kSecond);
    };
    m_.throughput = window_rate(lo, hi);
    m_.window_throughput.clear();
    for (int w = 0; w < 10; ++w)
        m_.window_throughput.push_back(window_rate(lo + (hi - lo) * w / 10, lo + (hi - lo) * (w + 1) / 10));

    double committed = 0;
    for (NodeId i = 0; i < cfg_.n; ++i)
        if (honest_[i])
            committed += static_cast<double>(executed_[i]);
    m_.committed = static_cast<std::uint64_t>(std::llround(committed / honest_count));

    std::sort(latencies_.begin(), latencies_.end());
    m_.latency_samples = latencies_.size();
    if (!latencies_.empty()) {
        double sum = 0;
        for (auto l : latencies_)
            sum += static_cast<double>(l);
        m_.latency_mean_ms = sum / static_cast<double>(latencies_.size()) / kMillisecond;
        auto pct = [&](double p) {
            auto idx = static_cast<std::size_t>(std::ceil(p * static_cast<double>(latencies_.size()))) - 1;
            return static_cast<double>(latencies_[std::min(idx, latencies_.size() - 1)]) / kMillisecond;
        };
        m_.latency_p50_ms = pct(0.50);
        m_.latency_p95_ms = pct(0.95);
    }

    m_.uncommitted_after_gst = 0;
    for (const auto &[hash, s] : submitted_)
        if (s.time >= gst_)
            ++m_.uncommitted_after_gst;

    m_.min_committed_height = std::numeric_limits<std::uint64_t>::max();
    for (NodeId i = 0; i < cfg_.n; ++i) {
        if (!honest_[i])
            continue;
        auto s = nodes_[i]->stats();
        m_.min_committed_height = std::min(m_.min_committed_height, s.committed_height);
        m_.max_view = std::max<std::uint64_t>(m_.max_view, s.view);
    }

    // Honest logs must agree on their common prefix.
    m_.logs_consistent = true;
    if (cfg_.keep_logs) {
        const auto &ref = ledgers_[reference_]->log();
        for (NodeId i = 0; i < cfg_.n; ++i) {
            if (!honest_[i])
                continue;
            const auto &log = ledgers_[i]->log();
            const auto common = std::min(ref.size(), log.size());
            if (!std::equal(ref.begin(), ref.begin() + static_cast<std::ptrdiff_t>(common), log.begin()))
                m_.logs_consistent = false;
        }
    }
    return m_;
}

} // namespace

RunResult run(const SimConfig &config) {
    Sim sim(config);
    return sim.run();
}

// -- byte accounting ---------------------------------------------------------

double dispersal_formula(std::size_t n, std::size_t m) {
    const auto f = (n - 1) / 3;
    const double lambda = kLambda;
    return 2.0 * n * lambda + n * lambda * std::log2(static_cast<double>(n)) +
           static_cast<double>(m) * n / static_cast<double>(f + 1);
}

double retrieval_formula(std::size_t n, std::size_t m) {
    const auto f = (n - 1) / 3;
    const double lambda = kLambda;
    return static_cast<double>(m) * n * n / static_cast<double>(f + 1) +
           static_cast<double>(n) * n * lambda * std::log2(static_cast<double>(n));
}

PhaseBytes measure_phase_bytes(std::size_t n, std::size_t m, std::uint64_t seed) {
    const auto params = primitives::CodingParams::for_nodes(n);
    primitives::SimThresholdScheme scheme(n, params.f, seed);
    std::vector<std::unique_ptr<smp::Mempool>> pools;
    for (NodeId i = 0; i < n; ++i)
        pools.push_back(std::make_unique<smp::Mempool>(i, params, scheme, scheme.signer(i)));

    // One transaction whose payload brings the body to m bytes.
    const auto genesis = smp::AvailabilityCertificate::genesis(0);
    const auto empty_body = smp::serialize_body(0, 1, 0, genesis, {}, n).size() + 33;
    if (m < empty_body)
        throw std::invalid_argument("microblock size too small");
    Bytes data(m - empty_body);
    std::mt19937_64 rng(seed);
    for (auto &b : data)
        b = static_cast<std::uint8_t>(rng());
    auto tx = std::make_shared<smp::Transaction>(smp::Transaction::make(0, 1, smp::TxOp::Put, 0, 0, std::move(data)));
    auto built = smp::make_microblock(0, 1, {tx}, genesis, 0, params);
    const auto root = built.block->id;

    PhaseBytes out;
    auto dis = pools[0]->start_dispersal(built);
    for (NodeId j = 0; j < n; ++j) {
        out.dispersal += static_cast<double>(dis[j].wire_size(n));
        auto ack = pools[j]->handle_mb_dis(0, dis[j]);
        if (!ack)
            throw std::logic_error("honest node refused a valid dispersal");
        out.dispersal += static_cast<double>(ack->wire_size(n));
        pools[0]->handle_mb_ack(j, *ack);
    }
    if (!pools[0]->own_ac(1))
        throw std::logic_error("no availability certificate formed");

    std::vector<smp::MbChk> chunks;
    for (NodeId j = 0; j < n; ++j) {
        auto r = pools[j]->trigger_retrieval(root, 0, 1);
        for (auto &c : r.broadcasts) {
            out.retrieval += static_cast<double>(c.wire_size(n) * n);
            chunks.push_back(std::move(c));
        }
    }
    for (NodeId i = 1; i < n; ++i) {
        for (std::size_t c = 0; c < chunks.size(); ++c) {
            if (auto trig = pools[i]->handle_mb_chk(static_cast<NodeId>(c), chunks[c])) {
                if (pools[i]->finalize_decode(trig->root) != smp::EntryState::Decoded)
                    throw std::logic_error("honest microblock failed to decode");
                break;
            }
        }
    }
    return out;
}

} // namespace imitater::netsim
