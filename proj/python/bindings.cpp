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

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "imitater/consensus/types.hpp"
#include "imitater/harness/experiment.hpp"
#include "imitater/harness/verify.hpp"
#include "imitater/netsim/simulator.hpp"
#include "imitater/pacing/pacer.hpp"
#include "imitater/primitives/erasure.hpp"
#include "imitater/primitives/merkle.hpp"

namespace py = pybind11;
using namespace imitater;

namespace {

Bytes to_bytes(const py::bytes &b) {
    const std::string s = b;
    return Bytes(s.begin(), s.end());
}

py::bytes to_py(ByteView b) { return py::bytes(reinterpret_cast<const char *>(b.data()), b.size()); }

py::bytes digest_py(const Digest &d) { return to_py(ByteView(d.bytes())); }

Digest digest_of(const py::bytes &b) {
    const auto raw = to_bytes(b);
    if (raw.size() != kLambda)
        throw py::value_error("digest must be 32 bytes");
    return Digest::from_span(raw);
}

std::vector<Bytes> leaves_of(const std::vector<py::bytes> &leaves) {
    std::vector<Bytes> out;
    out.reserve(leaves.size());
    for (const auto &l : leaves)
        out.push_back(to_bytes(l));
    return out;
}

py::list encode(const py::bytes &data, std::size_t n) {
    const auto raw = to_bytes(data);
    std::vector<Bytes> chunks;
    {
        py::gil_scoped_release release;
        chunks = primitives::encode(raw, primitives::CodingParams::for_nodes(n));
    }
    py::list out;
    for (const auto &c : chunks)
        out.append(to_py(c));
    return out;
}

py::bytes decode(const std::map<std::size_t, py::bytes> &fragments, std::size_t n, std::size_t length) {
    std::vector<primitives::Fragment> frags;
    for (const auto &[i, b] : fragments)
        frags.push_back(primitives::Fragment{i, to_bytes(b)});
    return to_py(primitives::decode(frags, primitives::CodingParams::for_nodes(n), length));
}

py::tuple merkle_tree(const std::vector<py::bytes> &leaves) {
    const auto tree = primitives::merkle_build(leaves_of(leaves));
    py::list proofs;
    for (const auto &p : tree.proofs) {
        py::list siblings;
        for (const auto &s : p.siblings)
            siblings.append(digest_py(s));
        proofs.append(siblings);
    }
    return py::make_tuple(digest_py(tree.root), proofs);
}

bool merkle_verify(const std::vector<py::bytes> &proof, const py::bytes &leaf, std::size_t index,
                   const py::bytes &root) {
    primitives::MerkleProof p;
    for (const auto &s : proof)
        p.siblings.push_back(digest_of(s));
    return primitives::merkle_verify(p, to_bytes(leaf), index, digest_of(root));
}

double pacer_step(double tau_ms, std::uint64_t dispersed, std::uint64_t retrieved, double initial_tau_ms,
                  std::uint64_t threshold) {
    auto cfg = pacing::PacerConfig::with_initial(static_cast<SimTime>(initial_tau_ms * kMillisecond));
    cfg.threshold = threshold;
    pacing::PacerState st(cfg);
    st.tau = static_cast<SimTime>(tau_ms * kMillisecond);
    st.dispersed = dispersed;
    st.retrieved = retrieved;
    return static_cast<double>(pacing::pacer_step(st)) / kMillisecond;
}

netsim::SimConfig config_from(const py::dict &kw) {
    netsim::SimConfig cfg;
    for (const auto &[key, value] : kw) {
        const auto k = py::str(key).cast<std::string>();
        if (k == "protocol")
            cfg.protocol = netsim::parse_protocol(value.cast<std::string>());
        else if (k == "n")
            cfg.n = value.cast<std::size_t>();
        else if (k == "f")
            cfg.f = value.cast<std::size_t>();
        else if (k == "seed")
            cfg.seed = value.cast<std::uint64_t>();
        else if (k == "duration_ms")
            cfg.duration = static_cast<SimTime>(value.cast<double>() * kMillisecond);
        else if (k == "drain_ms")
            cfg.drain = static_cast<SimTime>(value.cast<double>() * kMillisecond);
        else if (k == "tx_rate")
            cfg.tx_rate = value.cast<double>();
        else if (k == "tx_size")
            cfg.tx_size = value.cast<std::uint32_t>();
        else if (k == "bandwidth_mbps")
            cfg.bandwidth.mean_bps = value.cast<double>() * 1e6;
        else if (k == "k_threshold")
            cfg.k_threshold = value.cast<std::uint64_t>();
        else if (k == "guard")
            cfg.guard_enabled = value.cast<bool>();
        else if (k == "batch")
            cfg.batch_size = value.cast<std::size_t>();
        else if (k == "trace")
            cfg.record_trace = value.cast<bool>();
        else if (k == "byzantine") {
            for (const auto &[id, name] : value.cast<py::dict>()) {
                netsim::Strategy s;
                s.kind = netsim::parse_strategy(name.cast<std::string>());
                cfg.byzantine[id.cast<NodeId>()] = s;
            }
        } else
            throw py::key_error("unknown simulation option: " + k);
    }
    if (!kw.contains("f"))
        cfg.f = (cfg.n - 1) / 3;
    return cfg;
}

py::dict run_simulation(const py::kwargs &kw) {
    const auto cfg = config_from(kw);
    netsim::RunResult r;
    {
        py::gil_scoped_release release;
        r = netsim::run(cfg);
    }
    py::dict out;
    out["metrics_json"] = r.metrics.to_json();
    if (cfg.record_trace) {
        std::ostringstream ss;
        r.trace.write_ndjson(ss);
        out["trace"] = ss.str();
    }
    py::dict logs;
    for (const auto &[id, log] : r.logs)
        logs[py::int_(id)] = log;
    out["logs"] = logs;
    return out;
}

py::dict verify_trace(const std::string &ndjson) {
    std::istringstream in(ndjson);
    const auto report = harness::verify_run(netsim::Trace::read_ndjson(in));
    py::dict out;
    for (const auto &c : report.checks) {
        py::dict entry;
        entry["pass"] = c.pass;
        entry["event"] = c.event ? py::cast(*c.event) : py::none();
        entry["detail"] = c.detail;
        out[py::str(c.name)] = entry;
    }
    return out;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Erasure-coded shared mempool with pipelined BFT consensus: primitives and simulator.";

    m.def("encode", &encode, py::arg("data"), py::arg("n"),
          "Systematic Reed-Solomon: n fragments, any (n-1)/3+1 of which rebuild the data.");
    m.def("decode", &decode, py::arg("fragments"), py::arg("n"), py::arg("length"),
          "Rebuild `length` bytes from {index: fragment}.");
    m.def("merkle_tree", &merkle_tree, py::arg("leaves"), "Returns (root, proofs).");
    m.def("merkle_verify", &merkle_verify, py::arg("proof"), py::arg("leaf"), py::arg("index"), py::arg("root"));
    m.def("leader_of", &consensus::leader_of, py::arg("view"), py::arg("n"));
    m.def("pacer_step", &pacer_step, py::arg("tau_ms"), py::arg("dispersed"), py::arg("retrieved"),
          py::arg("initial_tau_ms") = 20.0, py::arg("threshold") = 4,
          "One dispersal-interval update; returns the new interval in ms.");
    m.def(
        "over_distribution_guard",
        [](std::uint64_t position, std::uint64_t last_committed, std::uint64_t k) {
            return pacing::over_distribution_guard(0, position, last_committed, k) == pacing::GuardDecision::Allow;
        },
        py::arg("position"), py::arg("last_committed"), py::arg("k"), "True to ack, False to withhold.");
    m.def("transmission_time_us", &netsim::transmission_time, py::arg("bytes"), py::arg("bps"));
    m.def("_run_simulation", &run_simulation);
    m.def("verify_trace", &verify_trace, py::arg("ndjson"),
          "Invariant report for a recorded trace: {name: {pass, event, detail}}.");
}
