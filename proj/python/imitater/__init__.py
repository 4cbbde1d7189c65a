# Copyright 2026 The Imitater Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Erasure-coded shared mempool, pipelined BFT consensus and a deterministic simulator."""

import json

from ._core import (
    decode,
    encode,
    leader_of,
    merkle_tree,
    merkle_verify,
    over_distribution_guard,
    pacer_step,
    transmission_time_us,
    verify_trace,
)
from ._core import _run_simulation

__all__ = [
    "decode",
    "encode",
    "leader_of",
    "merkle_tree",
    "merkle_verify",
    "over_distribution_guard",
    "pacer_step",
    "run_simulation",
    "transmission_time_us",
    "verify_trace",
]


def run_simulation(**options):
    """Run one seeded simulation.

    Options mirror the CLI: protocol ("imitater" or "baseline"), n, f, seed,
    duration_ms, drain_ms, tx_rate, tx_size, bandwidth_mbps, batch, k_threshold,
    guard, trace, and byzantine ({node id: strategy name}).

    Returns {"metrics": dict, "logs": {node: str}} plus "trace" (NDJSON) when
    trace=True.
    """
    raw = _run_simulation(**options)
    out = {"metrics": json.loads(raw.pop("metrics_json"))}
    out.update(raw)
    return out
