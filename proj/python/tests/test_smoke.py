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

import itertools

import pytest

import imitater


def test_encode_any_f_plus_one_fragments_decode():
    data = bytes(range(200)) * 3
    chunks = imitater.encode(data, 7)
    assert len(chunks) == 7
    # systematic: the first k fragments concatenate to the padded input
    assert b"".join(chunks[:3])[: len(data)] == data
    for subset in itertools.combinations(range(7), 3):
        got = imitater.decode({i: chunks[i] for i in subset}, 7, len(data))
        assert got == data


def test_decode_rejects_too_few_fragments():
    chunks = imitater.encode(b"hello world", 4)
    with pytest.raises(Exception):
        imitater.decode({0: chunks[0]}, 4, 11)


def test_merkle_proofs_verify_and_reject_tampering():
    leaves = [bytes([i]) * 10 for i in range(5)]
    root, proofs = imitater.merkle_tree(leaves)
    assert len(root) == 32
    for i, leaf in enumerate(leaves):
        assert imitater.merkle_verify(proofs[i], leaf, i, root)
    assert not imitater.merkle_verify(proofs[0], b"x" * 10, 0, root)
    assert not imitater.merkle_verify(proofs[1], leaves[1], 2, root)


def test_leader_rotation():
    assert [imitater.leader_of(v, 4) for v in range(1, 9)] == [imitater.leader_of(v + 4, 4) for v in range(1, 9)]
    assert len({imitater.leader_of(v, 4) for v in range(4)}) == 4


def test_pacer_and_guard():
    assert imitater.pacer_step(20.0, 10, 2) == pytest.approx(22.0)
    assert imitater.pacer_step(22.0, 10, 9) == pytest.approx(20.0)
    assert imitater.over_distribution_guard(5, 0, 8)
    assert not imitater.over_distribution_guard(9, 0, 8)


def test_transmission_time():
    assert imitater.transmission_time_us(2**20, 100e6) == 83887


def test_run_simulation_and_verify_trace():
    out = imitater.run_simulation(n=4, seed=3, duration_ms=1500, drain_ms=1000, tx_rate=50, trace=True)
    m = out["metrics"]
    assert m["committed"] > 0
    assert m["throughput"] > 0
    assert set(out["logs"]) == {0, 1, 2, 3}
    assert len(set(out["logs"].values())) == 1
    report = imitater.verify_trace(out["trace"])
    assert report and all(c["pass"] for c in report.values())

    again = imitater.run_simulation(n=4, seed=3, duration_ms=1500, drain_ms=1000, tx_rate=50, trace=True)
    assert again["trace"] == out["trace"]


def test_byzantine_option_and_bad_keys():
    out = imitater.run_simulation(n=4, seed=5, duration_ms=1000, drain_ms=1000, tx_rate=30, byzantine={3: "crash"})
    assert set(out["logs"]) == {0, 1, 2}
    with pytest.raises(KeyError):
        imitater.run_simulation(n=4, bogus=1)
    with pytest.raises(Exception):
        imitater.run_simulation(n=5)
