# Copyright 2026 The linksim Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
# http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.


import random

import pytest

import linksim


def naive(a, b):
    return [[sum(a[i][p] * b[p][j] for p in range(len(b))) for j in range(len(b[0]))] for i in range(len(a))]


def test_gemm_matches_triple_loop():
    rng = random.Random(5)
    for _ in range(5):
        m, k, n = (rng.randint(1, 40) for _ in range(3))
        a = [[rng.randint(-50, 50) for _ in range(k)] for _ in range(m)]
        b = [[rng.randint(-50, 50) for _ in range(n)] for _ in range(k)]
        assert linksim.gemm(a, b) == naive(a, b)


def test_config_round_trip_and_errors():
    cfg = linksim.RunConfig({"pcie.lanes": "8"})
    assert cfg.get("pcie.lanes") == "8"
    assert linksim.RunConfig.parse(cfg.echo()) == cfg
    assert [k for k, _, _ in linksim.config_keys()] == sorted(cfg.values())
    with pytest.raises(linksim.ConfigError, match="bogus"):
        cfg.set("bogus", "1")
    with pytest.raises(ValueError):
        linksim.RunConfig.parse("pcie.lanes = many\n", "x.cfg")


def test_simulate_small_gemm():
    r = linksim.simulate({"workload.n": "64"})
    assert r.total_ns > 0
    assert r.gemm_ops == 1
    assert r.bytes_h2d == 2 * 64 * 64 * 4
    assert r.translation.footprint_pages == linksim.footprint_pages(64) == 12
    assert max(r.compute_bound_ns, r.transfer_bound_ns) <= r.gemm_ns


def test_devmem_requires_device_placement():
    with pytest.raises(linksim.ConfigError, match="mem.placement"):
        linksim.simulate({"mode": "devmem"})


def test_sweep_csv_is_deterministic():
    base = linksim.RunConfig({"workload.n": "64"})
    axes = [("pcie.lanes", ["2", "8"]), ("pcie.lane_rate_gbps", ["4", "16"])]
    a = linksim.to_csv(linksim.sweep(base, axes, jobs=1))
    b = linksim.to_csv(linksim.sweep(base, axes, jobs=2))
    assert a == b
    header, *rows = a.strip().split("\n")
    assert header.split(",") == linksim.csv_columns()
    assert len(rows) == 4


def test_quick_figure():
    f = linksim.run_figure("table5", quick=True)
    assert f["name"] == "table5"
    assert [p for p, _ in f["series"]["footprint_pages"]] == [64, 256, 1024]
    assert f["csv"].startswith("run_id,")
    with pytest.raises(linksim.ConfigError, match="fig3"):
        linksim.run_figure("nope")


def test_mix_model():
    assert linksim.mix_time(0.0, 2.0, 1.0, 0.5) == pytest.approx(0.75)
    pcie = linksim.simulate({"workload.kind": "vit", "workload.seq_len": "16"})
    dev = linksim.simulate(
        {"workload.kind": "vit", "workload.seq_len": "16", "mode": "devmem", "mem.placement": "device"}
    )
    t = linksim.devmem_threshold(dev, pcie)
    assert set(t) == {"crossing", "w_gemm", "w_gemm_grid", "w_nongemm", "dominant"}
    if t["crossing"]:
        assert abs(t["w_gemm"] - t["w_gemm_grid"]) <= 1e-4
