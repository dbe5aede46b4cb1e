# Copyright 2026 The Exposure Rollout Authors.
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
import json
import math
import os
import random
import subprocess

import pytest

import exposure_rollout as er

SMALL = {"customers": 30, "items": 12, "k": 4, "eta": 4, "seed": 5, "data_seed": 2}


def test_run_report_shape():
    report = er.run(SMALL)
    metrics = report["metrics"]
    assert set(metrics) >= {"upsilon", "pi", "z", "ec_immediate", "step_ec", "utility"}
    assert len(metrics["step_ec"]) == 4
    assert len(report["observed"]) == 4
    assert metrics["upsilon"] >= 1.0 - 1e-12
    assert report["config"]["label"] == "ilp-EL"


def test_run_is_deterministic(tmp_path):
    a = er.run(dict(SMALL, method="cand"), out=str(tmp_path / "a"))
    b = er.run(dict(SMALL, method="cand"), out=str(tmp_path / "b"))
    assert a == b
    assert (tmp_path / "a" / "report.json").read_bytes() == (tmp_path / "b" / "report.json").read_bytes()
    for name in ("step_ec.csv", "utility.csv", "exposure_by_step.csv"):
        assert (tmp_path / "a" / name).exists()


def test_bad_settings_raise():
    with pytest.raises(ValueError):
        er.run(dict(SMALL, k=0))
    with pytest.raises(ValueError):
        er.run(dict(SMALL, method="cand", prefilter=True))


def test_solver_matches_exhaustive_search():
    rng = random.Random(7)
    for _ in range(30):
        n, k = 8, 3
        rel = [rng.random() for _ in range(n)]
        share = [rng.random() for _ in range(n)]
        total = sum(share)
        share = [x / total for x in share]
        exposure = [0.0] * n
        theta = rng.random()
        items, value = er.solve(exposure, 0, share, rel, k, theta)
        best_rel = sum(sorted(rel, reverse=True)[:k])
        best = math.inf
        for combo in itertools.combinations(range(n), k):
            if sum(rel[s] for s in combo) < theta * best_rel - 1e-9:
                continue
            cost = sum(abs(exposure[s] + (1.0 / k if s in combo else 0.0) - share[s]) for s in range(n))
            best = min(best, cost)
        assert value == pytest.approx(best, abs=1e-12)
        assert er.brute_force(exposure, 0, share, rel, k, theta)[1] == value


def test_small_helpers():
    assert er.top_k([0.9, 0.8, 0.1, 0.2], 2) == [0, 1]
    assert er.exposure_change([0.5, 0.3, 0.2], [0.4, 0.4, 0.2]) == pytest.approx(0.2)
    assert er.theta_schedule("geometric", 10)[:3] == [0.5, 0.75, 0.875]
    ups, pi, z = er.transition_metrics([0.05] * 10, 0.5)
    assert z == pytest.approx(1.0, abs=1e-12)
    assert er.transition_metrics([0.0], 0.0) == (None, None, None)


def test_impact_and_sweep():
    impact = er.immediate_impact(SMALL)
    hist = impact["histogram"]
    assert hist["below_50"] + hist["from_50_to_100"] + hist["above_100"] == pytest.approx(1.0)
    result = er.sweep(SMALL, [1, 2], [0, 1], 2)
    assert [s["eta"] for s in result["summary"]] == [1, 2]
    assert result["summary"][0]["mean_pi"] == 1.0


@pytest.mark.skipif("ROLLOUT_CLI" not in os.environ, reason="CLI path not provided")
def test_cli_round_trip(tmp_path):
    cli = os.environ["ROLLOUT_CLI"]
    conf = tmp_path / "run.conf"
    conf.write_text("customers = 20\nitems = 10\nk = 3\neta = 3\nseed = 4\n")
    out = tmp_path / "out"
    subprocess.run([cli, "run", "--config", str(conf), "--out", str(out), "--trace-solves"], check=True)
    report = json.loads((out / "report.json").read_text())
    assert report["config"]["eta"] == 3
    header = (out / "solves.csv").read_text().splitlines()[0]
    assert header == "time,customer,step,objective,utility_norm,item_1,item_2,item_3"
    again = er.run_config_file(str(conf))
    assert report["metrics"] == again["metrics"]
    assert report["observed"] == again["observed"]
