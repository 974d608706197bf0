"""Smoke test for the teamsplit Python extension.

Build first with `cargo build -p teamsplit-py --release` (or install with
`maturin develop -m crates/py/Cargo.toml`), then run `python3 python/smoke_test.py`.
"""

import importlib.util
import json
import math
import os
import shutil
import sys
import tempfile
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent


def load_module():
    try:
        import teamsplit

        return teamsplit
    except ImportError:
        pass
    candidates = [os.environ.get("TEAMSPLIT_LIB")] + [
        ROOT / "target" / profile / name
        for profile in ("release", "debug")
        for name in ("libteamsplit.so", "libteamsplit.dylib", "teamsplit.dll")
    ]
    for lib in candidates:
        if lib and Path(lib).exists():
            suffix = ".pyd" if str(lib).endswith(".dll") else ".so"
            dest = Path(tempfile.mkdtemp()) / f"teamsplit{suffix}"
            shutil.copy(lib, dest)
            spec = importlib.util.spec_from_file_location("teamsplit", dest)
            module = importlib.util.module_from_spec(spec)
            spec.loader.exec_module(module)
            return module
    sys.exit("teamsplit extension not found; run `cargo build -p teamsplit-py --release` first")


def main():
    ts = load_module()

    formation = ts.generate_formation("squad_column", seed=7)
    bundle = formation["bundle"]
    assert bundle.n == 9 and bundle.m == 3, bundle
    assert sorted(formation["truth"]) == [2, 3]

    s, alpha, rho = ts.katz_similarity(bundle)
    assert len(s) == 9 and all(len(r) == 9 for r in s)
    assert 0 < alpha * rho < 1

    x = ts.embed(s, 3)
    assert len(x) == 9 and len(x[0]) == 6
    assert x == ts.embed_bundle(bundle, 3)

    teams = ts.kmeans(x, 3, seed=1)
    assert sorted(set(teams["labels"])) == [0, 1, 2]
    assert -1 <= ts.silhouette(x, teams["labels"]) <= 1
    assert ts.accuracy([0, 0, 1, 1], [1, 1, 0, 0]) == 1.0

    report = ts.divide(bundle, 2, seed=1)
    assert len(report["labels"]) == 9 and sum(report["team_sizes"]) == 9
    assert report["accuracy"] is not None

    with tempfile.TemporaryDirectory() as d:
        path = os.path.join(d, "bundle.json")
        bundle.save(path)
        assert ts.Bundle.load(path) == bundle
    assert ts.Bundle.from_json(bundle.to_json()) == bundle

    pair = ts.Bundle([[[0.0, 1.0], [1.0, 0.0]]], ["spatial"], directed=[False])
    assert sorted(ts.divide(pair, 2)["labels"]) == [0, 1]

    system = ts.generate_random_system(30, 3, seed=2)
    assert system["bundle"].n == 30 and len(system["cluster_seeds"]) == 3

    rows = ts.run_experiment(json.dumps({
        "input": {"scenario": {"generator": "formation", "family": "platoon_vee", "seed": 1}},
        "methods": ["multimodal", "single:spatial"],
        "c_values": [2, 3],
        "trials": 2,
    }))
    assert len(rows) == 8 and all(r["error"] is None for r in rows)
    assert all(math.isfinite(r["silhouette"]) for r in rows)

    try:
        ts.katz_similarity(bundle, alpha=10.0)
    except ts.TeamsplitError as e:
        assert "alpha" in str(e)
    else:
        raise AssertionError("expected a Katz validity error")

    print("python smoke test: ok")


if __name__ == "__main__":
    main()
