#!/usr/bin/env python3
"""Smoke test for the Python bindings.

Builds the extension module with cargo if needed, copies the shared
library next to this script, imports it, and exercises every exported
entry point against known-exact values.

Run from anywhere:  python3 python/smoke_test.py
"""

import json
import pathlib
import shutil
import subprocess
import sys

ROOT = pathlib.Path(__file__).resolve().parents[1]


def ensure_module():
    """Build the cdylib and place it where `import involute_py` finds it."""
    subprocess.run(
        ["cargo", "build", "-p", "involute-py"],
        cwd=ROOT,
        check=True,
    )
    built = ROOT / "target" / "debug" / "libinvolute_py.so"
    dest = ROOT / "python" / "involute_py.so"
    shutil.copy2(built, dest)
    sys.path.insert(0, str(ROOT / "python"))


def main():
    ensure_module()
    import involute_py as iv

    # --- Bernoulli table: frozen exact values ------------------------------
    betas = iv.bernoulli(6)
    assert betas[0] == ["1", "1"], betas[0]
    assert betas[1] == ["-1", "2"], betas[1]
    assert betas[2] == ["1", "12"], betas[2]
    assert betas[3] == ["0", "1"], betas[3]
    assert betas[4] == ["-1", "720"], betas[4]
    assert betas[5] == ["0", "1"], betas[5]
    assert betas[6] == ["1", "30240"], betas[6]
    print("bernoulli table ........ ok")

    # --- Surface construction, validation, round trip ----------------------
    fam = iv.Surface.family(10, "1/2")
    assert fam.is_valid() and fam.validate() == []
    assert fam.trunc == 10
    assert fam.epsilon == ["1", "2"]
    round_trip = iv.Surface.from_json(fam.to_json())
    assert round_trip.to_json() == fam.to_json()

    bad = iv.Surface.from_json(json.dumps({
        "trunc": 4,
        "terms": [
            {"i": 3, "j": 1, "c": {"re": ["1", "1"], "im": ["0", "1"]}},
            {"i": 1, "j": 3, "c": {"re": ["1", "1"], "im": ["0", "1"]}},
        ],
    }))
    assert not bad.is_valid()
    assert len(bad.validate()) >= 1
    print("surfaces ............... ok")

    # --- Metric ------------------------------------------------------------
    zero = iv.Surface.zero(5, "1")
    gen5 = iv.Surface.generator(5, "1")
    d = zero.metric_distance(gen5)
    assert 0.0 < d <= 1.0, d
    assert zero.metric_distance(zero) == 0.0
    print("metric ................. ok")

    # --- Involution pair certification --------------------------------------
    pair = json.loads(iv.involution_pair(fam, 8))
    cert = pair["certification"]
    assert all(cert[k] is True for k in cert), cert
    print("involution pair ........ ok")

    # --- Normalized transform ----------------------------------------------
    nt = json.loads(iv.normalize(gen5, 5))
    assert nt["residual_degree"] == 6
    # Frozen lowest-slice value: the x*y^2 coefficient of u is -1/4.
    u_terms = {(t["i"], t["j"]): t["c"] for t in nt["u"]["terms"]}
    assert u_terms[(1, 2)]["re"] == ["-1", "4"], u_terms
    print("normalized transform ... ok")

    # --- Divergence certificate ---------------------------------------------
    report = json.loads(iv.certify_divergence(12, "1"))
    assert report["N"] == 12
    assert report["pass"] is True
    rows = {row["n"]: row for row in report["table"]}
    assert rows[5]["c_im"] == ["-4", "3"], rows[5]
    assert rows[7]["c_im"] == ["-1", "3"], rows[7]
    assert rows[4]["c_im"] == ["0", "1"]
    csv_text = iv.certify_divergence(12, "1", csv=True)
    assert csv_text.splitlines()[0] == "n,s_root"
    assert len(csv_text.splitlines()) == 12
    print("divergence certificate . ok")

    # --- Staged perturbation search -----------------------------------------
    found = iv.perturb(iv.Surface.zero(4, "1"), [5])
    assert found.to_json() == iv.Surface.generator(5, "1").to_json()
    try:
        iv.perturb(iv.Surface.zero(4, "1"), [5, 7])
    except ValueError as e:
        assert "degree 7" in str(e), e
    else:
        raise AssertionError("stage plan [5, 7] should fail at degree 7")
    print("perturbation search .... ok")

    print("\nall smoke tests passed")


if __name__ == "__main__":
    main()
