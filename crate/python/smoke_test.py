#!/usr/bin/env python3
"""Smoke test for the `qudit` extension module and the JSON output schema.

Build first:

    cargo build --release -p qudit-net-py --features extension-module
    cargo build --release -p qudit-net-cli

then run `python3 python/smoke_test.py` from the repository root.
"""

import importlib.util
import json
import math
import shutil
import subprocess
import sys
import tempfile
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent


def load_module(profile):
    lib = ROOT / "target" / profile / "libqudit.so"
    if not lib.exists():
        sys.exit(f"{lib} not found; build the extension module first")
    tmp = Path(tempfile.mkdtemp())
    target = tmp / "qudit.so"
    shutil.copy(lib, target)
    spec = importlib.util.spec_from_file_location("qudit", target)
    mod = importlib.util.module_from_spec(spec)
    spec.loader.exec_module(mod)
    return mod


def check(cond, msg):
    if not cond:
        sys.exit(f"FAIL: {msg}")
    print(f"ok   {msg}")


def main():
    profile = sys.argv[1] if len(sys.argv) > 1 else "release"
    q = load_module(profile)

    taus = [0.0] + [1e-3 * k for k in range(1, 41)]
    recs = q.run_gie(1000, 2, taus)
    check(abs(recs[0].c1 - 1.0) < 1e-10 and abs(recs[0].c2 - 1.0) < 1e-10, "coherent input sits on the separable bound")
    best = min(r.c1 for r in recs)
    check(0.73 <= best <= 0.77, f"minimum C1 for N=1000 near 0.75 (got {best:.4f})")

    small = q.run_gie(6, 2, [0.1, 0.4], q.Couplings(chi_nloc=1.0), tilde=True)
    check(all(r.c1_tilde <= r.c1 + 1e-12 for r in small), "Fisher-based witness is at least as tight")

    dev = q.oracle_deviation_gie(4, 3, [0.05 * k for k in range(20)], q.Couplings(chi_loc=0.3, chi_nloc=0.7))
    check(dev < 1e-10, f"closed form matches brute force (max deviation {dev:.1e})")
    dev = q.oracle_deviation_gid(4, 2, 0.3, [0.1 * k for k in range(10)], math.pi / 5)
    check(dev < 1e-10, f"dephasing engine matches brute force (max deviation {dev:.1e})")

    sched, gid = q.run_gid(200, 2, 1e-2, [k * 1e-3 for k in range(120)], beta=math.pi / 2, prep_points=10)
    check(len(gid) == 130 and gid[0].tau_post < 0.0, "dephasing run returns preparation and post-rotation points")
    check(abs(sched["beta"] - math.pi / 2) < 1e-12, "schedule reports the requested orientation")
    td = q.dephasing_time(gid)
    check(td is not None and td > 0.0, f"dephasing time found ({td})")

    exp, pre = q.log_log_fit([1.0, 2.0, 4.0], [3.0, 1.5, 0.75])
    check(abs(exp + 1.0) < 1e-12 and abs(pre - 3.0) < 1e-12, "power-law fit")

    chi = q.cgb_coupling(1.0, 1.0)
    check(abs(chi / 7.8351398e-11 - 1.0) < 1e-6, "clock coupling regression value")
    bmv = q.bmv_couplings(1e-14, 1e-4, 1e-2)
    ratio = bmv["chi_nloc"] / (bmv["chi_loc"] * 1e-2 / 1e-4)
    check(abs(ratio + 20000.0 / 20301.0) < 1e-12, "interferometer couplings at d' = 100 d")

    try:
        q.oracle_deviation_gie(40, 4, [0.1])
        check(False, "size cap raises")
    except MemoryError:
        check(True, "size cap raises MemoryError")
    try:
        q.run_gid(10, 2, 0.1, [0.0], beta=0.1, theta=0.2)
        check(False, "conflicting orientation raises")
    except ValueError:
        check(True, "conflicting orientation raises ValueError")

    validate_schema(profile)
    print("all checks passed")


def validate_schema(profile):
    try:
        import jsonschema
    except ImportError:
        print("skip schema validation (jsonschema not installed)")
        return
    exe = ROOT / "target" / profile / "qudit"
    if not exe.exists():
        print(f"skip schema validation ({exe} not built)")
        return
    schema = json.loads((ROOT / "docs" / "schema" / "records.schema.json").read_text())
    runs = [
        ["gie", "configs/gie_n10_tilde.toml"],
        ["gid", "configs/oracle_gid_n4_m2.toml"],
        ["params", "configs/params_harmonic.toml"],
        ["oracle-check", "configs/oracle_gie_n3_m3.toml"],
    ]
    tmp = Path(tempfile.mkdtemp())
    for sub, cfg in runs:
        out = tmp / f"{sub}.json"
        subprocess.run(
            [str(exe), sub, "--config", str(ROOT / cfg), "--format", "json", "--out", str(out)],
            check=True,
        )
        jsonschema.validate(json.loads(out.read_text()), schema)
        check(True, f"{sub} output validates against the schema")


if __name__ == "__main__":
    main()
