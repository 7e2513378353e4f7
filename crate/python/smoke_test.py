"""Smoke test for the strongcert Python module.

Build and install first:  pip install --no-build-isolation ./crates/py
"""

import math
import os
import sys
import tempfile

import strongcert as sc

HERE = os.path.dirname(os.path.abspath(__file__))
EXAMPLES = os.path.join(HERE, "..", "crates", "core", "examples")


def check(cond, what):
    print(("ok   " if cond else "FAIL ") + what)
    if not cond:
        sys.exit(1)


def main():
    n3m2 = sc.DelaySystem.from_json(os.path.join(EXAMPLES, "n3m2.json"))
    check((n3m2.n, n3m2.m) == (3, 2), "load n3m2")

    scalar = sc.DelaySystem([[[0.5]], [[-0.3j]]])
    r = sc.scan(scalar, points=720)
    check(abs(r["refined_estimate"] - 0.8) < 1e-9, "scalar radius equals sum of moduli")

    r = sc.scan(n3m2)
    check(abs(r["gamma0_estimate"] - 0.7507) <= 5e-4, "n3m2 scan estimate %.7f" % r["gamma0_estimate"])
    check(math.isclose(n3m2.spectral_radius_at(r["refined_argmax"]), r["refined_estimate"], rel_tol=1e-12),
          "spectral radius at argmax")

    h = sc.hermite(n3m2, 1.0)
    check(h.dim == 3 and h.nvars == 2, "hermite shape")
    check(h.min_eigenvalue([0.3, 1.1]) > 0.0, "hermite positive at gamma = 1")

    lb = sc.sos_lower_bound(n3m2, 1.0, order=3)
    check(lb["outcome"] == "certified" and lb["lower_bound"] > 0.0, "sos certificate at gamma = 1")

    ub = sc.upper_bounds(n3m2, 1.0, k_max=3)
    check(all(b >= lb["lower_bound"] for _, b in ub), "upper bounds above lower bound")

    rep = sc.certify(n3m2, 1.0)
    check(rep["verdict"] == "StronglyStable", "certify n3m2")

    n4m4 = sc.DelaySystem.from_json(os.path.join(EXAMPLES, "n4m4.json"))
    ref = sc.disprove(n4m4, 1.0, k_max=4)
    check(ref is not None and n4m4.spectral_radius_at(ref["witness"]["scan_angles"]) > 1.0, "refute n4m4")

    br = sc.bisect(n3m2, tol=1e-3)["certified_bracket"]
    check(br["lo"] <= r["refined_estimate"] <= br["hi"] and br["hi"] - br["lo"] <= 1e-3,
          "bisect bracket [%.7f, %.7f]" % (br["lo"], br["hi"]))

    with tempfile.TemporaryDirectory() as d:
        dims = sc.export_sdpa(n3m2, os.path.join(d, "n3m2.dat-s"), order=3, feasibility=True)
        check(dims["s"] == 48, "export dims")

    try:
        sc.DelaySystem([[[1.0, 2.0]]])
        check(False, "non-square rejected")
    except sc.StrongcertError:
        check(True, "non-square rejected")
    print("all checks passed")


if __name__ == "__main__":
    main()
