"""Smoke test for the Python extension.

Build first with ``cargo build --release -p wentzell-py``; the script copies
the shared library next to itself as ``wentzell_py.so`` and imports it.
"""

import math
import shutil
import sys
from pathlib import Path

HERE = Path(__file__).resolve().parent
ROOT = HERE.parent


def load():
    for profile in ("release", "debug"):
        lib = ROOT / "target" / profile / "libwentzell_py.so"
        if lib.exists():
            shutil.copy(lib, HERE / "wentzell_py.so")
            break
    sys.path.insert(0, str(HERE))
    import wentzell_py

    return wentzell_py


def main():
    w = load()
    sticky = w.BoundaryModel.sticky(1.0)
    assert sticky.descriptor == "sticky(gamma=1)"
    assert w.BoundaryModel.from_wentzell(0.0, 1.0, 1.0).descriptor == "sticky(gamma=1)"

    dens, atom = w.transition(sticky, 1.0, 0.0, [0.5, 1.0])
    assert abs(atom - 0.336204002446341) < 1e-12, atom
    assert all(d > 0 for d in dens)

    ref = w.BoundaryModel.reflecting()
    assert abs(w.resolvent_apply(ref, 2.0, lambda y: 1.0, 0.3) - 0.5) < 1e-9

    elastic = w.BoundaryModel.elastic(1.0)
    r = w.interval_resolvent(elastic, ref, 1.0, lambda y: 1.0, 0.0)
    assert 0.0 < r < 1.0

    path = w.simulate(sticky, 0.0, 1.0, 1000, 7)
    assert len(path["value"]) == 1001
    assert path == w.simulate(sticky, 0.0, 1.0, 1000, 7)
    assert all(b >= a for a, b in zip(path["local_time"], path["local_time"][1:]))

    piece = w.interval_path(0.5, elastic, ref, 1.0, 1000, 3)
    assert piece["segment_kinds"][0] == "initial"
    assert all(0.0 <= v <= 1.0 for v in piece["value"])

    kind, time, level, lt = w.exit_time(ref, 0.5, 0.4, 0.6, 1e-4, 10.0, 1)
    assert kind == "crossed" and level in (0.4, 0.6)

    assert abs(w.v_exit(0.5, 0.0, 1.0, 0.0) - 1 / math.cosh(1.0)) < 1e-14
    assert w.kill_before_hit_prob(1.0, 1.0) == 0.5
    assert abs(w.zeta_lt(1.0, 1.0, 2.0) - 0.2) < 1e-15
    assert abs(w.ls_alpha_potential(2.0, 1.0, 0.0) - 0.25) < 1e-15
    assert abs(w.sticky_exit_mean(0.3, 0.1) - 0.04) < 1e-15
    assert abs(w.g_family(0.0, 1.0, 1.0, 0.0) - 0.336204002446341) < 1e-12

    try:
        w.BoundaryModel.sticky(-1.0)
    except ValueError:
        pass
    else:
        raise AssertionError("negative stickiness accepted")

    import json

    report = json.loads(w.validate(["analytic"], 1))
    assert report["pass"], report
    print("python smoke test: ok")


if __name__ == "__main__":
    main()
