"""Smoke test for the hallmhd Python extension.

Build and install first:  pip install --no-build-isolation -e crates/py
"""

import json
import math
import os
import tempfile

import hallmhd


def main():
    print("hallmhd", hallmhd.__version__)

    g = hallmhd.Grid(r0=1.0, r1=2.0, lz=1.0, nr=10, nz=8)
    one = hallmhd.Field.constant(g, 1.0)
    assert abs(one.lp_norm(2.0) - math.sqrt(3.0 * math.pi)) < 1e-12
    assert one.ddr().max_abs() == 0.0

    sine = hallmhd.Field.from_function(hallmhd.Grid(nr=4, nz=256), lambda r, z: 0.5 * math.sin(z))
    assert abs(sine.crossing_time() - 1.0) < 1e-3

    code, report = hallmhd.verify_tensors(max_order=4, max_commutator=2)
    assert code == 0, report
    assert len(json.loads(report)["components"]) == 3 + 9 + 27 + 81
    code, report = hallmhd.verify_tensors(max_order=3, max_commutator=1, flip_christoffel_sign=True)
    assert code == 2
    try:
        hallmhd.verify_tensors(max_order=0)
    except ValueError:
        pass
    else:
        raise AssertionError("max_order = 0 should be rejected")

    assert all(ok for *_, ok in hallmhd.theta_cancellation())
    assert all(ok for *_, ok in hallmhd.corollary_checks(max_weight=2, samples=3))

    with tempfile.TemporaryDirectory() as tmp:
        out = os.path.join(tmp, "run")
        code, manifest = hallmhd.simulate(hallmhd.default_config("coupled_swirl"), out)
        assert code == 0, manifest
        assert json.loads(manifest)["verdicts"]["status"] == "completed"
        code, mismatches = hallmhd.diagnose(out)
        assert code == 0, mismatches
        h = hallmhd.Field.load_cylf(os.path.join(out, json.loads(manifest)["snapshots"][-1]["files"][-1]))
        assert h.grid.nr == 32

    print("smoke test passed")


if __name__ == "__main__":
    main()
