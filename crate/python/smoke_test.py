"""Smoke test for the `snum` extension module.

Uses an installed `snum` if there is one; otherwise loads the library built by
`cargo build --release -p snum-py` from target/.
"""

import importlib
import math
import pathlib
import shutil
import sys
import tempfile
from fractions import Fraction


def load():
    try:
        return importlib.import_module("snum")
    except ImportError:
        pass
    root = pathlib.Path(__file__).resolve().parent.parent
    for profile in ("release", "debug"):
        lib = root / "target" / profile / "libsnum.so"
        if lib.exists():
            tmp = tempfile.mkdtemp()
            shutil.copy(lib, pathlib.Path(tmp) / "snum.so")
            sys.path.insert(0, tmp)
            return importlib.import_module("snum")
    sys.exit("snum not found: run `cargo build --release -p snum-py` first")


def main():
    snum = load()

    for n in range(1, 6):
        b = snum.isomorphism_lower(n, 2 * n * 4)
        assert b.kind == "i" and b.certified
        assert Fraction(b.lower_exact) == Fraction(1, 2 * n), b

    assert snum.operator_norm(16) == (0.5, "1/2")
    assert snum.approximation_upper(3).upper == 0.5
    assert snum.gelfand_lower(4, cells=64).lower >= 0.499
    assert snum.kolmogorov_upper(3, 64).upper_exact == "1/4"
    assert snum.kolmogorov_lower(3).lower >= 0.249

    cells = [[1, 1, -1, -1], ["1/2", "-3/2", "1/2", "1/2"]]
    up = snum.bernstein_upper(cells)
    assert up.certified and up.upper_exact == "21/80", up
    lo = snum.bernstein_lower(cells)
    assert lo.lower <= up.upper

    report = snum.axiom_suite([snum.isomorphism_lower(2, 8), up, lo])
    assert report["passed"], report

    data = [(1.0, 0.25), (-2.0, 0.5)]
    assert math.isclose(snum.lorentz_norm(data, 2.0, 2.0), snum.lp_norm(data, 2.0), rel_tol=1e-12)

    h = snum.HilbertOrdering(2, 3)
    assert len(h) == 64 and h.check_face_adjacency() and h.check_prefix_nesting()
    cert = h.john_certificate(5, 40, samples=2000)
    assert cert["verification"]["passed"]
    assert math.isclose(cert["certificate"]["constant"], snum.john_constant(2))

    cube = snum.cube_isomorphism(2, 2)
    assert cube.lower_exact == "1/8" and cube.n == 4

    results = snum.selftest([1, 5, 6])
    assert all(r["passed"] for r in results), results

    try:
        snum.isomorphism_lower(2, 3)
    except ValueError:
        pass
    else:
        raise AssertionError("2n must divide N")

    print("snum smoke test: ok")


if __name__ == "__main__":
    main()
