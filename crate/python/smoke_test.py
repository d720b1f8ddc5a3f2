"""Quick check of the Python bindings: python3 python/smoke_test.py"""

import math
import struct
import tempfile
from pathlib import Path

import hairlod


def write_pfm(path, width, height, values):
    with open(path, "wb") as f:
        f.write(f"PF\n{width} {height}\n-1.0\n".encode())
        f.write(struct.pack(f"<{len(values)}f", *values))


def main():
    assert hairlod.presets() == ["brown", "blonde", "red", "black"]

    single = hairlod.eval_single("brown", 0.2, 0.0, -0.1, 2.5)
    agg = hairlod.eval_aggregated("brown", 1.0, 0.5, 0.2, 0.0, -0.1, 2.5)
    # one hair, forward direction, no self shadowing: the aggregate is the fiber
    assert all(math.isclose(a, b, rel_tol=1e-12) for a, b in zip(single, agg)), (single, agg)
    prior = hairlod.eval_aggregated("brown", 8.0, 0.5, 0.2, 0.0, -0.1, 2.5, prior=True)
    assert all(v >= 0.0 for v in prior)

    table = hairlod.attenuation_table("blonde", bins=16)
    assert len(table) == 16 and math.isclose(table[-1][0], math.pi / 2)
    for _, a_f, a_b in table:
        assert all(0.0 <= v <= 1.0 for v in a_f + a_b)

    rho, n = hairlod.estimate_density_and_n(100, 0.1, 2.0, 1.0, 0.0)
    assert math.isclose(rho, 0.5) and n == 1.0

    az, lo = hairlod.profile("red", bsdf="aggregated", theta_i=-0.3, samples=24)
    assert len(az) == 24 and len(lo) == 24 and len(az[0]) == 4

    with tempfile.TemporaryDirectory() as d:
        a, b = Path(d, "a.pfm"), Path(d, "b.pfm")
        write_pfm(a, 2, 1, [0.1, 0.2, 0.3, 0.4, 0.5, 0.6])
        write_pfm(b, 2, 1, [0.2, 0.3, 0.4, 0.5, 0.6, 0.7])
        assert math.isclose(hairlod.compare_images(a, b), 20.0, rel_tol=1e-5)
        assert math.isclose(hairlod.compare_images(a, b, metric="mae"), 0.1, rel_tol=1e-5)
        try:
            hairlod.compare_images(a, Path(d, "missing.pfm"))
        except ValueError:
            pass
        else:
            raise AssertionError("missing file should raise")

    print("smoke test ok")


if __name__ == "__main__":
    main()
