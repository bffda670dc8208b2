"""Smoke test for the georobust extension module."""

import math
import sys

import georobust


def main() -> int:
    assert set(georobust.families()) == {"dg", "ngqc", "sr-ngqc", "nhqc", "sr-nhqc"}

    sched = georobust.build("sr-ngqc")
    assert abs(sched.duration - 3 * math.pi) < 1e-12
    assert abs(sched.src_residual()) < georobust.SRC_TOL
    again = georobust.Schedule.from_text(sched.to_text())
    assert again.segments == sched.segments

    u = sched.unitary()
    assert abs(abs(u[0][1]) - 1.0) < 1e-9

    nhqc = georobust.build("nhqc")
    assert nhqc.dim == 3
    assert abs(abs(nhqc.geometric_phase()) - math.pi) < 1e-9

    f_dg = georobust.fidelity("dg", 0.1, steps_per_pi=400)
    f_sr = georobust.fidelity("sr-ngqc", 0.1, steps_per_pi=400)
    assert abs((1 - f_dg) - 0.012337) < 1e-3, f_dg
    assert f_sr > f_dg

    csv = georobust.sweep_beta([-0.05, 0.0, 0.05], [0.0, 1e-4], ["dg", "sr-nhqc"], 200)
    lines = csv.splitlines()
    assert lines[0] == "family,beta,gamma,fidelity,infidelity,leakage,src_residual"
    assert len(lines) == 1 + 2 * 3 * 2

    try:
        georobust.build("nope")
    except ValueError:
        pass
    else:
        raise AssertionError("unknown family accepted")

    print("georobust smoke test passed")
    return 0


if __name__ == "__main__":
    sys.exit(main())
