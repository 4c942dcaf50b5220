"""Acceptance criteria 1-13, one printed pass/fail line each.

The summary lines are printed at the end of the pytest run (see conftest.py)
and are also echoed to the real stdout as each criterion finishes.
"""

import sys

import numpy as np
import pytest

from floquet_cg import acceptance as acc
from floquet_cg.acceptance import Check
from floquet_cg.opcore import bessel_j
from oracles import bessel_series

RESULTS = {}


def bessel_oracle_checks():
    worst = 0.0
    for n, x in ((0, 0.04), (1, 1.0), (2, 5.0)):
        ref = float(bessel_series(n, x))
        worst = max(worst, abs(bessel_j(n, x) - ref) / abs(ref))
    return [acc._below("13", "bessel_j vs ascending series, relative", worst, 1e-12)]


CRITERIA = {
    1: ("pure-dephasing DCG reproduces the exact solution", [acc.c1_dcg_exact]),
    2: ("PCG and DCG intersect at t = T", [acc.c2_pcg_dcg_intersect]),
    3: ("BMS and BMU coincide for pure dephasing", [acc.c3_bms_bmu]),
    4: ("CG exponent tends to 2 gamma(0) t as tau grows", [acc.c4_tau_limit]),
    5: ("circular-driving quasienergies", [acc.c5_circular_quasienergies]),
    6: ("circular-driving steady state", [acc.c6_circular_steady]),
    7: ("broken KMS relation in the rotating frame", [acc.c7_broken_kms]),
    8: ("fast-driving benchmark reductions", [acc.c8_fast_reductions]),
    9: ("fast-driving DCG vs benchmark, slow bath", [acc.c9_fast_dcg]),
    10: ("harmonic truncation stability", [acc.c10_truncation]),
    11: ("LGKS structure of CG generators", [acc.c11_lgks_suite]),
    12: ("frequency integral bounded by sup gamma", [acc.c12_quadrature_bound]),
    13: ("quadrature and Bessel oracles", [acc.c13_trapezoid_oracle, bessel_oracle_checks]),
}


def summary_line(num, title, checks):
    ok = all(c.passed for c in checks)
    worst = " | ".join(f"{c.name}: {c.measured:.3e} < {c.threshold:.0e}" for c in checks)
    return f"criterion {num:>2} {'PASS' if ok else 'FAIL'}  {title}  [{worst}]"


@pytest.mark.parametrize("num", sorted(CRITERIA))
def test_criterion(num):
    title, fns = CRITERIA[num]
    checks: list[Check] = []
    for fn in fns:
        checks.extend(fn())
    line = summary_line(num, title, checks)
    RESULTS[num] = line
    print(line, file=sys.__stdout__, flush=True)
    failed = [c.line() for c in checks if not c.passed]
    assert not failed, "\n".join(failed)


def test_fig3_slow_driving():
    for c in acc.fig3_checks():
        assert c.passed, c.line()


def test_fig4_long_time_agreement():
    for c in acc.fig4_long_time_agreement():
        assert c.passed, c.line()


def test_fig6_asymptotics():
    for c in acc.fig6_asymptotics():
        assert c.passed, c.line()


def test_oracle_trapezoid_converged():
    # halving the grid spacing must not move the oracle by more than its own budget
    bath, spec, support = acc.oracle_inputs(3)[1]
    a = acc.trapezoid_freq_integral(bath, spec, support, points=500_001)
    b = acc.trapezoid_freq_integral(bath, spec, support)
    assert abs(a - b) < 1e-7 * abs(b)
    assert np.isfinite(a)
