"""Acceptance gate: the full Monte-Carlo certification suite at desk scale.

Runs the "acceptance" validation suite once (10^5 paths, dt = 1e-4) and
checks each numbered criterion against its group of report rows.  Expect
roughly half an hour of wall time; everything else in tests/ is fast.
"""

import math

import pytest

from fellerbm import validation


DESCRIPTIONS = {
    1: "reflecting survival race against an exponential local-time clock",
    2: "local time accrued at the first hit of 1 follows Exp(mean 2)",
    3: "inverse-local-time transform E exp(-K_1/2) = exp(-1)",
    4: "sticky boundary exit times from the boundary and from inside",
    5: "elastic and general lifetime transforms",
    6: "simulated marginals match transition kernels (density, atom, death)",
    7: "alpha-potential of the boundary occupation clock",
    8: "analytic identities: kernels vs quadrature and closed forms",
    9: "interval piecing: resolvent, exit split, two-time consistency",
    10: "generator-domain residuals, normalization, determinism",
}


@pytest.fixture(scope="module")
def report():
    return validation.run_suite()


@pytest.fixture(scope="module")
def rows(report):
    return {check.name: check for check in report.checks}


def _check_criterion(rows, number):
    names = validation.CRITERIA[number]
    failed = [n for n in names if not rows[n].passed]
    verdict = "FAIL" if failed else "PASS"
    print(f"criterion {number}: {verdict} — {DESCRIPTIONS[number]}")
    detail = "; ".join(
        f"{n}: est={rows[n].estimate:.6g} target={rows[n].target:.6g} "
        f"tol={rows[n].tolerance:.3g} ({rows[n].tol_kind})"
        for n in failed
    )
    assert not failed, f"criterion {number} failed rows: {detail}"


def test_suite_ran_clean(report, rows):
    assert len(report.checks) == 55
    assert not any(name.endswith(".error") for name in rows)
    for names in validation.CRITERIA.values():
        for name in names:
            assert name in rows
    assert not any(math.isnan(check.estimate) for check in report.checks)


def test_criterion_01_survival_race(rows):
    _check_criterion(rows, 1)


def test_criterion_02_local_time_at_first_hit(rows):
    _check_criterion(rows, 2)


def test_criterion_03_inverse_local_time_transform(rows):
    _check_criterion(rows, 3)


def test_criterion_04_sticky_exit_times(rows):
    _check_criterion(rows, 4)


def test_criterion_05_lifetime_transforms(rows):
    _check_criterion(rows, 5)


def test_criterion_06_marginal_laws(rows):
    _check_criterion(rows, 6)


def test_criterion_07_alpha_potential(rows):
    _check_criterion(rows, 7)


def test_criterion_08_analytic_identities(rows):
    _check_criterion(rows, 8)


def test_criterion_09_interval_piecing(rows):
    _check_criterion(rows, 9)


def test_criterion_10_structural_properties(rows):
    _check_criterion(rows, 10)
