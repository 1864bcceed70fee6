"""Statistical and numerical harness tying sample paths to kernels.

Three layers:

* small numeric operations -- ``mc_resolvent``, ``empirical_measure_distance``,
  ``boundary_residual_numeric``, ``first_passage_check`` -- each comparing a
  Monte Carlo or finite-difference estimate to a closed form from
  :mod:`fellerbm.kernels` / :mod:`fellerbm.laws`;
* a registry of named checks built on those operations;
* ``run_suite`` executing a suite of checks into a :class:`ValidationReport`
  whose body (everything except runtimes) is byte-identical across reruns
  with the same configuration.

Tolerances come in two kinds, recorded per check: ``abs`` (a fixed number)
and ``3se`` (three standard errors, in which case the stored tolerance is
the realized 3*stderr).  Checks derive independent seeds from the master
seed and may in principle run concurrently; the report is sorted by check
name, so assembly order does not matter.
"""

from __future__ import annotations

import dataclasses
import json
import math
import time
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional

import numpy as np
from scipy import stats
from scipy.integrate import quad

from . import kernels, laws, mc
from .engine import TimeGrid, build_process, sample_bm, sticky_time_change
from .errors import GridTooShort
from .model import BoundaryModel, Mode
from .rng import generator

DESK_PATHS = 100_000
DESK_DT = 1e-4
DEFAULT_SEED = 20260814


# ---------------------------------------------------------------------------
# result containers


@dataclass(frozen=True)
class MCEstimate:
    """Monte Carlo sample mean with its standard error."""

    mean: float
    stderr: float
    n: int
    master_seed: int

    @staticmethod
    def from_samples(samples: np.ndarray, master_seed: int) -> "MCEstimate":
        arr = np.asarray(samples, dtype=float)
        n = arr.size
        se = float(arr.std(ddof=1) / math.sqrt(n)) if n > 1 else 0.0
        return MCEstimate(float(arr.mean()), se, n, master_seed)


@dataclass(frozen=True)
class CheckResult:
    """One named check: |estimate - target| <= tolerance decides `passed`.

    ``tol_kind`` records how the tolerance was derived ("abs", "3se",
    "rel" with the absolute number stored either way); ``runtime`` is wall
    seconds for the producing group and is excluded from the report body.
    """

    name: str
    target: float
    estimate: float
    tolerance: float
    tol_kind: str
    passed: bool
    runtime: float = 0.0


@dataclass
class ValidationReport:
    master_seed: int
    suite: str
    n_paths: int
    dt: float
    checks: list[CheckResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def body_dict(self) -> dict:
        """Deterministic content: everything except runtimes."""
        return {
            "master_seed": self.master_seed,
            "suite": self.suite,
            "n_paths": self.n_paths,
            "dt": self.dt,
            "passed": self.passed,
            "checks": [
                {
                    "name": c.name,
                    "target": repr(c.target),
                    "estimate": repr(c.estimate),
                    "tolerance": repr(c.tolerance),
                    "tol_kind": c.tol_kind,
                    "passed": c.passed,
                }
                for c in self.checks
            ],
        }

    def body_json(self) -> str:
        return json.dumps(self.body_dict(), indent=2)

    def table(self) -> str:
        w = max([len(c.name) for c in self.checks], default=4)
        lines = [
            f"suite={self.suite} seed={self.master_seed} n_paths={self.n_paths} dt={self.dt:g}",
            f"{'check':<{w}}  {'target':>13} {'estimate':>13} {'tol':>10} {'kind':>4} {'ok':>4} {'sec':>7}",
        ]
        for c in self.checks:
            lines.append(
                f"{c.name:<{w}}  {c.target:>13.6g} {c.estimate:>13.6g} "
                f"{c.tolerance:>10.3g} {c.tol_kind:>4} {'PASS' if c.passed else 'FAIL':>4} {c.runtime:>7.1f}"
            )
        lines.append(f"overall: {'PASS' if self.passed else 'FAIL'} ({len(self.checks)} checks)")
        return "\n".join(lines)


def _row(name: str, target: float, estimate: float, tol: float, kind: str) -> CheckResult:
    return CheckResult(
        name=name,
        target=float(target),
        estimate=float(estimate),
        tolerance=float(tol),
        tol_kind=kind,
        passed=bool(abs(float(estimate) - float(target)) <= float(tol)),
    )


# ---------------------------------------------------------------------------
# numeric operations


def mc_resolvent(
    model: BoundaryModel,
    f: Callable[[np.ndarray], np.ndarray],
    lam: float,
    x: float,
    n_paths: int,
    grid: TimeGrid,
    master_seed: int,
    tolerance: Optional[float] = None,
) -> MCEstimate:
    """Monte Carlo resolvent E_x int_0^zeta e^{-lam t} f(X_t) dt.

    The time horizon must satisfy lam * t_max >= 20 so the truncation
    error e^{-lam t_max}/lam stays below Monte Carlo resolution; with an
    explicit `tolerance` the bound must additionally be below tolerance/10.
    """
    trunc = math.exp(-lam * grid.t_max) / lam
    if lam * grid.t_max < 20.0:
        raise GridTooShort(
            f"lam*t_max = {lam * grid.t_max:g} < 20; truncation error {trunc:g} too large"
        )
    if tolerance is not None and trunc >= tolerance / 10.0:
        raise GridTooShort(
            f"truncation bound {trunc:g} exceeds tolerance/10 = {tolerance / 10.0:g}"
        )
    if model.mode in (Mode.ABSORBING, Mode.TRAP_KILL):
        samples = mc.stopped_resolvent_ensemble(
            master_seed, n_paths, grid.dt, lam, f, x,
            hold_rate=model.beta if model.mode is Mode.TRAP_KILL else None,
            stopped=False, t_max=grid.t_max,
        )
    else:
        samples = mc.resolvent_ensemble(
            master_seed, n_paths, grid.dt, lam, f, x,
            beta=model.beta, gamma=model.gamma, outer_max=grid.t_max,
        )
    return MCEstimate.from_samples(samples, master_seed)


@dataclass(frozen=True)
class MeasureDistance:
    """Empirical-vs-analytic comparison of one time-t marginal."""

    l1: float
    atom_estimate: float
    atom_target: float
    atom_stderr: float
    death_estimate: float
    death_target: float
    death_stderr: float
    n: int


def _binned_mass(density: Callable, edges: np.ndarray) -> np.ndarray:
    """Analytic probability mass per bin via fine trapezoids."""
    ys = np.linspace(edges[0], edges[-1], (edges.size - 1) * 40 + 1)
    dens = np.asarray(density(ys))
    cum = np.concatenate([[0.0], np.cumsum(0.5 * (dens[1:] + dens[:-1]) * np.diff(ys))])
    return np.diff(np.interp(edges, ys, cum))


def empirical_measure_distance(
    model: BoundaryModel,
    t: float,
    x: float,
    n_paths: int,
    dt: float,
    master_seed: int,
    bins: int = 50,
) -> MeasureDistance:
    """L1 distance between the simulated marginal and the analytic density,
    plus boundary-atom and death-mass discrepancies.

    Paths count as "at 0" below eps_flat = 2*sqrt(dt) for sticky/general
    (the analytic target folds the density mass of that layer into the
    atom); for absorbing / trap-and-kill the trap state is exact.  The
    stderr fields are binomial, computed from the analytic masses so that
    tolerances are deterministic.
    """
    eps = 2.0 * math.sqrt(dt)
    measure = kernels.transition_measure(model, t, x)
    atom_target = measure.atoms.get(0.0, 0.0)
    if model.mode in (Mode.ABSORBING, Mode.TRAP_KILL):
        sim = mc.absorbed_marginal_ensemble(
            master_seed, n_paths, dt, t, x,
            hold_rate=model.beta if model.mode is Mode.TRAP_KILL else None,
        )
        at_zero = sim["at_zero"]
        alive = sim["alive"]
        interior = sim["value"][alive & ~at_zero]
        lo = eps * 0.0  # trap state is exact; no boundary layer
        atom_est = float(np.mean(at_zero))
    else:
        sim = mc.marginal_ensemble(
            master_seed, n_paths, dt, t, x, beta=model.beta, gamma=model.gamma
        )
        alive = sim["alive"]
        vals = sim["value"][alive]
        at_zero = vals <= eps
        interior = vals[~at_zero]
        lo = eps
        atom_est = float(np.sum(at_zero)) / n_paths
        atom_target = atom_target + quad(
            lambda y: float(measure.density(y)), 0.0, eps, epsabs=1e-13
        )[0]

    hi = x + 4.2 * math.sqrt(t)
    edges = np.linspace(lo, hi, bins + 1)
    emp = np.histogram(interior, bins=edges)[0] / n_paths
    ana = _binned_mass(measure.density, edges)
    l1 = float(np.abs(emp - ana).sum())

    death_target = max(0.0, 1.0 - measure.total_mass())
    death_est = 1.0 - float(np.mean(alive))
    se = lambda p: math.sqrt(max(p * (1.0 - p), 1e-12) / n_paths)
    return MeasureDistance(
        l1=l1,
        atom_estimate=atom_est,
        atom_target=float(atom_target),
        atom_stderr=se(min(atom_target, 1.0)),
        death_estimate=death_est,
        death_target=float(death_target),
        death_stderr=se(death_target),
        n=n_paths,
    )


def _apply_measure(measure: kernels.BoundaryMeasure, f: Callable, split: float) -> float:
    """integral of f against the measure (density + atoms)."""
    a, _ = quad(lambda y: float(measure.density(y)) * float(f(y)), 0.0, split,
                epsabs=1e-13, limit=300)
    b, _ = quad(lambda y: float(measure.density(y)) * float(f(y)), split, np.inf,
                epsabs=1e-13, limit=300)
    return a + b + sum(w * float(f(pos)) for pos, w in measure.atoms.items())


def boundary_residual_numeric(
    model: BoundaryModel, lam: float, f: Callable, h: float = 1e-4
) -> float:
    """Wentzell-form residual of the analytic resolvent at the origin.

    R_lam f is evaluated at 0, h, 2h, 3h by quadrature against
    ``resolvent_measure`` and differentiated with second-order one-sided
    stencils; a correct kernel gives a residual of order h (dominated in
    practice by quadrature noise / h^2).
    """
    rs = [
        _apply_measure(kernels.resolvent_measure(model, lam, xi), f, split=max(2.0, 4 * h))
        for xi in (0.0, h, 2 * h, 3 * h)
    ]
    r0, r1, r2, r3 = rs
    d1 = (-3 * r0 + 4 * r1 - r2) / (2 * h)
    d2 = (2 * r0 - 5 * r1 + 4 * r2 - r3) / (h * h)
    from .model import wentzell_residual

    return wentzell_residual(model, r0, d1, d2)


def first_passage_check(model: BoundaryModel, lam: float, x: float) -> float:
    """sup over probe points of the first-passage decomposition residual
    r(x, y) = r^D(x, y) + e(x) r(0, y), including the boundary atoms."""
    probes = (0.2, 0.7, 1.3, 2.1, 3.4)
    ex = math.exp(-math.sqrt(2.0 * lam) * x)
    mx = kernels.resolvent_measure(model, lam, x)
    m0 = kernels.resolvent_measure(model, lam, 0.0)
    worst = 0.0
    for y in probes:
        lhs = float(mx.density(y))
        rhs = kernels.r_dirichlet(lam, x, y) + ex * float(m0.density(y))
        worst = max(worst, abs(lhs - rhs))
    worst = max(worst, abs(mx.atoms.get(0.0, 0.0) - ex * m0.atoms.get(0.0, 0.0)))
    return worst


# ---------------------------------------------------------------------------
# suite configuration and check registry


@dataclass(frozen=True)
class SuiteConfig:
    suite: str = "acceptance"
    n_paths: int = DESK_PATHS
    dt: float = DESK_DT
    master_seed: int = DEFAULT_SEED


def _check_seed(master_seed: int, index: int) -> int:
    ss = np.random.SeedSequence(int(master_seed), spawn_key=(1000 + index,))
    return int(ss.generate_state(1, np.uint64)[0])


def _ones(x: np.ndarray) -> np.ndarray:
    return np.ones_like(np.asarray(x, dtype=float))


def _bump(y):
    return np.exp(-8.0 * (np.asarray(y, dtype=float) - 1.0) ** 2)


# -- Monte Carlo check groups ------------------------------------------------


def _chk_survival_race(cfg: SuiteConfig, seed: int) -> list[CheckResult]:
    # race between the hit of level 1 and elastic killing at rate 1
    res = mc.hit_local_time_ensemble(seed, cfg.n_paths, cfg.dt, 1.0, 30.0)
    gen = generator(seed, 999)
    s = gen.exponential(1.0, cfg.n_paths)
    won = res["hit"] & (res["l_at_hit"] < s)
    p = float(np.mean(won))
    se = math.sqrt(0.25 / cfg.n_paths)
    return [_row("survival_race.level1", 0.5, p, 3 * se, "3se")]


def _chk_local_time_at_hit(cfg: SuiteConfig, seed: int) -> list[CheckResult]:
    res = mc.hit_local_time_ensemble(seed, cfg.n_paths, cfg.dt, 1.0, 60.0)
    lvals = res["l_at_hit"][res["hit"]]
    ks = float(stats.kstest(lvals, lambda v: 1.0 - np.exp(-v)).statistic)
    return [
        _row("local_time_at_hit.mean", 1.0, float(lvals.mean()), 0.02, "abs"),
        _row("local_time_at_hit.ks", 0.0, ks, 0.01, "abs"),
    ]


def _chk_inverse_local_time(cfg: SuiteConfig, seed: int) -> list[CheckResult]:
    res = mc.local_time_crossing_ensemble(seed, cfg.n_paths, cfg.dt, 20.0, level=1.0)
    vals = np.where(res["crossed"], np.exp(-0.5 * np.where(np.isnan(res["time"]), np.inf, res["time"])), 0.0)
    est = MCEstimate.from_samples(vals, seed)
    return [_row("inverse_local_time.transform", math.exp(-1.0), est.mean, 3 * est.stderr, "3se")]


def _chk_sticky_exit(cfg: SuiteConfig, seed: int) -> list[CheckResult]:
    gamma, eps = 0.3, 0.1
    res = mc.hit_local_time_ensemble(seed, cfg.n_paths, cfg.dt, eps, 5.0)
    outer = res["time"] + gamma * res["l_at_hit"]
    target = eps * eps + gamma * eps
    ex = mc.interval_exit_ensemble(
        seed + 1, cfg.n_paths, cfg.dt, 0.5, lo=0.4, hi=0.6, t_max=5.0
    )
    return [
        _row("sticky_exit.outer_mean", target, float(outer.mean()), 0.03 * target, "rel"),
        _row("sticky_exit.interior_free", eps * eps, float(ex["time"].mean()), 0.03 * eps * eps, "rel"),
    ]


def _chk_lifetime_transforms(cfg: SuiteConfig, seed: int) -> list[CheckResult]:
    rows = []
    # elastic beta=1, lam=0.5: E e^{-lam zeta} = beta/(beta+sqrt(2 lam))
    res = mc.local_time_crossing_ensemble(seed, cfg.n_paths, cfg.dt, 30.0, exp_rate=1.0)
    z = np.where(res["crossed"], np.where(np.isnan(res["time"]), np.inf, res["time"]), np.inf)
    est = MCEstimate.from_samples(np.exp(-0.5 * z), seed)
    rows.append(_row("lifetime_transform.elastic", laws.zeta_lt(1.0, 0.0, 0.5), est.mean, 3 * est.stderr, "3se"))
    # general (1,1), lam=2: zeta = K_S + gamma S pathwise
    res2 = mc.local_time_crossing_ensemble(seed + 1, cfg.n_paths, cfg.dt, 12.0, exp_rate=1.0)
    z2 = np.where(res2["crossed"], np.where(np.isnan(res2["time"]), np.inf, res2["time"]), np.inf)
    zg = z2 + 1.0 * res2["s"]
    est2 = MCEstimate.from_samples(np.exp(-2.0 * zg), seed + 1)
    rows.append(_row("lifetime_transform.general", laws.zeta_lt(1.0, 1.0, 2.0), est2.mean, 3 * est2.stderr, "3se"))
    return rows


_MARGINAL_MODELS: dict[str, Callable[[], BoundaryModel]] = {
    "reflecting": BoundaryModel.reflecting,
    "elastic": lambda: BoundaryModel.elastic(1.0),
    "sticky": lambda: BoundaryModel.sticky(1.0),
    "general": lambda: BoundaryModel.general(1.0, 1.0),
    "absorbing": BoundaryModel.absorbing,
    "trap_kill": lambda: BoundaryModel.trap_kill(1.0),
}


def _marginal_rows(name: str, cfg: SuiteConfig, seed: int) -> list[CheckResult]:
    model = _MARGINAL_MODELS[name]()
    starts = (0.5,) if model.mode in (Mode.ABSORBING, Mode.TRAP_KILL) else (0.0, 0.5)
    rows = []
    for i, x in enumerate(starts):
        d = empirical_measure_distance(model, 1.0, x, cfg.n_paths, cfg.dt, seed + i)
        tag = f"marginal.{name}.x{x:g}"
        rows.append(_row(f"{tag}.l1", 0.0, d.l1, 0.05, "abs"))
        if model.mode in (Mode.STICKY, Mode.GENERAL, Mode.ABSORBING, Mode.TRAP_KILL):
            rows.append(_row(f"{tag}.atom", d.atom_target, d.atom_estimate, 3 * d.atom_stderr, "3se"))
        if model.mode in (Mode.ELASTIC, Mode.GENERAL, Mode.TRAP_KILL):
            rows.append(_row(f"{tag}.death", d.death_target, d.death_estimate, 3 * d.death_stderr, "3se"))
    return rows


def _chk_lt_potential(cfg: SuiteConfig, seed: int) -> list[CheckResult]:
    samples = mc.lt_potential_ensemble(seed, cfg.n_paths, cfg.dt, 2.0, 1.0, outer_max=8.0)
    est = MCEstimate.from_samples(samples, seed)
    target = laws.ls_alpha_potential(2.0, 1.0, 0.0)
    return [_row("lt_potential.sticky", target, est.mean, 3 * est.stderr, "3se")]


# -- interval check groups ---------------------------------------------------


def _chk_interval_resolvent(cfg: SuiteConfig, seed: int) -> list[CheckResult]:
    el, refl = BoundaryModel.elastic(1.0), BoundaryModel.reflecting()
    target = kernels.interval_resolvent(el, refl, 1.0, _ones, 0.0)
    samples = mc.interval_resolvent_f1_ensemble(seed, cfg.n_paths, cfg.dt, 1.0, 1.0, 0.0)
    return [_row("interval.resolvent_mc", target, float(samples.mean()), 0.02 * target, "rel")]


def _chk_gamblers_ruin(cfg: SuiteConfig, seed: int) -> list[CheckResult]:
    ex = mc.interval_exit_ensemble(seed, cfg.n_paths, cfg.dt, 0.5)
    p = float(np.mean(ex["side"] == 1))
    se = math.sqrt(0.25 / cfg.n_paths)
    return [_row("interval.gamblers_ruin", 0.5, p, 3 * se, "3se")]


def _interval_neumann_density(s: float, x: float, y: np.ndarray) -> np.ndarray:
    """Transition density of doubly-reflecting BM on [0,1] (cosine series)."""
    out = np.ones_like(np.asarray(y, dtype=float))
    for k in range(1, 40):
        decay = math.exp(-0.5 * (k * math.pi) ** 2 * s)
        if decay < 1e-16:
            break
        out = out + 2.0 * decay * math.cos(k * math.pi * x) * np.cos(k * math.pi * y)
    return out


def _chk_markov_proxy(cfg: SuiteConfig, seed: int) -> list[CheckResult]:
    """Sample (X_t, X_{t+s}); conditionally on X_t in the central bin the
    law of X_{t+s} must match the one-step kernel (bin-averaged)."""
    t, s, x0, nbins = 0.5, 0.25, 0.25, 20
    xt, xts = mc.interval_fold_pair(seed, cfg.n_paths, x0, t, s)
    edges = np.linspace(0.0, 1.0, nbins + 1)
    a, b = edges[9], edges[10]  # central conditioning bin
    sel = (xt >= a) & (xt < b)
    emp = np.histogram(xts[sel], bins=edges)[0] / max(int(sel.sum()), 1)
    xs = np.linspace(a, b, 9)
    ana = np.zeros(nbins)
    for j in range(nbins):
        yy = np.linspace(edges[j], edges[j + 1], 9)
        vals = np.array([np.trapezoid(_interval_neumann_density(s, xi, yy), yy) for xi in xs])
        ana[j] = float(np.trapezoid(vals, xs) / (b - a))
    tv = 0.5 * float(np.abs(emp - ana).sum())
    return [_row("interval.markov_proxy", 0.0, tv, 0.05, "abs")]


# -- analytic check groups ---------------------------------------------------


def _chk_laplace_consistency(cfg: SuiteConfig, seed: int) -> list[CheckResult]:
    """r(x, y) = int_0^inf e^{-lam t} p_t(x, y) dt, density and atom parts."""
    rows = []
    lam, x, y = 1.0, 0.4, 0.9
    for name, model in (
        ("elastic", BoundaryModel.elastic(1.0)),
        ("sticky", BoundaryModel.sticky(1.0)),
        ("general", BoundaryModel.general(1.0, 1.0)),
    ):
        rm = kernels.resolvent_measure(model, lam, x)
        target = float(rm.density(y))

        def integrand(t: float) -> float:
            return math.exp(-lam * t) * float(kernels.transition_measure(model, t, x).density(y))

        val = quad(integrand, 0.0, 8.0, points=[0.05, 0.5, 2.0], limit=300, epsabs=1e-11)[0]
        val += quad(integrand, 8.0, 60.0, limit=200, epsabs=1e-11)[0]
        rows.append(_row(f"laplace.{name}", 0.0, abs(val - target) / abs(target), 1e-6, "rel"))
    return rows


def _chk_chapman_kolmogorov(cfg: SuiteConfig, seed: int) -> list[CheckResult]:
    rows = []
    for name, (t, s, x, y) in (
        ("interior", (0.3, 0.7, 0.4, 1.1)),
        ("boundary", (0.5, 0.5, 0.0, 0.8)),
    ):
        target = kernels.p_neumann(t + s, x, y)
        val = quad(
            lambda z: kernels.p_neumann(t, x, z) * kernels.p_neumann(s, z, y),
            0.0, np.inf, limit=300, epsabs=1e-12,
        )[0]
        rows.append(_row(f"chapman_kolmogorov.{name}", 0.0, abs(val - target), 1e-8, "abs"))
    return rows


def _chk_boundary_residuals(cfg: SuiteConfig, seed: int) -> list[CheckResult]:
    rows = []
    for name, model in (
        ("reflecting", BoundaryModel.reflecting()),
        ("elastic", BoundaryModel.elastic(1.0)),
        ("sticky", BoundaryModel.sticky(1.0)),
        ("general", BoundaryModel.general(1.0, 1.0)),
    ):
        res = boundary_residual_numeric(model, 1.0, _bump, h=1e-4)
        rows.append(_row(f"boundary_residual.{name}", 0.0, abs(res), 1e-3, "abs"))
    return rows


def _chk_first_passage(cfg: SuiteConfig, seed: int) -> list[CheckResult]:
    return [
        _row("first_passage.sticky", 0.0, first_passage_check(BoundaryModel.sticky(1.0), 1.0, 0.5), 1e-12, "abs"),
        _row("first_passage.elastic", 0.0, first_passage_check(BoundaryModel.elastic(1.0), 1.0, 0.5), 1e-12, "abs"),
        _row("first_passage.at_zero", 0.0, first_passage_check(BoundaryModel.general(1.0, 1.0), 1.0, 0.0), 1e-12, "abs"),
    ]


def _chk_resolvent_forms(cfg: SuiteConfig, seed: int) -> list[CheckResult]:
    worst = 0.0
    for lam in (0.5, 1.0, 2.0):
        for x in (0.0, 0.3, 1.2):
            for y in (0.1, 0.8, 2.0):
                a = kernels.elastic_resolvent_alt(1.0, lam, x, y)
                m = kernels.resolvent_measure(BoundaryModel.elastic(1.0), lam, x)
                worst = max(worst, abs(a - float(m.density(y))))
    return [_row("resolvent_forms.elastic", 0.0, worst, 1e-13, "abs")]


def _chk_g_limits(cfg: SuiteConfig, seed: int) -> list[CheckResult]:
    rows = []
    probes = [
        ("gamma", (1.0, 1e-6), (1.0, 0.0)),
        ("beta", (1e-6, 1.0), (0.0, 1.0)),
    ]
    for name, (b, g), (b0, g0) in probes:
        worst = 0.0
        for t, x in ((1.0, 0.5), (0.7, 0.0), (0.3, 1.5)):
            lim = kernels.g_family(b0, g0, t, x)
            val = kernels.g_family(b, g, t, x)
            worst = max(worst, abs(val - lim) / abs(lim))
        rows.append(_row(f"g_limits.{name}", 0.0, worst, 1e-4, "rel"))
    return rows


# -- property check groups ---------------------------------------------------


def _chk_determinism(cfg: SuiteConfig, seed: int) -> list[CheckResult]:
    grid = TimeGrid(1.0, 2000)
    a = build_process(BoundaryModel.general(1.0, 1.0), 0.0, grid, seed)
    b = build_process(BoundaryModel.general(1.0, 1.0), 0.0, grid, seed)
    same = (
        np.array_equal(a.path.values, b.path.values)
        and np.array_equal(a.local_time, b.local_time)
        and a.path.lifetime == b.path.lifetime
    )
    ens1 = mc.hit_local_time_ensemble(seed, 2000, 1e-3, 1.0, 20.0)
    ens2 = mc.hit_local_time_ensemble(seed, 2000, 1e-3, 1.0, 20.0)
    same = same and np.array_equal(ens1["time"], ens2["time"])
    return [_row("property.determinism", 1.0, float(same), 0.0, "abs")]


def _chk_local_time_shape(cfg: SuiteConfig, seed: int) -> list[CheckResult]:
    grid = TimeGrid(1.0, 5000)
    ok = True
    for k in range(10):
        aug = build_process(BoundaryModel.reflecting(), 0.3, grid, seed + k)
        dl = np.diff(aug.local_time)
        ok = ok and bool(np.all(dl >= 0.0))
        grew = dl > 0.0
        ok = ok and bool(np.all(aug.path.values[1:][grew] <= grid.eps_flat()))
    return [_row("property.local_time_shape", 1.0, float(ok), 0.0, "abs")]


def _chk_time_change(cfg: SuiteConfig, seed: int) -> list[CheckResult]:
    grid = TimeGrid(1.0, 5000)
    ok = True
    for k in range(10):
        aug = build_process(BoundaryModel.sticky(1.0), 0.0, grid, seed + k)
        ok = ok and bool(np.all(np.diff(aug.time_change) > 0.0))
    return [_row("property.time_change", 1.0, float(ok), 0.0, "abs")]


def _chk_kill_ordering(cfg: SuiteConfig, seed: int) -> list[CheckResult]:
    grid = TimeGrid(4.0, 8000)
    ok = True
    for k in range(20):
        z1 = build_process(BoundaryModel.elastic(1.0), 0.0, grid, seed + k).path.lifetime
        z2 = build_process(BoundaryModel.elastic(2.0), 0.0, grid, seed + k).path.lifetime
        lo = math.inf if z2 is None else z2
        hi = math.inf if z1 is None else z1
        ok = ok and lo <= hi
    return [_row("property.kill_ordering", 1.0, float(ok), 0.0, "abs")]


def _chk_mass_balance(cfg: SuiteConfig, seed: int) -> list[CheckResult]:
    rows = []
    worst = 0.0
    for model in (BoundaryModel.reflecting(), BoundaryModel.sticky(1.0), BoundaryModel.absorbing()):
        for x in (0.0, 0.7):
            worst = max(worst, abs(kernels.transition_measure(model, 1.0, x).total_mass() - 1.0))
    rows.append(_row("property.mass_balance.conservative", 0.0, worst, 1e-8, "abs"))
    # elastic survival from 0 equals the local-time-law transform
    beta, t = 1.0, 1.0
    survival = kernels.transition_measure(BoundaryModel.elastic(beta), t, 0.0).total_mass()
    target = laws.local_time_law(t).laplace_transform(beta)
    rows.append(_row("property.mass_balance.elastic", target, survival, 1e-8, "abs"))
    bounded = all(
        kernels.transition_measure(m, 1.0, 0.5).total_mass() <= 1.0 + 1e-10
        for m in (BoundaryModel.general(1.0, 1.0), BoundaryModel.trap_kill(1.0))
    )
    rows.append(_row("property.mass_balance.bounded", 1.0, float(bounded), 0.0, "abs"))
    return rows


# ---------------------------------------------------------------------------
# registry / runner

_ANALYTIC_GROUPS: list[tuple[str, Callable]] = [
    ("laplace_consistency", _chk_laplace_consistency),
    ("chapman_kolmogorov", _chk_chapman_kolmogorov),
    ("boundary_residuals", _chk_boundary_residuals),
    ("first_passage", _chk_first_passage),
    ("resolvent_forms", _chk_resolvent_forms),
    ("g_limits", _chk_g_limits),
    ("determinism", _chk_determinism),
    ("local_time_shape", _chk_local_time_shape),
    ("time_change", _chk_time_change),
    ("kill_ordering", _chk_kill_ordering),
    ("mass_balance", _chk_mass_balance),
]

_MC_GROUPS: list[tuple[str, Callable]] = [
    ("survival_race", _chk_survival_race),
    ("local_time_at_hit", _chk_local_time_at_hit),
    ("inverse_local_time", _chk_inverse_local_time),
    ("sticky_exit", _chk_sticky_exit),
    ("lifetime_transforms", _chk_lifetime_transforms),
    ("marginal_reflecting", lambda cfg, s: _marginal_rows("reflecting", cfg, s)),
    ("marginal_elastic", lambda cfg, s: _marginal_rows("elastic", cfg, s)),
    ("marginal_sticky", lambda cfg, s: _marginal_rows("sticky", cfg, s)),
    ("marginal_general", lambda cfg, s: _marginal_rows("general", cfg, s)),
    ("marginal_absorbing", lambda cfg, s: _marginal_rows("absorbing", cfg, s)),
    ("marginal_trap_kill", lambda cfg, s: _marginal_rows("trap_kill", cfg, s)),
    ("lt_potential", _chk_lt_potential),
    ("interval_resolvent", _chk_interval_resolvent),
    ("gamblers_ruin", _chk_gamblers_ruin),
    ("markov_proxy", _chk_markov_proxy),
]

SUITES: dict[str, list[tuple[str, Callable]]] = {
    "analytic": _ANALYTIC_GROUPS,
    "acceptance": _ANALYTIC_GROUPS + _MC_GROUPS,
}

# Acceptance-criterion index -> report row names (used by the test gate).
CRITERIA: dict[int, tuple[str, ...]] = {
    1: ("survival_race.level1",),
    2: ("local_time_at_hit.mean", "local_time_at_hit.ks"),
    3: ("inverse_local_time.transform",),
    4: ("sticky_exit.outer_mean", "sticky_exit.interior_free"),
    5: ("lifetime_transform.elastic", "lifetime_transform.general"),
    6: (
        "marginal.reflecting.x0.l1", "marginal.reflecting.x0.5.l1",
        "marginal.elastic.x0.l1", "marginal.elastic.x0.death",
        "marginal.elastic.x0.5.l1", "marginal.elastic.x0.5.death",
        "marginal.sticky.x0.l1", "marginal.sticky.x0.atom",
        "marginal.sticky.x0.5.l1", "marginal.sticky.x0.5.atom",
        "marginal.general.x0.l1", "marginal.general.x0.atom", "marginal.general.x0.death",
        "marginal.general.x0.5.l1", "marginal.general.x0.5.atom", "marginal.general.x0.5.death",
    ),
    7: ("lt_potential.sticky",),
    8: (
        "laplace.elastic", "laplace.sticky", "laplace.general",
        "chapman_kolmogorov.interior", "chapman_kolmogorov.boundary",
        "boundary_residual.reflecting", "boundary_residual.elastic",
        "boundary_residual.sticky", "boundary_residual.general",
        "first_passage.sticky", "first_passage.elastic", "first_passage.at_zero",
        "resolvent_forms.elastic", "g_limits.beta", "g_limits.gamma",
    ),
    9: ("interval.resolvent_mc", "interval.gamblers_ruin", "interval.markov_proxy"),
    10: (
        "property.determinism", "property.local_time_shape", "property.time_change",
        "property.kill_ordering", "property.mass_balance.conservative",
        "property.mass_balance.elastic", "property.mass_balance.bounded",
    ),
}


def run_suite(config: Optional[SuiteConfig] = None, **overrides) -> ValidationReport:
    """Run a named suite of checks into a deterministic report.

    A failing or raising check never aborts the suite; an exception is
    recorded as a failed row with NaN estimate.  Rows are sorted by name;
    reruns with the same configuration produce a byte-identical body.
    """
    cfg = config or SuiteConfig()
    if overrides:
        cfg = dataclasses.replace(cfg, **overrides)
    try:
        groups = SUITES[cfg.suite]
    except KeyError:
        raise ValueError(f"unknown suite {cfg.suite!r}; known: {sorted(SUITES)}") from None
    report = ValidationReport(cfg.master_seed, cfg.suite, cfg.n_paths, cfg.dt)
    for i, (gname, fn) in enumerate(sorted(groups, key=lambda g: g[0])):
        t0 = time.perf_counter()
        try:
            rows = fn(cfg, _check_seed(cfg.master_seed, i))
        except Exception:
            rows = [CheckResult(f"{gname}.error", 0.0, math.nan, 0.0, "abs", False)]
        took = time.perf_counter() - t0
        report.checks.extend(dataclasses.replace(r, runtime=took) for r in rows)
    report.checks.sort(key=lambda c: c.name)
    return report
