"""Single-path construction of Brownian motions on [0, infinity).

Everything is built from one driving Brownian motion by deterministic
surgery plus at most one extra exponential clock:

* reflection via the running-maximum (Levy) construction, which yields the
  boundary local time for free: if W is a standard BM and M its running
  maximum, then (M - W, M) has the same law as (|B|, L) where L is the
  local time of |B| at 0, normalised so that L_t ~ |N(0, t)|;
* sticky slowdown via the inverse of the additive clock t + gamma * L_t;
* elastic / general killing at rate beta against a positive continuous
  additive functional A (here A = L), i.e. at the first time A exceeds an
  independent Exp(1)/beta level;
* trap-and-kill as the stopped motion held at 0 for an independent
  Exp(beta) holding time and then sent to the cemetery.

Paths are piecewise linear records on a uniform grid.  Death is encoded in
``SamplePath.lifetime``, never as a sentinel inside the value array; value
queries strictly after the lifetime return ``None`` (the cemetery).
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence, TextIO

import numpy as np

from .errors import (
    BadEps,
    NegativeStart,
    NotAdditiveFunctional,
    StartOutOfRange,
)
from .model import BoundaryModel, Mode
from . import rng as _rng


@dataclass(frozen=True)
class TimeGrid:
    """Uniform grid 0 = t_0 < t_1 < ... < t_n = t_max with step dt = t_max/n."""

    t_max: float
    n_steps: int

    def __post_init__(self):
        if not (self.t_max > 0):
            raise ValueError(f"t_max must be positive, got {self.t_max}")
        if self.n_steps < 1:
            raise ValueError(f"n_steps must be >= 1, got {self.n_steps}")

    @property
    def dt(self) -> float:
        return self.t_max / self.n_steps

    def times(self) -> np.ndarray:
        return np.linspace(0.0, self.t_max, self.n_steps + 1)

    def eps_flat(self) -> float:
        """Classification width for 'path is at the boundary' queries.

        A grid record of a diffusion sitting at 0 wanders O(sqrt(dt)) between
        records, so membership in the boundary atom is tested against a
        collar of width 2*sqrt(dt).
        """
        return 2.0 * np.sqrt(self.dt)


@dataclass
class SamplePath:
    """Piecewise-linear path record; ``lifetime`` is the death time if any."""

    grid: TimeGrid
    values: np.ndarray
    start: float
    lifetime: Optional[float] = None

    def at(self, t: float) -> Optional[float]:
        """Value at time t by linear interpolation; None once dead."""
        if t < 0 or t > self.grid.t_max:
            raise ValueError(f"time {t} outside [0, {self.grid.t_max}]")
        if self.lifetime is not None and t > self.lifetime:
            return None
        return float(np.interp(t, self.grid.times(), self.values))

    def alive_mask(self) -> np.ndarray:
        """Boolean mask over grid knots: alive at t_i (t_i <= lifetime)."""
        if self.lifetime is None:
            return np.ones(self.grid.n_steps + 1, dtype=bool)
        return self.grid.times() <= self.lifetime


@dataclass
class AugmentedPath:
    """A path together with its driving noise and boundary local time.

    ``driving`` is the raw Brownian motion the path was carved from,
    ``local_time`` the (nondecreasing, continuous) local time at 0, and
    ``time_change`` the inner clock tau(t) when a sticky slowdown was
    applied (tau(t) = t otherwise / when absent).
    """

    path: SamplePath
    driving: np.ndarray
    local_time: np.ndarray
    time_change: Optional[np.ndarray] = None


def sample_bm(start: float, grid: TimeGrid, seed: int) -> SamplePath:
    """Standard Brownian motion from ``start`` on the grid.

    Uses the DRIVING sub-stream of ``seed``; other operations on the same
    seed (kill clock, bridge maxima) never touch this stream.
    """
    gen = _rng.generator(seed, _rng.DRIVING)
    dw = gen.standard_normal(grid.n_steps) * np.sqrt(grid.dt)
    values = np.empty(grid.n_steps + 1)
    values[0] = start
    np.cumsum(dw, out=values[1:])
    values[1:] += start
    return SamplePath(grid=grid, values=values, start=float(start))


def _bridge_step_maxima(w: np.ndarray, dt: float, gen: np.random.Generator) -> np.ndarray:
    """Per-step maxima of a BM recorded at knots ``w``, sampled exactly.

    Conditionally on endpoints (a, b), the maximum of a Brownian bridge over
    one step has inverse CDF  m = (a + b + sqrt((b-a)^2 - 2 dt ln U)) / 2.
    """
    a, b = w[:-1], w[1:]
    u = gen.random(a.size)
    u = np.maximum(u, 5e-324)
    return 0.5 * (a + b + np.sqrt((b - a) ** 2 - 2.0 * dt * np.log(u)))


def reflect_with_local_time(
    start: float, grid: TimeGrid, seed: int, *, bridge: bool = False
) -> AugmentedPath:
    """Reflecting BM on [0, inf) with its boundary local time.

    From ``start`` the raw motion runs freely (the path is the raw motion,
    local time 0) until the first grid crossing of 0; from that knot on the
    path is M - W and the local time is M for a fresh running maximum M of
    the post-crossing increments.  Started at 0 this is the pure Levy
    construction.  With ``bridge=True`` the running maximum is built from
    exactly-sampled within-step bridge maxima, removing the O(sqrt(dt))
    downward bias of the knot-only maximum (the law at the knots is then
    exact up to the piecewise-linear record of W itself).
    """
    if start < 0:
        raise NegativeStart(f"reflecting start must be >= 0, got {start}")
    raw = sample_bm(start, grid, seed)
    w = raw.values
    n = grid.n_steps

    below = np.nonzero(w <= 0.0)[0]
    i0 = int(below[0]) if below.size else n + 1

    values = np.empty(n + 1)
    local = np.zeros(n + 1)
    if i0 > n:
        # never reached the boundary inside the window
        values[:] = w
    else:
        values[:i0] = w[:i0]
        seg = w[i0:] - w[i0]  # fresh driving segment from the crossing knot
        if bridge and seg.size > 1:
            gen = _rng.generator(seed, _rng.BRIDGE)
            step_max = _bridge_step_maxima(seg, grid.dt, gen)
            m = np.empty(seg.size)
            m[0] = 0.0
            np.maximum.accumulate(step_max, out=m[1:])
            np.maximum(m, 0.0, out=m)
        else:
            m = np.maximum.accumulate(np.maximum(seg, 0.0))
        values[i0:] = m - seg
        local[i0:] = m

    path = SamplePath(grid=grid, values=values, start=float(start))
    return AugmentedPath(path=path, driving=w, local_time=local)


def local_time_downcrossing(aug: AugmentedPath, eps: float) -> np.ndarray:
    """Downcrossing estimate of the local time at 0: eps * D_t(eps).

    D_t(eps) counts excursions that rise to >= eps and then return to 0 by
    time t.  Under the L_t ~ |N(0,t)| normalisation, eps * D converges to L
    as eps -> 0.  The per-path conditional spread of eps*D around L is
    O(sqrt(eps * L)), so agreement with the Levy local time should be read
    in the mean across paths at fixed eps.
    """
    if not (eps > 0):
        raise BadEps(f"eps must be positive, got {eps}")
    v = aug.path.values
    state = np.zeros(v.size, dtype=np.int8)
    state[v >= eps] = 1
    state[v <= 0.0] = -1
    idx = np.nonzero(state)[0]
    counts = np.zeros(v.size)
    if idx.size >= 2:
        st = state[idx]
        hits = idx[1:][(st[1:] == -1) & (st[:-1] == 1)]
        counts[hits] = 1.0
    return eps * np.cumsum(counts)


def sticky_time_change(aug: AugmentedPath, gamma: float) -> AugmentedPath:
    """Slow the clock at the boundary: X_t = Y_{tau(t)} with tau the inverse
    of u |-> u + gamma * L_u.

    The output carries the time-changed local time L_{tau(t)} and the clock
    tau itself.  gamma = 0 is the identity (returned pointwise equal).
    """
    if gamma < 0:
        raise ValueError(f"gamma must be >= 0, got {gamma}")
    grid = aug.path.grid
    t = grid.times()
    if gamma == 0.0:
        return AugmentedPath(
            path=replace(aug.path, values=aug.path.values.copy()),
            driving=aug.driving,
            local_time=aug.local_time.copy(),
            time_change=t.copy(),
        )
    # inverse clock: at inner time u the outer time is u + gamma * L_u
    outer = t + gamma * aug.local_time
    tau = np.interp(t, outer, t)  # piecewise-linear inversion on the knots
    values = np.interp(tau, t, aug.path.values)
    local = np.interp(tau, t, aug.local_time)
    path = SamplePath(grid=grid, values=values, start=aug.path.start)
    return AugmentedPath(path=path, driving=aug.driving, local_time=local, time_change=tau)


def pchaf_kill(
    path: SamplePath, functional: np.ndarray, beta: float, seed: int
) -> SamplePath:
    """Kill ``path`` at rate ``beta`` against the additive functional A.

    The death time is zeta = inf{t : A_t > S} with S = Exp(1)/beta drawn
    from the KILL sub-stream of ``seed`` (so the driving noise replays
    unchanged when beta varies).  A must start at 0 and be nondecreasing.
    zeta is located by linear interpolation of A between knots; if A never
    exceeds S inside the window the path is returned undying.
    """
    if beta <= 0:
        raise ValueError(f"beta must be positive, got {beta}")
    a = np.asarray(functional, dtype=float)
    if a.shape != path.values.shape:
        raise NotAdditiveFunctional(
            f"functional has shape {a.shape}, path has {path.values.shape}"
        )
    if a[0] != 0.0 or np.any(np.diff(a) < 0):
        raise NotAdditiveFunctional("functional must start at 0 and be nondecreasing")
    gen = _rng.generator(seed, _rng.KILL)
    s = _rng.exponential_from_uniform(gen.random(), beta)
    over = np.nonzero(a > s)[0]
    if over.size == 0:
        return replace(path, lifetime=None)
    i = int(over[0])  # a[i] > s >= a[i-1], i >= 1 since a[0] = 0 < s
    t = path.grid.times()
    zeta = t[i - 1] + (t[i] - t[i - 1]) * (s - a[i - 1]) / (a[i] - a[i - 1])
    return replace(path, lifetime=float(zeta))


def hitting_time(path: SamplePath, level: float) -> Optional[float]:
    """First time the piecewise-linear record reaches ``level``; None if never
    (within the window and lifetime)."""
    v = path.values
    t = path.grid.times()
    d = v - level
    cands = []
    exact = np.nonzero(d == 0.0)[0]
    if exact.size:
        cands.append(t[exact[0]])
    cross = np.nonzero(d[:-1] * d[1:] < 0.0)[0]
    if cross.size:
        i = int(cross[0])
        cands.append(t[i] + (t[i + 1] - t[i]) * d[i] / (d[i] - d[i + 1]))
    if not cands:
        return None
    hit = min(cands)
    if path.lifetime is not None and hit > path.lifetime:
        return None
    return float(hit)


def build_process(
    model: BoundaryModel,
    start: float,
    grid: TimeGrid,
    seed: int,
    *,
    bridge: bool = False,
) -> AugmentedPath:
    """Construct one sample path of the boundary model from ``start``.

    Single driving BM per path; kill clock and bridge maxima live on their
    own sub-streams of ``seed``.  Order of surgery for the general case:
    reflect, then sticky time change, then kill against the slowed local
    time (equivalently zeta = zeta_elastic + gamma * S pathwise).
    """
    if not np.isfinite(start) or start < 0:
        raise StartOutOfRange(f"start must lie in [0, inf), got {start}")
    mode = model.mode

    if mode is Mode.REFLECTING:
        return reflect_with_local_time(start, grid, seed, bridge=bridge)

    if mode is Mode.ABSORBING:
        return _stopped_at_zero(start, grid, seed)

    if mode is Mode.ELASTIC:
        aug = reflect_with_local_time(start, grid, seed, bridge=bridge)
        killed = pchaf_kill(aug.path, aug.local_time, model.beta, seed)
        return AugmentedPath(
            path=killed, driving=aug.driving, local_time=aug.local_time
        )

    if mode is Mode.STICKY:
        aug = reflect_with_local_time(start, grid, seed, bridge=bridge)
        return sticky_time_change(aug, model.gamma)

    if mode is Mode.GENERAL:
        aug = reflect_with_local_time(start, grid, seed, bridge=bridge)
        slowed = sticky_time_change(aug, model.gamma)
        killed = pchaf_kill(slowed.path, slowed.local_time, model.beta, seed)
        return AugmentedPath(
            path=killed,
            driving=slowed.driving,
            local_time=slowed.local_time,
            time_change=slowed.time_change,
        )

    if mode is Mode.TRAP_KILL:
        return _trap_and_kill(start, grid, seed, model.beta)

    raise ValueError(f"unsupported mode {mode}")


def _stopped_at_zero(start: float, grid: TimeGrid, seed: int) -> AugmentedPath:
    """BM from ``start`` stopped at its first visit to 0 (absorbing).

    The stopped process lives forever at the boundary: no lifetime is set
    and the local time is identically 0.
    """
    raw = sample_bm(start, grid, seed)
    w = raw.values
    below = np.nonzero(w <= 0.0)[0]
    values = w.copy()
    if below.size:
        values[below[0]:] = 0.0
    path = SamplePath(grid=grid, values=values, start=float(start))
    return AugmentedPath(path=path, driving=w, local_time=np.zeros_like(w))


def _trap_and_kill(start: float, grid: TimeGrid, seed: int, beta: float) -> AugmentedPath:
    """BM stopped at 0, held there Exp(beta), then sent to the cemetery.

    The holding clock uses the KILL sub-stream.  If the boundary is not
    reached, or the exponential outlasts the window, the path survives it.
    """
    raw = sample_bm(start, grid, seed)
    w = raw.values
    t = grid.times()
    below = np.nonzero(w <= 0.0)[0]
    values = w.copy()
    lifetime: Optional[float] = None
    if below.size:
        i0 = int(below[0])
        values[i0:] = 0.0
        if start == 0.0:
            hit = 0.0
        elif i0 == 0:
            hit = 0.0
        else:
            hit = t[i0 - 1] + (t[i0] - t[i0 - 1]) * w[i0 - 1] / (w[i0 - 1] - w[i0])
        gen = _rng.generator(seed, _rng.KILL)
        hold = _rng.exponential_from_uniform(gen.random(), beta)
        zeta = hit + hold
        if zeta <= grid.t_max:
            lifetime = float(zeta)
    path = SamplePath(grid=grid, values=values, start=float(start), lifetime=lifetime)
    return AugmentedPath(path=path, driving=w, local_time=np.zeros_like(w))


# ---------------------------------------------------------------------------
# CSV export / import


PATH_CSV_COLUMNS = ("t", "value", "local_time", "tau", "alive")


def write_path_csv(aug: AugmentedPath, out: TextIO) -> None:
    """Write columns t,value,local_time,tau,alive; floats via repr so the
    round trip is bit-exact."""
    t = aug.path.grid.times()
    tau = aug.time_change if aug.time_change is not None else t
    alive = aug.path.alive_mask()
    writer = csv.writer(out)
    writer.writerow(PATH_CSV_COLUMNS)
    for i in range(t.size):
        writer.writerow(
            (
                repr(float(t[i])),
                repr(float(aug.path.values[i])),
                repr(float(aug.local_time[i])),
                repr(float(tau[i])),
                int(alive[i]),
            )
        )


def path_csv_text(aug: AugmentedPath) -> str:
    buf = io.StringIO()
    write_path_csv(aug, buf)
    return buf.getvalue()


def read_path_csv(src: TextIO) -> dict[str, np.ndarray]:
    """Parse a path CSV back into column arrays (inverse of write_path_csv)."""
    reader = csv.reader(src)
    header = next(reader)
    if tuple(header) != PATH_CSV_COLUMNS:
        raise ValueError(f"unexpected path CSV header: {header}")
    rows = [row for row in reader if row]
    cols = {
        name: np.array([float(row[j]) for row in rows])
        for j, name in enumerate(PATH_CSV_COLUMNS)
    }
    cols["alive"] = cols["alive"].astype(int)
    return cols
