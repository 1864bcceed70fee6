"""Brownian motion on [0,1] pieced from half-line boundary processes.

The construction alternates three kinds of segments glued at their hitting
times of the endpoints:

* an Initial segment: free BM from the interior start point, ending at the
  first hit of {0, 1};
* A-copies: the model-0 half-line process started at 0, ending at its first
  hit of 1;
* B-copies: the model-1 process at the boundary 1, realized by simulating
  the half-line process at 0 and mirroring x -> 1 - x, ending at its first
  hit of 0.

Crossover times are snapped to grid knots (each segment runs on the
residual uniform grid); the linearly interpolated hitting times are kept
alongside.  If a segment dies before reaching the opposite endpoint the
pieced path dies with it and there are no further crossovers.  Each
segment draws from its own seed stream (copy index in the spawn key), so
segments are independent given their start data.
"""

from __future__ import annotations

import csv
import enum
import io
import json
from dataclasses import dataclass
from typing import Optional, TextIO

import numpy as np

from .engine import AugmentedPath, SamplePath, TimeGrid, build_process, sample_bm
from .errors import StartOutOfRange
from .model import BoundaryModel


class SegmentKind(enum.Enum):
    INITIAL = "initial"
    A_COPY = "a_copy"
    B_COPY = "b_copy"


@dataclass
class PiecingRecord:
    """A pieced interval path with its segment bookkeeping.

    ``crossovers[k]`` is the (grid-snapped) time segment k begins, so
    crossovers[0] = 0 and the list is strictly increasing; ``hit_times``
    carries the interpolated refinements of the same instants.  A path
    started at an endpoint begins directly with the matching copy segment.
    """

    crossovers: list[float]
    segment_kinds: list[SegmentKind]
    start: float
    path: SamplePath
    hit_times: list[float]


def _segment_seed(master_seed: int, k: int) -> int:
    """Independent integer seed for segment k of one pieced path."""
    ss = np.random.SeedSequence(int(master_seed), spawn_key=(int(k),))
    return int(ss.generate_state(1, np.uint64)[0])


def build_interval_path(
    start: float,
    model0: BoundaryModel,
    model1: BoundaryModel,
    grid: TimeGrid,
    seed: int,
) -> PiecingRecord:
    """Piece one interval path from ``start`` on the given grid.

    model0 governs excursions from boundary 0 (A-copies), model1 those from
    boundary 1 (B-copies).  On a grid a segment "reaches" the opposite
    endpoint at the first knot beyond it; within one step the event of
    touching both endpoints is unobservable (the continuous-time tie is a
    null event) and a knot can only land beyond one of them, breaking the
    tie toward 1 by the order of the checks below.
    """
    if not (0.0 <= start <= 1.0) or not np.isfinite(start):
        raise StartOutOfRange(f"start must lie in [0,1], got {start}")
    n = grid.n_steps
    t = grid.times()
    values = np.empty(n + 1)
    values[0] = start

    crossovers = [0.0]
    hit_times = [0.0]
    kinds: list[SegmentKind] = []
    lifetime: Optional[float] = None

    j = 0  # knot index at which the current segment begins
    k = 0  # segment counter (seed mixing)
    if start == 0.0:
        kinds.append(SegmentKind.A_COPY)
    elif start == 1.0:
        kinds.append(SegmentKind.B_COPY)
    else:
        kinds.append(SegmentKind.INITIAL)

    while j < n:
        residual = TimeGrid(t_max=(n - j) * grid.dt, n_steps=n - j)
        seg_seed = _segment_seed(seed, k)
        kind = kinds[-1]

        if kind is SegmentKind.INITIAL:
            w = sample_bm(start, residual, seg_seed).values
            hit1 = np.nonzero(w >= 1.0)[0]
            hit0 = np.nonzero(w <= 0.0)[0]
            i1 = int(hit1[0]) if hit1.size else n + 1
            i0 = int(hit0[0]) if hit0.size else n + 1
            if i1 > n and i0 > n:
                values[j:] = np.clip(w, 0.0, 1.0)
                return PiecingRecord(crossovers, kinds, start, _mk_path(grid, values, start, lifetime), hit_times)
            if i1 <= i0:  # tie toward boundary 1
                i_hit, level = i1, 1.0
            else:
                i_hit, level = i0, 0.0
            values[j : j + i_hit] = w[:i_hit]
            values[j + i_hit] = level
            hit_times.append(t[j] + _interp_hit(w, i_hit, level, residual.dt))
            j += i_hit
            crossovers.append(t[j])
            kinds.append(SegmentKind.A_COPY if level == 0.0 else SegmentKind.B_COPY)
            k += 1
            continue

        mirrored = kind is SegmentKind.B_COPY
        model = model1 if mirrored else model0
        aug = build_process(model, 0.0, residual, seg_seed)
        seg = 1.0 - aug.path.values if mirrored else aug.path.values
        target = 0.0 if mirrored else 1.0
        reach = np.nonzero(aug.path.values >= 1.0)[0]
        i_hit = int(reach[0]) if reach.size else n + 1
        zeta = aug.path.lifetime

        if zeta is not None and (i_hit > n - j or zeta <= i_hit * residual.dt):
            # the copy dies before carrying the path to the other endpoint
            die_knot = int(np.searchsorted(t[: n - j + 1], zeta, side="right"))
            values[j : j + die_knot] = seg[:die_knot]
            # hold the home-boundary value on the (dead, masked) remainder
            values[j + die_knot :] = 1.0 if mirrored else 0.0
            lifetime = t[j] + zeta
            return PiecingRecord(crossovers, kinds, start, _mk_path(grid, values, start, lifetime), hit_times)

        if i_hit > n - j:
            values[j:] = np.clip(seg, 0.0, 1.0)
            return PiecingRecord(crossovers, kinds, start, _mk_path(grid, values, start, lifetime), hit_times)

        values[j : j + i_hit] = np.clip(seg[:i_hit], 0.0, 1.0)
        values[j + i_hit] = target
        hit_times.append(t[j] + _interp_hit(aug.path.values, i_hit, 1.0, residual.dt))
        j += i_hit
        crossovers.append(t[j])
        kinds.append(SegmentKind.B_COPY if kind is SegmentKind.A_COPY else SegmentKind.A_COPY)
        k += 1

    kinds.pop()  # final crossover landed on the last knot: no segment follows
    crossovers.pop()
    hit_times.pop()
    return PiecingRecord(crossovers, kinds, start, _mk_path(grid, values, start, lifetime), hit_times)


def _mk_path(grid: TimeGrid, values: np.ndarray, start: float, lifetime) -> SamplePath:
    return SamplePath(grid=grid, values=values, start=float(start), lifetime=lifetime)


def _interp_hit(values: np.ndarray, i_hit: int, level: float, dt: float) -> float:
    """Linearly interpolated crossing time of `level` inside step i_hit-1 -> i_hit."""
    if i_hit == 0:
        return 0.0
    v0, v1 = values[i_hit - 1], values[i_hit]
    if v1 == v0:
        return i_hit * dt
    frac = (level - v0) / (v1 - v0)
    return (i_hit - 1 + min(max(frac, 0.0), 1.0)) * dt


def stopped_at_boundary(record: PiecingRecord) -> SamplePath:
    """The pieced path stopped at its first hit of {0, 1}.

    Pathwise equal to the raw BM from `start` with absorption at both ends:
    the values up to the first crossover, held constant afterwards.
    """
    path = record.path
    values = path.values.copy()
    if record.segment_kinds and record.segment_kinds[0] is not SegmentKind.INITIAL:
        values[:] = record.start  # started at an endpoint: stopped immediately
    elif len(record.crossovers) > 1:
        t = path.grid.times()
        i1 = int(np.searchsorted(t, record.crossovers[1]))
        values[i1:] = values[i1]
    return SamplePath(grid=path.grid, values=values, start=path.start)


# ---------------------------------------------------------------------------
# export


def write_record_csv(record: PiecingRecord, out: TextIO) -> None:
    """Path columns t,value,local_time,tau,alive (local time is not tracked
    at the interval level, so those columns are 0 and the identity)."""
    aug = AugmentedPath(
        path=record.path,
        driving=record.path.values,
        local_time=np.zeros_like(record.path.values),
        time_change=None,
    )
    from .engine import write_path_csv

    write_path_csv(aug, out)


def record_sidecar(record: PiecingRecord) -> dict:
    """JSON-ready sidecar: crossovers, kinds, interpolated hits, lifetime."""
    return {
        "start": record.start,
        "crossovers": [float(s) for s in record.crossovers],
        "segment_kinds": [k.value for k in record.segment_kinds],
        "hit_times": [float(s) for s in record.hit_times],
        "lifetime": None if record.path.lifetime is None else float(record.path.lifetime),
    }


def write_record_json(record: PiecingRecord, out: TextIO) -> None:
    json.dump(record_sidecar(record), out, indent=2)
    out.write("\n")
