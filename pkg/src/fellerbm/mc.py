"""Vectorized Monte Carlo ensembles for the statistical validation suite.

The single-path engine is the reference implementation; these ensembles
are its block-vectorized twins, built for 10^5-path runs.  The core is an
exact discrete Skorokhod recursion: over one block the reflected state is

    X = w + max(0, running max of (-m_k)^+),    L = L_prev + that max,

where w is the free walk restarted at the block start and m_k the exact
within-step minimum of the Brownian bridge over step k (inverse-CDF
sampled given the endpoints).  Because the running extreme of the free
path over continuous time is the running extreme of the per-step extremes,
the pair (X, L) at the knots is exact in law -- no O(sqrt(dt)) boundary
bias.  Level crossings away from the origin are detected with per-step
bridge maxima; using an independent uniform for a step's maximum after its
minimum was already consumed is an approximation whose error is
O(exp(-2 (separation)^2/dt)) per step, far below Monte Carlo resolution at
the dt used here.

Ensembles draw from one PCG64 stream per path chunk (spawn key = chunk
index), not one stream per path; chunked draws are reproducible from the
master seed but do not replay individual paths of the single-path API.
"""

from __future__ import annotations

import math
from typing import Callable, Optional

import numpy as np

from . import rng as _rng

CHUNK = 25_000
BLOCK = 256

_TINY = 1e-300


def _chunk_sizes(n: int, chunk: int) -> list[int]:
    return [min(chunk, n - i) for i in range(0, n, chunk)]


def _bridge_min(a: np.ndarray, b: np.ndarray, dt: float, u: np.ndarray) -> np.ndarray:
    return 0.5 * (a + b - np.sqrt((b - a) ** 2 - (2.0 * dt) * np.log(np.maximum(u, _TINY))))


def _bridge_max(a: np.ndarray, b: np.ndarray, dt: float, u: np.ndarray) -> np.ndarray:
    return 0.5 * (a + b + np.sqrt((b - a) ** 2 - (2.0 * dt) * np.log(np.maximum(u, _TINY))))


def _refl_block(gen: np.random.Generator, x: np.ndarray, l: np.ndarray,
                dt: float, nb: int) -> tuple[np.ndarray, np.ndarray]:
    """Advance the reflected pair (X, L) by nb steps; returns knot arrays
    of shape (paths, nb).  Exact in law (bridge-minimum local time)."""
    dw = gen.standard_normal((x.size, nb))
    dw *= math.sqrt(dt)
    w = np.cumsum(dw, axis=1)
    w += x[:, None]
    a = np.empty_like(w)
    a[:, 0] = x
    a[:, 1:] = w[:, :-1]
    m = _bridge_min(a, w, dt, gen.random((x.size, nb)))
    neg = np.maximum(-m, 0.0)
    np.maximum.accumulate(neg, axis=1, out=neg)
    return w + neg, l[:, None] + neg


def _prepend(first: np.ndarray, knots: np.ndarray) -> np.ndarray:
    """Step-start array matching a knot array."""
    out = np.empty_like(knots)
    out[:, 0] = first
    out[:, 1:] = knots[:, :-1]
    return out


def _first_true(mask: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """(row has any True, column of first True) for a 2-d boolean mask."""
    any_row = mask.any(axis=1)
    return any_row, mask.argmax(axis=1)


# ---------------------------------------------------------------------------
# half-line ensembles


def hit_local_time_ensemble(
    master_seed: int,
    n_paths: int,
    dt: float,
    level: float,
    t_max: float,
    x0: float = 0.0,
    *,
    chunk: int = CHUNK,
    block: int = BLOCK,
) -> dict[str, np.ndarray]:
    """Reflected BM from x0 run to its first hit of `level`.

    Returns hit flag, hit time (interpolated for knot crossings, step end
    for bridge-detected ones), and the local time at the hit (exact: no
    local time accrues in a crossing step).  Serves the survival race at a
    level, the law of L at the hit, and sticky exit times via
    H_outer = hit_time + gamma * L_at_hit.
    """
    zone = 8.0 * math.sqrt(dt)
    hit = np.zeros(n_paths, dtype=bool)
    time = np.full(n_paths, np.nan)
    l_at = np.full(n_paths, np.nan)

    offset = 0
    for ci, size in enumerate(_chunk_sizes(n_paths, chunk)):
        gen = _rng.generator(master_seed, ci)
        idx = np.arange(offset, offset + size)
        x = np.full(size, float(x0))
        l = np.zeros(size)
        elapsed = 0.0
        while idx.size and elapsed < t_max:
            nb = min(block, max(1, round((t_max - elapsed) / dt)))
            xk, lk = _refl_block(gen, x, l, dt, nb)
            xa = _prepend(x, xk)
            knot = xk >= level
            mb = _bridge_max(xa, xk, dt, gen.random(xa.shape))
            near = np.maximum(xa, xk) > level - zone
            crossed = knot | (near & (mb >= level))
            done, col = _first_true(crossed)
            if done.any():
                rows = np.nonzero(done)[0]
                c = col[rows]
                va, vb = xa[rows, c], xk[rows, c]
                frac = np.where(
                    vb >= level,
                    np.clip((level - va) / np.where(vb != va, vb - va, 1.0), 0.0, 1.0),
                    1.0,
                )
                time[idx[rows]] = elapsed + (c + frac) * dt
                l_at[idx[rows]] = lk[rows, c]
                hit[idx[rows]] = True
                keep = ~done
                idx, x, l = idx[keep], xk[keep, -1], lk[keep, -1]
            else:
                x, l = xk[:, -1], lk[:, -1]
            elapsed += nb * dt
        if idx.size:
            l_at[idx] = l
        offset += size
    return {"hit": hit, "time": time, "l_at_hit": l_at}


def local_time_crossing_ensemble(
    master_seed: int,
    n_paths: int,
    dt: float,
    t_max: float,
    *,
    level: Optional[float] = None,
    exp_rate: Optional[float] = None,
    x0: float = 0.0,
    chunk: int = CHUNK,
    block: int = BLOCK,
) -> dict[str, np.ndarray]:
    """First time the boundary local time exceeds a level.

    The level is either fixed (`level=r`, giving samples of the inverse
    local time K_r) or Exponential (`exp_rate=beta`, giving elastic
    lifetimes zeta = K_S together with the drawn S).  Crossing times are
    located by linear interpolation of L inside the bracketing step.
    """
    if (level is None) == (exp_rate is None):
        raise ValueError("exactly one of level / exp_rate must be given")
    crossed = np.zeros(n_paths, dtype=bool)
    time = np.full(n_paths, np.nan)
    s_out = np.full(n_paths, np.nan)

    offset = 0
    for ci, size in enumerate(_chunk_sizes(n_paths, chunk)):
        gen = _rng.generator(master_seed, ci)
        idx = np.arange(offset, offset + size)
        if exp_rate is not None:
            s = -np.log(np.maximum(gen.random(size), _TINY)) / exp_rate
        else:
            s = np.full(size, float(level))
        s_out[offset : offset + size] = s
        x = np.full(size, float(x0))
        l = np.zeros(size)
        elapsed = 0.0
        while idx.size and elapsed < t_max:
            nb = min(block, max(1, round((t_max - elapsed) / dt)))
            xk, lk = _refl_block(gen, x, l, dt, nb)
            la = _prepend(l, lk)
            done, col = _first_true(lk > s[:, None])
            if done.any():
                rows = np.nonzero(done)[0]
                c = col[rows]
                lo, hi = la[rows, c], lk[rows, c]
                frac = np.clip((s[rows] - lo) / np.where(hi > lo, hi - lo, 1.0), 0.0, 1.0)
                time[idx[rows]] = elapsed + (c + frac) * dt
                crossed[idx[rows]] = True
                keep = ~done
                idx, x, l, s = idx[keep], xk[keep, -1], lk[keep, -1], s[keep]
            else:
                x, l = xk[:, -1], lk[:, -1]
            elapsed += nb * dt
        offset += size
    return {"crossed": crossed, "time": time, "s": s_out}


def marginal_ensemble(
    master_seed: int,
    n_paths: int,
    dt: float,
    t_star: float,
    x0: float,
    *,
    beta: float = 0.0,
    gamma: float = 0.0,
    chunk: int = CHUNK,
    block: int = BLOCK,
) -> dict[str, np.ndarray]:
    """Value of the (beta, gamma) boundary model at outer time t_star.

    Simulated on the inner clock u: the outer time is u + gamma * L_u, the
    value at the outer crossing is interpolated between the bracketing
    knots, and (for beta > 0) the path is dead iff L exceeds its
    exponential level strictly before the outer target.
    """
    n_steps = max(1, round(t_star / dt))
    values = np.full(n_paths, np.nan)
    alive = np.ones(n_paths, dtype=bool)

    offset = 0
    for ci, size in enumerate(_chunk_sizes(n_paths, chunk)):
        gen = _rng.generator(master_seed, ci)
        idx = np.arange(offset, offset + size)
        s = (
            -np.log(np.maximum(gen.random(size), _TINY)) / beta
            if beta > 0
            else np.full(size, np.inf)
        )
        x = np.full(size, float(x0))
        l = np.zeros(size)
        step_done = 0
        while idx.size and step_done < n_steps:
            nb = min(block, n_steps - step_done)
            xk, lk = _refl_block(gen, x, l, dt, nb)
            xa, la = _prepend(x, xk), _prepend(l, lk)
            tk = (step_done + 1 + np.arange(nb)) * dt
            outer_b = tk[None, :] + gamma * lk
            outer_a = (tk - dt)[None, :] + gamma * la
            hit_out, col_out = _first_true(outer_b >= t_star)
            hit_kill, col_kill = _first_true(lk > s[:, None])
            # fractional positions inside the bracketing steps
            rows = np.arange(idx.size)
            f_out = np.clip(
                (t_star - outer_a[rows, col_out])
                / np.maximum(outer_b[rows, col_out] - outer_a[rows, col_out], 1e-300),
                0.0,
                1.0,
            )
            f_kill = np.clip(
                (s - la[rows, col_kill])
                / np.maximum(lk[rows, col_kill] - la[rows, col_kill], 1e-300),
                0.0,
                1.0,
            )
            kill_first = hit_kill & (
                (col_kill < col_out)
                | (~hit_out)
                | ((col_kill == col_out) & (f_kill < f_out))
            )
            out_first = hit_out & ~kill_first
            if kill_first.any():
                r = np.nonzero(kill_first)[0]
                alive[idx[r]] = False
            if out_first.any():
                r = np.nonzero(out_first)[0]
                c = col_out[r]
                values[idx[r]] = xa[r, c] + f_out[r] * (xk[r, c] - xa[r, c])
            retire = kill_first | out_first
            keep = ~retire
            idx, x, l, s = idx[keep], xk[keep, -1], lk[keep, -1], s[keep]
            step_done += nb
        if idx.size:  # gamma = 0 paths end exactly at the horizon
            values[idx] = x
        offset += size
    return {"value": values, "alive": alive}


def lt_potential_ensemble(
    master_seed: int,
    n_paths: int,
    dt: float,
    alpha: float,
    gamma: float,
    x0: float = 0.0,
    *,
    outer_max: Optional[float] = None,
    chunk: int = CHUNK,
    block: int = BLOCK,
) -> np.ndarray:
    """Pathwise samples of int_0^inf e^{-alpha t} dL^s_t for the sticky
    model, via the inner-clock identity
    int e^{-alpha (u + gamma L_u)} dL_u (midpoint weights on the outer
    clock inside each step).  Truncated when the outer clock passes
    `outer_max` (default 20/alpha; remaining mass < e^{-20} * potential).
    """
    if outer_max is None:
        outer_max = 20.0 / alpha
    acc = np.zeros(n_paths)
    offset = 0
    for ci, size in enumerate(_chunk_sizes(n_paths, chunk)):
        gen = _rng.generator(master_seed, ci)
        idx = np.arange(offset, offset + size)
        x = np.full(size, float(x0))
        l = np.zeros(size)
        part = np.zeros(size)
        elapsed = 0.0
        while idx.size:
            xk, lk = _refl_block(gen, x, l, dt, block)
            la = _prepend(l, lk)
            tk = elapsed + (1 + np.arange(block)) * dt
            outer_mid = (tk - 0.5 * dt)[None, :] + gamma * 0.5 * (la + lk)
            part[: idx.size] = np.sum(np.exp(-alpha * outer_mid) * (lk - la), axis=1)
            acc[idx] += part[: idx.size]
            elapsed += block * dt
            done = tk[-1] + gamma * lk[:, -1] >= outer_max
            keep = ~done
            idx, x, l = idx[keep], xk[keep, -1], lk[keep, -1]
        offset += size
    return acc


def resolvent_ensemble(
    master_seed: int,
    n_paths: int,
    dt: float,
    lam: float,
    f: Callable[[np.ndarray], np.ndarray],
    x0: float,
    *,
    beta: float = 0.0,
    gamma: float = 0.0,
    outer_max: Optional[float] = None,
    chunk: int = CHUNK,
    block: int = BLOCK,
) -> np.ndarray:
    """Pathwise samples of int_0^zeta e^{-lam t} f(X_t) dt for the
    (beta, gamma) family, on the inner clock:

        int e^{-lam (u + gamma L_u)} f(X_u) (du + gamma dL_u),

    trapezoid in du, midpoint in the Stieltjes dL part (where X = 0), kill
    at the first L-crossing of the exponential level with fractional
    weighting of the final step.
    """
    if outer_max is None:
        outer_max = 20.0 / lam
    f0 = float(np.asarray(f(np.zeros(1)))[0])
    acc = np.zeros(n_paths)
    offset = 0
    for ci, size in enumerate(_chunk_sizes(n_paths, chunk)):
        gen = _rng.generator(master_seed, ci)
        idx = np.arange(offset, offset + size)
        s = (
            -np.log(np.maximum(gen.random(size), _TINY)) / beta
            if beta > 0
            else np.full(size, np.inf)
        )
        x = np.full(size, float(x0))
        l = np.zeros(size)
        c_prev = np.exp(-lam * gamma * l) * np.asarray(f(x))  # e^{-lam*outer} f(X) at u=0
        elapsed = 0.0
        while idx.size:
            xk, lk = _refl_block(gen, x, l, dt, block)
            la = _prepend(l, lk)
            tk = elapsed + (1 + np.arange(block)) * dt
            ck = np.exp(-lam * (tk[None, :] + gamma * lk)) * np.asarray(f(xk))
            ca = np.empty_like(ck)
            ca[:, 0] = c_prev
            ca[:, 1:] = ck[:, :-1]
            contrib = 0.5 * (ca + ck) * dt
            if gamma > 0:
                outer_mid = (tk - 0.5 * dt)[None, :] + gamma * 0.5 * (la + lk)
                contrib = contrib + (gamma * f0) * np.exp(-lam * outer_mid) * (lk - la)
            killed, col = _first_true(lk > s[:, None])
            if killed.any():
                r = np.nonzero(killed)[0]
                c = col[r]
                frac = np.clip(
                    (s[r] - la[r, c]) / np.maximum(lk[r, c] - la[r, c], _TINY), 0.0, 1.0
                )
                steps = np.arange(block)[None, :]
                wgt = np.ones_like(contrib[r])
                wgt[steps > c[:, None]] = 0.0
                wgt[np.arange(r.size), c] = frac  # scale the death step
                acc[idx[r]] += np.sum(contrib[r] * wgt, axis=1)
                live = ~killed
                acc[idx[live]] += np.sum(contrib[live], axis=1)
                idx, x, l, s = idx[live], xk[live, -1], lk[live, -1], s[live]
                c_prev = ck[live, -1]
            else:
                acc[idx] += np.sum(contrib, axis=1)
                x, l, c_prev = xk[:, -1], lk[:, -1], ck[:, -1]
            elapsed += block * dt
            if idx.size:
                over = (tk[-1] + gamma * l) >= outer_max
                keep = ~over
                idx, x, l, s, c_prev = idx[keep], x[keep], l[keep], s[keep], c_prev[keep]
        offset += size
    return acc


def stopped_resolvent_ensemble(
    master_seed: int,
    n_paths: int,
    dt: float,
    lam: float,
    f: Callable[[np.ndarray], np.ndarray],
    x0: float,
    *,
    hold_rate: Optional[float] = None,
    stopped: bool = True,
    t_max: Optional[float] = None,
    chunk: int = CHUNK,
    block: int = BLOCK,
) -> np.ndarray:
    """Resolvent samples for the absorbing / trap-and-kill modes.

    Free BM until the bridge-exact first hit of 0, accumulating the
    trapezoid integral; afterwards the closed tail f(0)(e^{-lam H} -
    e^{-lam zeta})/lam with zeta = H + Exp(hold_rate) (trap-and-kill),
    zeta = inf (stopped absorbing) or zeta = H (killed absorbing).
    """
    if t_max is None:
        t_max = 20.0 / lam
    f0 = float(np.asarray(f(np.zeros(1)))[0])
    acc = np.zeros(n_paths)
    offset = 0
    for ci, size in enumerate(_chunk_sizes(n_paths, chunk)):
        gen = _rng.generator(master_seed, ci)
        idx = np.arange(offset, offset + size)
        x = np.full(size, float(x0))
        c_prev = np.asarray(f(x)) * 1.0
        elapsed = 0.0
        while idx.size and elapsed < t_max:
            nb = min(block, max(1, round((t_max - elapsed) / dt)))
            dw = gen.standard_normal((idx.size, nb)) * math.sqrt(dt)
            w = np.cumsum(dw, axis=1) + x[:, None]
            wa = _prepend(x, w)
            m = _bridge_min(wa, w, dt, gen.random(w.shape))
            tk = elapsed + (1 + np.arange(nb)) * dt
            ck = np.exp(-lam * tk[None, :]) * np.asarray(f(w))
            ca = np.empty_like(ck)
            ca[:, 0] = c_prev
            ca[:, 1:] = ck[:, :-1]
            contrib = 0.5 * (ca + ck) * dt
            hit, col = _first_true(m <= 0.0)
            if hit.any():
                r = np.nonzero(hit)[0]
                c = col[r]
                steps = np.arange(nb)[None, :]
                wgt = np.ones_like(contrib[r])
                wgt[steps >= c[:, None]] = 0.0  # stop integrating at the hit step
                acc[idx[r]] += np.sum(contrib[r] * wgt, axis=1)
                h = elapsed + (c + 1) * dt  # step-end hit time, O(dt)
                if stopped and hold_rate is None:
                    tail = f0 * np.exp(-lam * h) / lam
                elif hold_rate is not None:
                    hold = -np.log(np.maximum(gen.random(r.size), _TINY)) / hold_rate
                    tail = f0 * (np.exp(-lam * h) - np.exp(-lam * (h + hold))) / lam
                else:
                    tail = 0.0
                acc[idx[r]] += tail
                live = ~hit
                acc[idx[live]] += np.sum(contrib[live], axis=1)
                idx, x, c_prev = idx[live], w[live, -1], ck[live, -1]
            else:
                acc[idx] += np.sum(contrib, axis=1)
                x, c_prev = w[:, -1], ck[:, -1]
            elapsed += nb * dt
        offset += size
    return acc


def absorbed_marginal_ensemble(
    master_seed: int,
    n_paths: int,
    dt: float,
    t_star: float,
    x0: float,
    *,
    hold_rate: Optional[float] = None,
    chunk: int = CHUNK,
    block: int = BLOCK,
) -> dict[str, np.ndarray]:
    """Marginal at t_star for absorbing (hold_rate None: stopped at 0) or
    trap-and-kill (held Exp(hold_rate) then dead)."""
    values = np.full(n_paths, np.nan)
    at_zero = np.zeros(n_paths, dtype=bool)
    alive = np.ones(n_paths, dtype=bool)
    n_steps = max(1, round(t_star / dt))
    offset = 0
    for ci, size in enumerate(_chunk_sizes(n_paths, chunk)):
        gen = _rng.generator(master_seed, ci)
        idx = np.arange(offset, offset + size)
        x = np.full(size, float(x0))
        step_done = 0
        while idx.size and step_done < n_steps:
            nb = min(block, n_steps - step_done)
            dw = gen.standard_normal((idx.size, nb)) * math.sqrt(dt)
            w = np.cumsum(dw, axis=1) + x[:, None]
            wa = _prepend(x, w)
            m = _bridge_min(wa, w, dt, gen.random(w.shape))
            hit, col = _first_true(m <= 0.0)
            if hit.any():
                r = np.nonzero(hit)[0]
                h = (step_done + col[r] + 1) * dt
                at_zero[idx[r]] = True
                if hold_rate is not None:
                    hold = -np.log(np.maximum(gen.random(r.size), _TINY)) / hold_rate
                    dead = h + hold < t_star
                    alive[idx[r][dead]] = False
                    at_zero[idx[r][dead]] = False
                live = ~hit
                idx, x = idx[live], w[live, -1]
            else:
                x = w[:, -1]
            step_done += nb
        if idx.size:
            values[idx] = x
        offset += size
    values[at_zero] = 0.0
    return {"value": values, "alive": alive, "at_zero": at_zero}


# ---------------------------------------------------------------------------
# interval ensembles


def interval_exit_ensemble(
    master_seed: int,
    n_paths: int,
    dt: float,
    x0: float,
    *,
    lo: float = 0.0,
    hi: float = 1.0,
    t_max: float = 20.0,
    chunk: int = CHUNK,
    block: int = BLOCK,
) -> dict[str, np.ndarray]:
    """Free BM from x0 run to its first exit of (lo, hi); returns the exit
    side (0 for lo, 1 for hi) and the exit time (interpolated for knot
    crossings, step midpoint for bridge-detected ones).  Both barriers use
    exact bridge extremes; a within-step touch of both barriers is beyond
    float probability at the dt used (ties broken toward hi)."""
    zone = 8.0 * math.sqrt(dt)
    side = np.full(n_paths, -1, dtype=np.int8)
    time = np.full(n_paths, np.nan)
    offset = 0
    for ci, size in enumerate(_chunk_sizes(n_paths, chunk)):
        gen = _rng.generator(master_seed, ci)
        idx = np.arange(offset, offset + size)
        x = np.full(size, float(x0))
        elapsed = 0.0
        while idx.size and elapsed < t_max:
            nb = min(block, max(1, round((t_max - elapsed) / dt)))
            dw = gen.standard_normal((idx.size, nb)) * math.sqrt(dt)
            w = np.cumsum(dw, axis=1) + x[:, None]
            wa = _prepend(x, w)
            u1 = gen.random(w.shape)
            u2 = gen.random(w.shape)
            near0 = np.minimum(wa, w) < lo + zone
            near1 = np.maximum(wa, w) > hi - zone
            m = _bridge_min(wa, w, dt, u1)
            mb = _bridge_max(wa, w, dt, u2)
            hit0 = (w <= lo) | (near0 & (m <= lo))
            hit1 = (w >= hi) | (near1 & (mb >= hi))
            done0, col0 = _first_true(hit0)
            done1, col1 = _first_true(hit1)
            exit1 = done1 & ((~done0) | (col1 <= col0))  # tie toward hi
            exit0 = done0 & ~exit1
            for flag, colv, lab, lev in ((exit0, col0, 0, lo), (exit1, col1, 1, hi)):
                if flag.any():
                    r = np.nonzero(flag)[0]
                    c = colv[r]
                    va, vb = wa[r, c], w[r, c]
                    knot = (vb <= lev) if lab == 0 else (vb >= lev)
                    frac = np.where(
                        knot,
                        np.clip((lev - va) / np.where(vb != va, vb - va, 1.0), 0.0, 1.0),
                        0.5,
                    )
                    side[idx[r]] = lab
                    time[idx[r]] = elapsed + (c + frac) * dt
            keep = ~(exit0 | exit1)
            idx, x = idx[keep], w[keep, -1]
            elapsed += nb * dt
        offset += size
    return {"side": side, "time": time}


def interval_resolvent_f1_ensemble(
    master_seed: int,
    n_paths: int,
    dt: float,
    lam: float,
    beta0: float,
    x0: float,
    *,
    outer_max: Optional[float] = None,
    chunk: int = CHUNK,
    block: int = BLOCK,
) -> np.ndarray:
    """MC resolvent samples (1 - e^{-lam zeta})/lam for the pieced interval
    process with Elastic(beta0) at 0 and Reflecting at 1, f = 1.

    The piecing is simulated phase by phase: A-phases reflect at 0 with
    local-time killing (cumulative L against a single exponential level,
    equivalent to fresh levels per copy by memorylessness) until the hit of
    1; B-phases reflect at 1 (mirrored coordinates) until the hit of 0.
    Clocks are per-path, so phases advance without global alignment.
    """
    if outer_max is None:
        outer_max = 20.0 / lam
    zone = 8.0 * math.sqrt(dt)
    out = np.empty(n_paths)
    offset = 0
    for ci, size in enumerate(_chunk_sizes(n_paths, chunk)):
        gen = _rng.generator(master_seed, ci)
        s = -np.log(np.maximum(gen.random(size), _TINY)) / beta0
        idx = np.arange(offset, offset + size)
        pos = np.full(size, float(x0))  # A-phase coordinate (distance from 0)
        lcum = np.zeros(size)
        t = np.zeros(size)
        in_a = np.ones(size, dtype=bool)
        zeta = np.full(size, np.inf)
        while idx.size:
            # --- advance A-phase paths one block
            a_rows = np.nonzero(in_a)[0]
            if a_rows.size:
                xk, lk = _refl_block(gen, pos[a_rows], lcum[a_rows], dt, block)
                xa = _prepend(pos[a_rows], xk)
                la = _prepend(lcum[a_rows], lk)
                mb = _bridge_max(xa, xk, dt, gen.random(xa.shape))
                near = np.maximum(xa, xk) > 1.0 - zone
                hit1 = (xk >= 1.0) | (near & (mb >= 1.0))
                kill = lk > s[a_rows][:, None]
                d1, c1 = _first_true(hit1)
                dk, ck = _first_true(kill)
                killed = dk & ((~d1) | (ck <= c1))
                hit = d1 & ~killed
                if killed.any():
                    r = a_rows[killed]
                    rows = np.nonzero(killed)[0]
                    c = ck[rows]
                    lo, hi = la[rows, c], lk[rows, c]
                    frac = np.clip(
                        (s[r] - lo) / np.maximum(hi - lo, _TINY), 0.0, 1.0
                    )
                    zeta[r] = t[r] + (c + frac) * dt
                    in_a[r] = False  # retired below via zeta
                if hit.any():
                    r = a_rows[hit]
                    rows = np.nonzero(hit)[0]
                    c = c1[rows]
                    t[r] += (c + 1) * dt
                    lcum[r] = lk[rows, c]
                    pos[r] = 0.0  # B-phase coordinate (distance below 1)
                    in_a[r] = False
                rest = ~(killed | hit)
                r = a_rows[rest]
                rows = np.nonzero(rest)[0]
                pos[r] = xk[rows, -1]
                lcum[r] = lk[rows, -1]
                t[r] += block * dt
            # --- advance B-phase paths one block (reflect at 1, no kill)
            b_rows = np.nonzero(~in_a & ~np.isfinite(zeta))[0]
            if b_rows.size:
                yk, _ = _refl_block(gen, pos[b_rows], np.zeros(b_rows.size), dt, block)
                ya = _prepend(pos[b_rows], yk)
                mb = _bridge_max(ya, yk, dt, gen.random(ya.shape))
                near = np.maximum(ya, yk) > 1.0 - zone
                hit0 = (yk >= 1.0) | (near & (mb >= 1.0))
                d0, c0 = _first_true(hit0)
                if d0.any():
                    r = b_rows[d0]
                    rows = np.nonzero(d0)[0]
                    t[r] += (c0[rows] + 1) * dt
                    pos[r] = 0.0
                    in_a[r] = True
                rest = ~d0
                r = b_rows[rest]
                rows = np.nonzero(rest)[0]
                pos[r] = yk[rows, -1]
                t[r] += block * dt
            # --- retire dead or time-expired paths
            dead = np.isfinite(zeta)
            expired = t >= outer_max
            retire = dead | expired
            if retire.any():
                r = np.nonzero(retire)[0]
                z = np.where(dead[r], zeta[r], np.inf)
                out[idx[r]] = (1.0 - np.exp(-lam * np.minimum(z, outer_max))) / lam
                keep = ~retire
                idx = idx[keep]
                pos, lcum, t, s, in_a, zeta = (
                    pos[keep], lcum[keep], t[keep], s[keep], in_a[keep], zeta[keep]
                )
        offset += size
    return out


def interval_fold_pair(
    master_seed: int, n_paths: int, x0: float, t: float, s: float
) -> tuple[np.ndarray, np.ndarray]:
    """(X_t, X_{t+s}) for doubly-reflecting BM on [0,1] from x0, via the
    exact billiard representation X = fold(x0 + W) of the pieced process
    with reflecting copies at both ends (no discretization at all)."""
    gen = _rng.generator(master_seed, 0)
    w_t = x0 + math.sqrt(t) * gen.standard_normal(n_paths)
    w_ts = w_t + math.sqrt(s) * gen.standard_normal(n_paths)

    def fold(z):
        z = np.mod(z, 2.0)
        return np.minimum(z, 2.0 - z)

    return fold(w_t), fold(w_ts)


def killed_at_one_marginals(
    master_seed: int,
    n_paths: int,
    dt: float,
    beta: float,
    x0: float,
    times: tuple[float, ...],
    *,
    chunk: int = CHUNK,
    block: int = BLOCK,
) -> list[np.ndarray]:
    """Values at the given times of the Elastic(beta) half-line process
    from x0 killed at its first hit of 1 (samples restricted to paths
    neither dead nor yet at 1).  The pieced interval process stopped the
    same way has the same law; the single-path piecing is compared against
    this ensemble in the tests."""
    zone = 8.0 * math.sqrt(dt)
    horizon = max(times)
    n_steps = max(1, round(horizon / dt))
    marks = sorted(round(tt / dt) for tt in times)
    samples: dict[int, list[np.ndarray]] = {mk: [] for mk in marks}
    offset = 0
    for ci, size in enumerate(_chunk_sizes(n_paths, chunk)):
        gen = _rng.generator(master_seed, ci)
        s = -np.log(np.maximum(gen.random(size), _TINY)) / beta
        x = np.full(size, float(x0))
        l = np.zeros(size)
        step_done = 0
        while x.size and step_done < n_steps:
            nb = min(block, n_steps - step_done)
            xk, lk = _refl_block(gen, x, l, dt, nb)
            xa = _prepend(x, xk)
            mb = _bridge_max(xa, xk, dt, gen.random(xa.shape))
            near = np.maximum(xa, xk) > 1.0 - zone
            gone = (xk >= 1.0) | (near & (mb >= 1.0)) | (lk > s[:, None])
            alive_through = ~np.logical_or.accumulate(gone, axis=1)
            for mk in marks:
                j = mk - step_done - 1
                if 0 <= j < nb:
                    ok = alive_through[:, j]
                    samples[mk].append(xk[ok, j])
            keep = alive_through[:, -1]
            x, l, s = xk[keep, -1], lk[keep, -1], s[keep]
            step_done += nb
        offset += size
    return [np.concatenate(samples[mk]) for mk in marks]
