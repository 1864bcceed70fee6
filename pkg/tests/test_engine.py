"""Single-path engine: reflection map, clocks, killing, serialization."""

import io
import math

import numpy as np
import pytest

from fellerbm import rng
from fellerbm.engine import (
    AugmentedPath,
    SamplePath,
    TimeGrid,
    build_process,
    hitting_time,
    local_time_downcrossing,
    pchaf_kill,
    path_csv_text,
    read_path_csv,
    reflect_with_local_time,
    sample_bm,
    sticky_time_change,
    write_path_csv,
)
from fellerbm.errors import (
    BadEps,
    NegativeStart,
    NotAdditiveFunctional,
    StartOutOfRange,
)
from fellerbm.model import BoundaryModel


def test_time_grid_basics():
    grid = TimeGrid(2.0, 400)
    assert grid.dt == pytest.approx(0.005)
    t = grid.times()
    assert t[0] == 0.0 and t[-1] == 2.0 and t.size == 401
    assert grid.eps_flat() == pytest.approx(2.0 * math.sqrt(0.005))
    with pytest.raises(ValueError):
        TimeGrid(-1.0, 10)
    with pytest.raises(ValueError):
        TimeGrid(1.0, 0)


def test_sample_bm_is_deterministic_and_starts_correctly():
    grid = TimeGrid(1.0, 100)
    a = sample_bm(0.7, grid, seed=5)
    b = sample_bm(0.7, grid, seed=5)
    assert a.values[0] == 0.7
    assert np.array_equal(a.values, b.values)
    c = sample_bm(0.7, grid, seed=6)
    assert not np.array_equal(a.values, c.values)


def test_reflection_skorokhod_identities():
    """From 0 the construction must satisfy X = L - W with
    L = running max of W^+ (the discrete Skorokhod solution)."""
    grid = TimeGrid(1.0, 2000)
    for seed in (0, 1, 2):
        aug = reflect_with_local_time(0.0, grid, seed)
        w = aug.driving
        expect_l = np.maximum.accumulate(np.maximum(w, 0.0))
        assert np.allclose(aug.local_time, expect_l)
        assert np.allclose(aug.path.values, expect_l - w)
        assert np.all(aug.path.values >= 0.0)
        assert np.all(np.diff(aug.local_time) >= 0.0)


def test_reflection_identity_holds_with_bridge_maxima():
    grid = TimeGrid(1.0, 500)
    aug = reflect_with_local_time(0.0, grid, seed=3, bridge=True)
    # X + W = L still, and the bridge local time dominates the knot-only one
    assert np.allclose(aug.path.values + aug.driving, aug.local_time)
    knot = reflect_with_local_time(0.0, grid, seed=3).local_time
    assert np.all(aug.local_time >= knot - 1e-12)


def test_reflection_from_interior_is_free_until_first_touch():
    grid = TimeGrid(1.0, 2000)
    aug = reflect_with_local_time(1.5, grid, seed=11)
    below = np.nonzero(aug.driving <= 0.0)[0]
    i0 = below[0] if below.size else aug.driving.size
    assert np.array_equal(aug.path.values[:i0], aug.driving[:i0])
    assert np.all(aug.local_time[:i0] == 0.0)


def test_local_time_flat_away_from_boundary():
    grid = TimeGrid(1.0, 4000)
    aug = reflect_with_local_time(0.0, grid, seed=9)
    dl = np.diff(aug.local_time)
    grew = dl > 0
    assert np.all(aug.path.values[1:][grew] <= grid.eps_flat())


def test_negative_start_rejected():
    with pytest.raises(NegativeStart):
        reflect_with_local_time(-0.1, TimeGrid(1.0, 10), 0)


def test_hitting_time_interpolates_inside_a_step():
    grid = TimeGrid(0.02, 2)
    path = SamplePath(grid=grid, values=np.array([0.0, 0.05, 0.2]), start=0.0)
    # crossing of 0.1 happens a third of the way through the second step
    assert hitting_time(path, 0.1) == pytest.approx(0.01 + 0.01 / 3.0)
    # exact knot value is found at the knot itself
    assert hitting_time(path, 0.05) == pytest.approx(0.01)
    assert hitting_time(path, 0.5) is None


def test_hitting_time_respects_lifetime():
    grid = TimeGrid(0.02, 2)
    path = SamplePath(grid=grid, values=np.array([0.0, 0.05, 0.2]), start=0.0,
                      lifetime=0.005)
    assert hitting_time(path, 0.1) is None


def test_path_at_and_alive_mask():
    grid = TimeGrid(1.0, 2)
    path = SamplePath(grid=grid, values=np.array([0.0, 1.0, 2.0]), start=0.0,
                      lifetime=0.75)
    assert path.at(0.25) == pytest.approx(0.5)
    assert path.at(0.75) == pytest.approx(1.5)
    assert path.at(0.8) is None
    assert list(path.alive_mask()) == [True, True, False]
    with pytest.raises(ValueError):
        path.at(1.5)


def test_pchaf_kill_with_identity_clock_reproduces_the_exponential():
    """A_t = t makes zeta equal the Exp(beta) draw from the KILL stream."""
    grid = TimeGrid(50.0, 5000)
    path = sample_bm(0.0, grid, seed=21)
    t = grid.times()
    killed = pchaf_kill(path, t, beta=2.0, seed=21)
    gen = rng.generator(21, rng.KILL)
    s = rng.exponential_from_uniform(gen.random(), 2.0)
    assert killed.lifetime == pytest.approx(s, rel=1e-12)


def test_pchaf_kill_validates_the_functional():
    grid = TimeGrid(1.0, 4)
    path = sample_bm(0.0, grid, seed=1)
    with pytest.raises(NotAdditiveFunctional):
        pchaf_kill(path, np.array([0.0, 1.0, 0.5, 0.7, 0.9]), 1.0, 1)
    with pytest.raises(NotAdditiveFunctional):
        pchaf_kill(path, np.array([0.5, 1.0, 1.5, 2.0, 2.5]), 1.0, 1)
    with pytest.raises(NotAdditiveFunctional):
        pchaf_kill(path, np.zeros(3), 1.0, 1)
    with pytest.raises(ValueError):
        pchaf_kill(path, np.zeros(5), 0.0, 1)


def test_kill_ordering_under_shared_seed():
    # larger beta can only shorten the lifetime when the seed is shared
    grid = TimeGrid(4.0, 4000)
    for seed in range(12):
        z1 = build_process(BoundaryModel.elastic(0.5), 0.0, grid, seed).path.lifetime
        z2 = build_process(BoundaryModel.elastic(3.0), 0.0, grid, seed).path.lifetime
        lo = math.inf if z2 is None else z2
        hi = math.inf if z1 is None else z1
        assert lo <= hi


def test_sticky_time_change_properties():
    grid = TimeGrid(1.0, 3000)
    aug = reflect_with_local_time(0.0, grid, seed=4)
    slowed = sticky_time_change(aug, gamma=1.0)
    tau = slowed.time_change
    t = grid.times()
    assert np.all(np.diff(tau) > 0.0)
    assert np.all(tau <= t + 1e-12)
    # X_t = Y_{tau(t)} on the knots, up to the linear interpolation used
    direct = np.interp(tau, t, aug.path.values)
    assert np.allclose(slowed.path.values, direct)
    # gamma = 0 is the identity
    ident = sticky_time_change(aug, gamma=0.0)
    assert np.array_equal(ident.path.values, aug.path.values)
    assert np.array_equal(ident.time_change, t)


def test_general_lifetime_decomposes_into_elastic_plus_sticky_part():
    """zeta_general = zeta_elastic + gamma * S pathwise (shared kill draw)."""
    grid = TimeGrid(8.0, 8000)
    gamma = 1.0
    checked = 0
    for seed in range(10):
        el = build_process(BoundaryModel.elastic(1.0), 0.0, grid, seed)
        gn = build_process(BoundaryModel.general(1.0, gamma), 0.0, grid, seed)
        z_el, z_gn = el.path.lifetime, gn.path.lifetime
        if z_el is None or z_gn is None:
            continue
        gen = rng.generator(seed, rng.KILL)
        s = rng.exponential_from_uniform(gen.random(), 1.0)
        assert z_gn == pytest.approx(z_el + gamma * s, abs=2.0 * grid.dt)
        checked += 1
    assert checked >= 5


def test_trap_kill_from_origin_lifetime_is_the_holding_clock():
    grid = TimeGrid(5.0, 500)
    seed, beta = 13, 2.0
    aug = build_process(BoundaryModel.trap_kill(beta), 0.0, grid, seed)
    gen = rng.generator(seed, rng.KILL)
    hold = rng.exponential_from_uniform(gen.random(), beta)
    if hold <= grid.t_max:
        assert aug.path.lifetime == pytest.approx(hold, rel=1e-12)
    else:
        assert aug.path.lifetime is None
    assert np.all(aug.path.values == 0.0)


def test_trap_kill_holds_at_zero_after_the_hit():
    grid = TimeGrid(2.0, 2000)
    aug = build_process(BoundaryModel.trap_kill(1.0), 0.8, grid, seed=2)
    below = np.nonzero(aug.driving <= 0.0)[0]
    if below.size:
        assert np.all(aug.path.values[below[0]:] == 0.0)
        if aug.path.lifetime is not None:
            hit = hitting_time(SamplePath(grid, aug.driving, 0.8), 0.0)
            assert aug.path.lifetime > hit


def test_absorbing_stops_without_dying():
    grid = TimeGrid(2.0, 2000)
    aug = build_process(BoundaryModel.absorbing(), 0.5, grid, seed=7)
    assert aug.path.lifetime is None
    below = np.nonzero(aug.driving <= 0.0)[0]
    assert below.size  # this seed does reach the boundary
    assert np.all(aug.path.values[below[0]:] == 0.0)
    assert np.all(aug.local_time == 0.0)


def test_build_process_is_deterministic():
    grid = TimeGrid(1.0, 1500)
    a = build_process(BoundaryModel.general(1.0, 1.0), 0.0, grid, seed=42)
    b = build_process(BoundaryModel.general(1.0, 1.0), 0.0, grid, seed=42)
    assert np.array_equal(a.path.values, b.path.values)
    assert np.array_equal(a.local_time, b.local_time)
    assert a.path.lifetime == b.path.lifetime


def test_build_process_rejects_bad_starts():
    grid = TimeGrid(1.0, 10)
    with pytest.raises(StartOutOfRange):
        build_process(BoundaryModel.reflecting(), -0.5, grid, 0)
    with pytest.raises(StartOutOfRange):
        build_process(BoundaryModel.reflecting(), math.nan, grid, 0)


def _hand_path(values):
    values = np.asarray(values, dtype=float)
    grid = TimeGrid(0.1 * (values.size - 1), values.size - 1)
    path = SamplePath(grid=grid, values=values, start=values[0])
    zeros = np.zeros_like(values)
    return AugmentedPath(path=path, driving=zeros, local_time=zeros)


def test_downcrossing_counts_completed_excursions_exactly():
    # three excursions clear eps = 0.05, one (max 0.04) does not
    aug = _hand_path([0, 0.06, 0.02, 0, 0.04, 0, 0.07, 0.05, 0, 0.03, 0.06, 0])
    d = local_time_downcrossing(aug, 0.05)
    assert d[2] == 0.0
    assert d[3] == pytest.approx(0.05)
    assert d[5] == pytest.approx(0.05)  # small excursion ignored
    assert d[8] == pytest.approx(0.10)
    assert d[-1] == pytest.approx(0.15)
    # raising eps above every maximum kills all counts
    assert np.all(local_time_downcrossing(aug, 0.08) == 0.0)
    with pytest.raises(BadEps):
        local_time_downcrossing(aug, 0.0)


def test_downcrossing_estimator_tracks_local_time():
    # eps * D undercounts at finite resolution (near-zero touches between
    # knots merge excursions); the deficit must shrink as dt refines and
    # stay moderate at the finer grid.
    eps = 0.05
    deficits = {}
    for n_steps in (2000, 20000):
        grid = TimeGrid(1.0, n_steps)
        diffs = []
        for seed in range(150):
            aug = reflect_with_local_time(0.0, grid, seed)
            d = local_time_downcrossing(aug, eps)
            assert np.all(np.diff(d) >= 0.0)
            steps = np.diff(d)
            assert np.all((np.abs(steps) < 1e-15) | (np.abs(steps - eps) < 1e-15))
            diffs.append(d[-1] - aug.local_time[-1])
        deficits[n_steps] = np.mean(diffs)
    assert deficits[2000] < deficits[20000] < 0.0
    assert deficits[20000] > -0.25


def test_csv_round_trip_is_bit_exact():
    grid = TimeGrid(1.0, 50)
    aug = build_process(BoundaryModel.sticky(1.0), 0.0, grid, seed=8)
    text = path_csv_text(aug)
    cols = read_path_csv(io.StringIO(text))
    assert np.array_equal(cols["t"], grid.times())
    assert np.array_equal(cols["value"], aug.path.values)
    assert np.array_equal(cols["local_time"], aug.local_time)
    assert np.array_equal(cols["tau"], aug.time_change)
    assert np.array_equal(cols["alive"], aug.path.alive_mask().astype(int))


def test_csv_reader_rejects_foreign_headers():
    with pytest.raises(ValueError):
        read_path_csv(io.StringIO("a,b,c\n1,2,3\n"))


def test_csv_tau_defaults_to_identity_without_time_change():
    grid = TimeGrid(0.5, 5)
    aug = reflect_with_local_time(0.0, grid, seed=1)
    buf = io.StringIO()
    write_path_csv(aug, buf)
    cols = read_path_csv(io.StringIO(buf.getvalue()))
    assert np.array_equal(cols["tau"], grid.times())
