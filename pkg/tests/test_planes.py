from collections import deque

import numpy as np
import pytest

from tanlab import planes
from tanlab.orbit import OrbitStatus, iterate_orbit, singular_orbit_fate
from tanlab.planes import (
    BASIN,
    PREPOLE,
    UNRESOLVED,
    GridSpec,
    Raster,
    RegionAi,
    classify_orbits,
    classify_parameters,
    component_count,
    render_dynamical,
    render_parameter,
    scan_region_threshold,
)

from conftest import CANTOR


def bfs_components(mask):
    """Independent 4-connected flood fill used as the oracle."""
    rows, cols = mask.shape
    seen = np.zeros_like(mask, dtype=bool)
    sizes = []
    for r0 in range(rows):
        for c0 in range(cols):
            if not mask[r0, c0] or seen[r0, c0]:
                continue
            seen[r0, c0] = True
            queue, size = deque([(r0, c0)]), 0
            while queue:
                r, c = queue.popleft()
                size += 1
                for dr, dc in ((1, 0), (-1, 0), (0, 1), (0, -1)):
                    rr, cc = r + dr, c + dc
                    if 0 <= rr < rows and 0 <= cc < cols and mask[rr, cc] and not seen[rr, cc]:
                        seen[rr, cc] = True
                        queue.append((rr, cc))
            sizes.append(size)
    return sizes


def raster_of(codes):
    codes = np.asarray(codes, dtype=np.uint8)
    spec = GridSpec(0, 1, 1, codes.shape[1], codes.shape[0])
    zeros = np.zeros_like(codes)
    return Raster(spec, codes, zeros.astype(np.int32), zeros)


class TestGrid:
    def test_pixel_mapping(self):
        g = GridSpec(1 + 2j, 4.0, 2.0, 4, 2)
        assert g.pixel(0, 0) == complex(1 - 1.5, 2 + 0.5)
        assert g.pixel(3, 1) == complex(1 + 1.5, 2 - 0.5)
        assert g.points().shape == (2, 4)

    def test_formula(self):
        g = GridSpec(0.3 - 0.7j, 3.0, 5.0, 7, 9)
        for c in range(7):
            for r in range(9):
                want = (0.3 - 0.7j) + ((c + 0.5) / 7 - 0.5) * 3.0 + 1j * (0.5 - (r + 0.5) / 9) * 5.0
                assert abs(g.pixel(c, r) - want) < 1e-15

    def test_antisymmetric(self):
        pts = GridSpec(0, 8, 8, 16, 10).points()
        assert np.array_equal(pts[::-1, ::-1], -pts)

    @pytest.mark.parametrize("args", [(0, 0, 1, 1, 1), (0, 1, 1, 0, 1), (0, 1, -1, 1, 1)])
    def test_invalid(self, args):
        with pytest.raises(ValueError):
            GridSpec(*args)


def test_vector_kernel_matches_scalar():
    rng = np.random.default_rng(0)
    seeds = rng.uniform(-3, 3, 400) + 1j * rng.uniform(-3, 3, 400)
    for lam in (CANTOR, 0.1, 0.2 + 0.1j):
        codes, steps, periods, pts = classify_orbits(lam, seeds, 200)
        for z, code, n, p, q in zip(seeds, codes, steps, periods, pts):
            res = iterate_orbit(lam, complex(z), 200)
            want = {OrbitStatus.CONVERGED: BASIN, OrbitStatus.HIT_POLE: PREPOLE,
                    OrbitStatus.UNRESOLVED: UNRESOLVED}[res.status]
            assert code == want and n == res.steps_used
            if res.converged:
                assert p == res.period and abs(q - res.cycle.points[0]) < 1e-14


class TestDynamical:
    def test_cantor_raster(self):
        r = render_dynamical(CANTOR, GridSpec(0, 8, 8, 256, 256))
        assert r.fraction(BASIN, PREPOLE) >= 0.99
        count, largest = component_count(r, BASIN)
        assert largest >= 0.99

    def test_rotation_symmetry(self):
        for lam in (CANTOR, 0.1, 0.3 + 0.4j):
            r = render_dynamical(lam, GridSpec(0, 6, 6, 64, 48))
            assert np.array_equal(r.class_codes, r.class_codes[::-1, ::-1])
            assert np.array_equal(r.iter_counts, r.iter_counts[::-1, ::-1])

    def test_real_axis_basin(self):
        # two rows straddle the real axis at distance 1e-9
        r = render_dynamical(0.1, GridSpec(0.1127, 0.2, 2e-9, 21, 2))
        assert (r.class_codes == BASIN).all()
        assert (r.periods == 1).all()

    def test_determinism(self, monkeypatch):
        spec = GridSpec(0, 6, 6, 40, 37)
        out = []
        for threads in ("1", "4"):
            monkeypatch.setenv(planes.THREADS_ENV, threads)
            out.append(render_dynamical(0.3 + 0.4j, spec))
        a, b = out
        assert np.array_equal(a.class_codes, b.class_codes)
        assert np.array_equal(a.iter_counts, b.iter_counts)
        assert np.array_equal(a.periods, b.periods)

    def test_codes_enumerated(self):
        r = render_dynamical(1 / 3, GridSpec(0, 4, 4, 32, 32), max_iter=50)
        assert set(np.unique(r.class_codes)) <= {BASIN, PREPOLE, UNRESOLVED}

    def test_worker_count(self, monkeypatch):
        monkeypatch.setenv(planes.THREADS_ENV, "3")
        assert planes.worker_count() == 3
        monkeypatch.setenv(planes.THREADS_ENV, "0")
        assert planes.worker_count() >= 1
        assert planes.worker_count(2) == 2


class TestParameter:
    def test_parameter_square(self):
        r = render_parameter(GridSpec(4 + 4j, 4, 4, 32, 32))
        lam = r.spec.points()
        high = lam.real * lam.imag >= 16
        assert r.cantor_flags[high].all()

    def test_flag_consistency(self):
        r = render_parameter(GridSpec(0, 12, 12, 48, 48))
        flagged = r.cantor_flags
        assert flagged.any()
        assert (r.class_codes[flagged] == BASIN).all()
        assert (r.periods[flagged] == 1).all()

    def test_conjugation_symmetry(self):
        r = render_parameter(GridSpec(1, 10, 8, 40, 32))
        for grid in (r.class_codes, r.iter_counts, r.periods, r.cantor_flags):
            assert np.array_equal(grid, grid[::-1, :])

    def test_real_segment(self):
        lams = np.linspace(-0.199, 0.199, 81)
        crit, _, crit_period, _ = classify_orbits(lams, np.zeros_like(lams), 1000)
        assert (crit == BASIN).all() and (crit_period == 1).all()
        codes, _, periods, _ = classify_parameters(lams, max_iter=1000)
        assert (periods[codes == BASIN] == 1).all()
        # lam +/- i may wander far longer than the critical value (observed 78/81)
        assert (codes == BASIN).mean() > 0.9

    def test_slow_two_cycle_is_not_doubled(self):
        # multiplier -0.975: the orbit closes at lag 4 before lag 2
        lam = -0.10945
        res = iterate_orbit(lam, lam + 1j, 3000)
        assert res.period == 2 and abs(abs(res.cycle.multiplier) - 0.97473) < 1e-4
        assert classify_orbits(lam, np.array([lam + 1j]), 3000)[2][0] == 2

    def test_matches_scalar_fate(self):
        rng = np.random.default_rng(1)
        lams = rng.uniform(-8, 8, 60) + 1j * rng.uniform(-8, 8, 60)
        codes, _, _, flags = classify_parameters(lams)
        for lam, code, flag in zip(lams, codes, flags):
            fate = singular_orbit_fate(complex(lam), 100)
            assert (code == BASIN) == fate.hyperbolic
            assert flag == fate.cantor_signature


class TestRegion:
    def test_membership(self):
        a1 = RegionAi(1, 16)
        assert a1.contains(5 + 4j) and not a1.contains(4 + 4j)
        assert not a1.contains(-5 - 4j)
        assert RegionAi(3, 16).contains(-5 - 4j)
        assert RegionAi(2, 1).contains(-2 + 1j) and RegionAi(4, 1).contains(2 - 1j)
        with pytest.raises(ValueError):
            RegionAi(5, 1)
        with pytest.raises(ValueError):
            RegionAi(1, 0)

    def test_arc(self):
        arc = planes.hyperbola_arc(2, 12.0, 10.0, 32)
        assert np.allclose(arc.real * arc.imag, -12.0)
        assert (np.abs(arc) <= 10 + 1e-9).all()
        assert planes.hyperbola_arc(1, 60.0, 10.0).size == 0

    def test_threshold_quadrant_one(self):
        scan = scan_region_threshold(1, 10.0, 0.5)
        assert scan.threshold <= 16
        assert scan.passed[scan.levels >= scan.threshold].all()
        # below the estimate at least the next lower arc fails
        below = scan.levels < scan.threshold
        assert not scan.passed[below][-1]

    def test_quadrant_values(self):
        # observed: conjugation pairs quadrants 1/4 and 2/3; 1 and 3 differ
        t = {q: planes.estimate_region_threshold(q) for q in (1, 2, 3, 4)}
        assert t[1] == t[4] == 10.0
        assert t[2] == t[3] == 11.5

    def test_invalid_bounds(self):
        with pytest.raises(ValueError):
            scan_region_threshold(1, 0, 0.5)


class TestComponents:
    def test_against_bfs(self):
        rng = np.random.default_rng(2)
        for density in (0.3, 0.5, 0.6):
            codes = (rng.uniform(size=(40, 50)) < density).astype(np.uint8)
            sizes = bfs_components(codes == 1)
            count, frac = component_count(raster_of(codes), 1)
            assert count == len(sizes)
            assert frac == max(sizes) / sum(sizes)

    def test_single_class(self):
        assert component_count(raster_of(np.zeros((7, 9))), 0) == (1, 1.0)

    def test_checkerboard(self):
        board = (np.indices((10, 12)).sum(axis=0) % 2).astype(np.uint8)
        count, frac = component_count(raster_of(board), 1)
        assert count == 60 and frac == 1 / 60

    def test_absent_class(self):
        assert component_count(raster_of(np.zeros((3, 3))), 2) == (0, 0.0)
