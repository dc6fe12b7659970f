import cmath
import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tanlab import mapcore
from tanlab.errors import DomainError, PoleProximityError
from tanlab.mapcore import (
    INFINITY,
    MapParameter,
    derivative,
    evaluate,
    nearest_pole_index,
    pole_index,
    pole_point,
    singular_values,
    zero_point,
)

from conftest import SQRT_PI_2, SQRT_PI_4


def mp_f(lam, z, dps=60):
    with mpmath.workdps(dps):
        z = mpmath.mpc(z)
        return mpmath.mpc(lam) + mpmath.tan(z * z)


def mp_df(z, dps=60):
    with mpmath.workdps(dps):
        z = mpmath.mpc(z)
        return 2 * z * mpmath.sec(z * z) ** 2


class TestEvaluate:
    def test_origin_maps_to_lambda(self):
        assert evaluate(4 + 4j, 0) == 4 + 4j

    def test_tan_pi_over_4(self):
        assert abs(evaluate(0, SQRT_PI_4) - 1.0) < 1e-12

    def test_pole(self):
        assert evaluate(0, SQRT_PI_2) is INFINITY

    def test_asymptotic_tract(self):
        # Im((4+5i)^2) = 40; oracle: 60-digit tan
        val = evaluate(4 + 4j, 4 + 5j)
        assert abs(val - (4 + 5j)) < 1e-30
        assert abs(complex(mp_f(4 + 4j, 4 + 5j)) - val) < 1e-30

    def test_infinity_is_outside_domain(self):
        with pytest.raises(DomainError):
            evaluate(0, INFINITY)

    def test_overflowing_square_saturates(self):
        assert evaluate(1j, 1e200 + 1e200j) == 2j
        assert evaluate(1j, 1e200 - 1e200j) == 0j
        assert evaluate(0, 1e200) is INFINITY

    def test_real_input_stays_real(self):
        v = evaluate(0.1, 0.3)
        assert v.imag == 0.0

    def test_matches_high_precision_oracle(self):
        rng = np.random.default_rng(11)
        for _ in range(300):
            z = complex(rng.uniform(-3, 3), rng.uniform(-3, 3))
            if mapcore.pole_distance(z * z) < 1e-3:
                continue
            lam = complex(rng.uniform(-4, 4), rng.uniform(-4, 4))
            ref = complex(mp_f(lam, z))
            assert abs(evaluate(lam, z) - ref) <= 1e-12 * max(1.0, abs(ref))

    @pytest.mark.parametrize("im", [61.0, 100.0, 699.0, 701.0, 1e5])
    def test_saturation_bound(self, im):
        lam = 0.3 - 2j
        for sign in (1, -1):
            z = cmath.sqrt(complex(2.0, sign * im))
            target = lam + sign * 1j
            assert abs(evaluate(lam, z) - target) < 1e-20


class TestDerivative:
    def test_critical_point(self):
        assert derivative(3 - 1j, 0) == 0

    def test_at_sqrt_pi_4(self):
        d = derivative(0, SQRT_PI_4)
        assert abs(d - 4 * SQRT_PI_4) < 1e-12
        h = 1e-6
        fd = (evaluate(0, SQRT_PI_4 + h) - evaluate(0, SQRT_PI_4 - h)) / (2 * h)
        assert abs(fd - d) < 1e-6

    def test_tract_magnitude(self):
        d = derivative(4 + 4j, 4 + 5j)
        ref = complex(mp_df(4 + 5j))
        assert abs(d) < 1e-30
        assert abs(d - ref) <= 1e-12 * abs(ref)

    def test_pole_raises(self):
        with pytest.raises(PoleProximityError):
            derivative(0, SQRT_PI_2)


class TestZerosPoles:
    def test_zero_examples(self):
        assert abs(zero_point(2) - math.sqrt(math.pi)) < 1e-15
        assert zero_point(0) == 0
        assert abs(zero_point(1) - 1j * math.sqrt(math.pi)) < 1e-15
        assert zero_point(-2) == -zero_point(2)
        assert zero_point(-1) == -zero_point(1)

    def test_pole_examples(self):
        assert abs(pole_point(0) - SQRT_PI_2) < 1e-15
        assert abs(pole_point(2) - math.sqrt(1.5 * math.pi)) < 1e-15
        assert abs(pole_point(1) - 1j * SQRT_PI_2) < 1e-15
        assert abs(pole_point(-2) + SQRT_PI_2) < 1e-15
        assert abs(pole_point(-4) + math.sqrt(1.5 * math.pi)) < 1e-15

    def test_parity_axis(self):
        for n in range(-20, 21):
            p = pole_point(n)
            if n % 2 == 0:
                assert p.imag == 0
            else:
                assert p.real == 0

    @pytest.mark.parametrize("lam", [0, 4 + 4j, -1.5 + 0.2j, 0.3j])
    def test_zeros_map_to_lambda(self, lam):
        for n in range(-20, 21):
            assert abs(evaluate(lam, zero_point(n)) - lam) < 1e-12

    def test_poles_map_to_infinity(self):
        for n in range(-20, 21):
            assert evaluate(1 + 1j, pole_point(n)) is INFINITY

    def test_labels_distinct_and_inverse(self):
        pts = [pole_point(n) for n in range(-64, 65)]
        assert len(set(pts)) == len(pts)
        for n in range(-64, 65):
            assert pole_index(pole_point(n)) == n
            assert nearest_pole_index(pole_point(n) + 0.01) == n

    def test_pole_index_saturates(self):
        assert pole_index(pole_point(2) * 10) == mapcore.POLE_INDEX_SENTINEL


class TestSingularValues:
    def test_examples(self):
        assert singular_values(0) == [0, 1j, -1j]
        assert singular_values(4 + 4j) == [4 + 4j, 4 + 5j, 4 + 3j]

    def test_real_parameter_conjugate_pair(self):
        sv = singular_values(0.7)
        assert sv[1].conjugate() == sv[2]

    def test_parameter_invariants(self):
        p = MapParameter(2 - 3j)
        assert p.asymptotic_value_plus - p.asymptotic_value_minus == 2j
        assert p.critical_value == evaluate(p, 0)
        assert p.critical_point == 0


finite = st.floats(-3, 3, allow_nan=False)


@settings(max_examples=300, deadline=None)
@given(finite, finite, finite, finite)
def test_evenness_and_conjugation(x, y, a, b):
    z, lam = complex(x, y), complex(a, b)
    if mapcore.pole_distance(z * z) < 1e-6:
        return
    fz = evaluate(lam, z)
    assert evaluate(lam, -z) == fz
    assert abs(evaluate(lam.conjugate(), z.conjugate()) - fz.conjugate()) <= 1e-12 * abs(fz)
    d = derivative(lam, z)
    assert abs(derivative(lam.conjugate(), z.conjugate()) - d.conjugate()) <= 1e-12 * max(abs(d), 1e-300)


def test_array_matches_scalar():
    rng = np.random.default_rng(5)
    z = rng.uniform(-4, 4, 2000) + 1j * rng.uniform(-4, 4, 2000)
    z = np.concatenate([z, [pole_point(n) for n in range(-10, 11)], rng.uniform(-3, 3, 50)])
    lam = 0.5 - 1.5j
    vals, pole = mapcore.evaluate_array(lam, z)
    ders = mapcore.derivative_array(z)
    for v, p, d, zz in zip(vals, pole, ders, z):
        s = evaluate(lam, complex(zz))
        assert p == (s is INFINITY)
        if not p:
            assert abs(v - s) <= 1e-14 * max(1, abs(s))
            sd = derivative(lam, complex(zz))
            assert abs(d - sd) <= 1e-13 * max(1, abs(sd))
