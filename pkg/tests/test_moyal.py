import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.special import eval_genlaguerre

import spinwigner as sw
from spinwigner.omega_map import OscillatorDensity, fock_index

from helpers import basis_vector, nonreducible_two_spin_operator, omega, push_pure


def test_laguerre_hand_values():
    assert sw.laguerre(0, 0, 7.3) == 1.0
    assert sw.laguerre(1, 0, 2.0) == pytest.approx(-1.0, abs=1e-15)
    # quadratic: 1 - 2x + x^2/2 at x = 2
    x = 2.0
    assert sw.laguerre(2, 0, x) == pytest.approx(1.0 - 2.0 * x + x * x / 2.0, abs=1e-14)


def test_laguerre_against_scipy():
    rng = np.random.default_rng(5)
    for _ in range(100):
        deg = int(rng.integers(0, 11))
        order = int(rng.integers(0, 7))
        x = float(rng.uniform(0.0, 50.0))
        mine = sw.laguerre(deg, order, x)
        ref = eval_genlaguerre(deg, order, x)
        assert mine == pytest.approx(ref, rel=1e-10, abs=1e-10)


def test_laguerre_array_argument():
    x = np.linspace(0.0, 5.0, 7)
    vals = sw.laguerre(3, 2, x)
    assert vals.shape == x.shape
    assert np.allclose(vals, eval_genlaguerre(3, 2, x), atol=1e-12)


def test_moyal_origin_values():
    assert sw.moyal_1d(0, 0, 0.0, 0.0) == pytest.approx(1.0 / math.pi, abs=1e-15)
    assert sw.moyal_1d(1, 1, 0.0, 0.0) == pytest.approx(-1.0 / math.pi, abs=1e-15)


def test_moyal_first_off_diagonal_closed_form():
    # W_{01}(q, p) = sqrt2/pi (q - i p) exp(-(q^2+p^2)): checked against the
    # defining integral by hand
    q, p = 0.6, -1.3
    expect = math.sqrt(2.0) / math.pi * (q - 1j * p) * math.exp(-(q * q + p * p))
    assert sw.moyal_1d(0, 1, q, p) == pytest.approx(expect, abs=1e-15)


@settings(max_examples=60, deadline=None)
@given(
    n=st.integers(0, 6), n_prime=st.integers(0, 6),
    q=st.floats(-3, 3), p=st.floats(-3, 3),
)
def test_moyal_hermiticity(n, n_prime, q, p):
    a = sw.moyal_1d(n, n_prime, q, p)
    b = sw.moyal_1d(n_prime, n, q, p)
    assert abs(a - np.conjugate(b)) <= 1e-12


def _phase_grid(half_width=7.0, points=141):
    q = np.linspace(-half_width, half_width, points)
    h = q[1] - q[0]
    w = np.full(points, h)
    w[0] *= 0.5
    w[-1] *= 0.5
    qq, pp = np.meshgrid(q, q, indexing="ij")
    ww = np.outer(w, w)
    return qq, pp, ww


def test_moyal_normalization():
    qq, pp, ww = _phase_grid()
    for n in range(7):
        integral = np.sum(sw.moyal_1d(n, n, qq, pp).real * ww)
        assert integral == pytest.approx(1.0, abs=1e-8)


def test_moyal_orthogonality():
    qq, pp, ww = _phase_grid()
    table = {(n, npr): sw.moyal_1d(n, npr, qq, pp) for n in range(4) for npr in range(4)}
    for n in range(4):
        for npr in range(4):
            for m in range(4):
                for mpr in range(4):
                    val = 2.0 * math.pi * np.sum(table[(n, npr)] * np.conj(table[(m, mpr)]) * ww)
                    expect = 1.0 if (n == m and npr == mpr) else 0.0
                    assert abs(val - expect) <= 1e-6


def test_wigner_up_state_origin():
    d = push_pure(1, basis_vector(1, 1))
    assert sw.wigner_4d(d, sw.PhasePoint4(0, 0, 0, 0)) == pytest.approx(-1.0 / math.pi**2, abs=1e-14)


def test_wigner_nonreducible_operator_closed_form():
    d = sw.push_operator(omega(2), nonreducible_two_spin_operator())
    val = sw.wigner_4d_complex(d, sw.PhasePoint4(1.0, 0.0, 0.0, 0.0))
    assert val == pytest.approx(math.sqrt(2.0) / math.pi**2 * math.exp(-1.0), abs=1e-14)
    q1, p1, q2, p2 = 0.4, -0.8, 1.1, 0.25
    r = q1 * q1 + p1 * p1 + q2 * q2 + p2 * p2
    expect = math.sqrt(2.0) / math.pi**2 * math.exp(-r) * (q1 - 1j * p1) ** 2
    got = sw.wigner_4d_complex(d, sw.PhasePoint4(q1, p1, q2, p2))
    assert got == pytest.approx(expect, abs=1e-14)


def test_wigner_zero_density():
    size = len(sw.fock_states(2))
    d = OscillatorDensity.from_fock_elements(2, np.zeros((size, size)))
    pts = np.random.default_rng(0).uniform(-2, 2, size=(10, 4))
    vals = sw.wigner_4d_many(d, *pts.T)
    assert np.all(vals == 0.0)


def test_wigner_rejects_non_hermitian():
    d = sw.push_operator(omega(2), nonreducible_two_spin_operator())
    with pytest.raises(sw.NumericError):
        sw.wigner_4d(d, sw.PhasePoint4(0.4, -0.8, 1.1, 0.25))


def test_phase_point_validation():
    with pytest.raises(sw.ValidationError):
        sw.PhasePoint4(0.0, math.inf, 0.0, 0.0)
    with pytest.raises(sw.ValidationError):
        sw.PhasePoint3(math.nan, 0.0, 0.0)


def test_oracle_matches_moyal_sum_one_spin():
    d = push_pure(1, basis_vector(1, 1))
    rng = np.random.default_rng(20)
    for _ in range(20):
        pt = sw.PhasePoint4(*rng.uniform(-2.5, 2.5, size=4))
        assert abs(sw.wigner_4d(d, pt) - sw.oracle_wigner_integral(d, pt)) <= 1e-6


def test_oracle_ground_state_origin():
    size = len(sw.fock_states(1))
    e = np.zeros((size, size), dtype=complex)
    e[fock_index(1)[(0, 0)], fock_index(1)[(0, 0)]] = 1.0
    d = OscillatorDensity.from_fock_elements(1, e)
    val = sw.oracle_wigner_integral(d, sw.PhasePoint4(0, 0, 0, 0))
    assert val == pytest.approx(1.0 / math.pi**2, abs=1e-8)


def test_oracle_singlet_gaussian():
    from helpers import singlet_vector

    d = push_pure(2, singlet_vector())
    rng = np.random.default_rng(21)
    for _ in range(5):
        q1, p1, q2, p2 = rng.uniform(-1.5, 1.5, size=4)
        r = q1 * q1 + p1 * p1 + q2 * q2 + p2 * p2
        val = sw.oracle_wigner_integral(d, sw.PhasePoint4(q1, p1, q2, p2))
        assert val == pytest.approx(math.exp(-r) / math.pi**2, abs=1e-7)


def test_oracle_five_excitation_support():
    d = push_pure(5, sw.fock_state(5, 2).amplitudes)
    rng = np.random.default_rng(22)
    for _ in range(4):
        pt = sw.PhasePoint4(*rng.uniform(-2.0, 2.0, size=4))
        assert abs(sw.wigner_4d(d, pt) - sw.oracle_wigner_integral(d, pt)) <= 1e-6


def test_oracle_reports_non_convergence():
    d = push_pure(1, basis_vector(1, 1))
    with pytest.raises(sw.NumericError, match="converge"):
        sw.oracle_wigner_integral(d, sw.PhasePoint4(0.5, 0.1, 0.0, 0.0),
                                  initial_points=5, max_refinements=0)
