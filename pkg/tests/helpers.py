"""Shared fixtures-by-function for the test suite."""

import numpy as np

import spinwigner as sw

_OMEGA_CACHE: dict[int, sw.OmegaMap] = {}


def omega(n: int) -> sw.OmegaMap:
    if n not in _OMEGA_CACHE:
        _OMEGA_CACHE[n] = sw.construct_omega(sw.decompose_angular_basis(n))
    return _OMEGA_CACHE[n]


def basis_vector(n: int, index: int) -> np.ndarray:
    v = np.zeros(2**n, dtype=complex)
    v[index] = 1.0
    return v


def singlet_vector() -> np.ndarray:
    """Two-spin singlet (|ud> - |du>) / sqrt2 in the bit-string basis."""
    v = np.zeros(4, dtype=complex)
    v[0b10] = 1.0 / np.sqrt(2.0)
    v[0b01] = -1.0 / np.sqrt(2.0)
    return v


def push_pure(n: int, vec: np.ndarray) -> sw.OscillatorDensity:
    return sw.push_density(omega(n), np.outer(vec, vec.conj()))


def nonreducible_two_spin_operator() -> np.ndarray:
    """|uu>(<ud| - <du|)/sqrt2: does not commute with total spin squared."""
    a = np.zeros((4, 4), dtype=complex)
    a[0b11, 0b10] = 1.0 / np.sqrt(2.0)
    a[0b11, 0b01] = -1.0 / np.sqrt(2.0)
    return a
