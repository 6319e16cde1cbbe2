"""Builders for the state families used throughout: Fock-like ladder
states, spin-coherent states, cat states, statistical mixtures and
squeezed states.

Spin-coherent convention: the single-site state is
cos(theta/2)|up> + exp(i phi) sin(theta/2)|down>, tensored over all sites.
Only relative phases of superpositions depend on this choice.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import expm

from .errors import NumericError, ValidationError
from .spin_core import SpinState, ladder

_WEIGHT_TOL = 1e-12


def fock_state(n: int, k: int) -> SpinState:
    """Normalized k-fold raised all-down state; an S_3 eigenstate with
    m = k - n/2 in the outer shell."""
    if not 0 <= k <= n:
        raise ValidationError(f"excitation count {k} outside 0..{n}")
    vec = np.zeros(2**n, dtype=complex)
    vec[0] = 1.0  # all spins down
    sp = ladder(n, "raise").matrix
    for _ in range(k):
        vec = sp @ vec
    return SpinState(n, vec / np.linalg.norm(vec))


def spin_coherent(n: int, theta: float, phi: float) -> SpinState:
    """Tensor power of one rotated spin; lives in the outer shell."""
    if n < 1:
        raise ValidationError(f"spin count must be >= 1, got {n}")
    single = np.array([np.exp(1j * phi) * np.sin(theta / 2.0), np.cos(theta / 2.0)],
                      dtype=complex)  # index 0 = down, 1 = up
    amps = np.array([1.0 + 0.0j])
    for _ in range(n):
        amps = np.kron(amps, single)
    return SpinState(n, amps / np.linalg.norm(amps))


def cat_state(n: int) -> SpinState:
    """Equal superposition of all-up and all-down."""
    if n < 1:
        raise ValidationError(f"spin count must be >= 1, got {n}")
    vec = np.zeros(2**n, dtype=complex)
    vec[0] = vec[-1] = 1.0 / np.sqrt(2.0)
    return SpinState(n, vec)


def mixture(components: list[tuple[float, SpinState]]) -> np.ndarray:
    """Convex mixture of pure states as a density matrix."""
    if not components:
        raise ValidationError("mixture needs at least one component")
    weights = [w for w, _ in components]
    if min(weights) < -_WEIGHT_TOL:
        raise ValidationError(f"negative mixture weight {min(weights)!r}")
    if abs(sum(weights) - 1.0) > _WEIGHT_TOL:
        raise ValidationError(f"mixture weights sum to {sum(weights)!r}, not 1")
    n = components[0][1].n
    rho = np.zeros((2**n, 2**n), dtype=complex)
    for w, state in components:
        if state.n != n:
            raise ValidationError("mixture components act on different spin counts")
        rho += w * state.density
    return rho


def squeezed_state(n: int, beta: complex, base: SpinState) -> SpinState:
    """Unitary squeezing of a base state.

    Applies the exponential of beta S_+^2 - conj(beta) S_-^2. The generator
    is anti-Hermitian, so the result stays normalized; since the ladder
    operators commute with total spin squared, an outer-shell base stays in
    the outer shell.
    """
    if base.n != n:
        raise ValidationError(f"base state has {base.n} spins, expected {n}")
    sp = ladder(n, "raise").matrix
    sm = sp.conj().T
    gen = beta * (sp @ sp) - np.conjugate(beta) * (sm @ sm)
    vec = expm(gen) @ base.amplitudes
    nrm = np.linalg.norm(vec)
    if abs(nrm - 1.0) > 1e-10:
        raise NumericError(f"squeezing exponential drifted the norm to {nrm!r}")
    return SpinState(n, vec / nrm)


@dataclass(frozen=True)
class StateSpec:
    """Parsed description of a state or operator to evaluate.

    ``kind`` is one of fock, coherent, cat, mixture, squeezed, raw or
    operator; the remaining fields are kind-specific. ``operator`` carries
    a raw matrix and is the only kind that may describe something other
    than a density operator.
    """

    kind: str
    n: int
    excitations: int | None = None
    theta: float | None = None
    phi: float | None = None
    beta: complex | None = None
    base_theta: float = 0.0
    base_phi: float = 0.0
    components: tuple[tuple[float, "StateSpec"], ...] = field(default=())
    amplitudes: tuple[complex, ...] = field(default=())
    matrix: tuple[tuple[complex, ...], ...] = field(default=())

    def describe(self) -> str:
        """Stable one-line summary used in output headers."""
        bits = [f"kind={self.kind}", f"spins={self.n}"]
        if self.kind == "fock":
            bits.append(f"excitations={self.excitations}")
        elif self.kind == "coherent":
            bits.append(f"theta={self.theta:.12g} phi={self.phi:.12g}")
        elif self.kind == "squeezed":
            bits.append(f"beta={self.beta.real:.12g}{self.beta.imag:+.12g}j "
                        f"base_theta={self.base_theta:.12g} base_phi={self.base_phi:.12g}")
        elif self.kind == "mixture":
            inner = "; ".join(f"{w:.12g}*({c.describe()})" for w, c in self.components)
            bits.append(f"components=[{inner}]")
        elif self.kind == "raw":
            bits.append(f"amplitudes={len(self.amplitudes)}")
        elif self.kind == "operator":
            bits.append(f"rows={len(self.matrix)}")
        return " ".join(bits)


def realize_state(spec: StateSpec) -> SpinState:
    """Build the pure state a spec describes; mixtures and operators refuse."""
    if spec.kind == "fock":
        return fock_state(spec.n, spec.excitations)
    if spec.kind == "coherent":
        return spin_coherent(spec.n, spec.theta, spec.phi)
    if spec.kind == "cat":
        return cat_state(spec.n)
    if spec.kind == "squeezed":
        base = spin_coherent(spec.n, spec.base_theta, spec.base_phi)
        return squeezed_state(spec.n, spec.beta, base)
    if spec.kind == "raw":
        return SpinState(spec.n, np.array(spec.amplitudes, dtype=complex))
    raise ValidationError(f"spec kind {spec.kind!r} does not describe a pure state")


def realize_operator(spec: StateSpec) -> np.ndarray:
    """Build the operator a spec describes: a density matrix for state
    kinds, the raw matrix for the operator kind."""
    if spec.kind == "mixture":
        return mixture([(w, realize_state(c)) for w, c in spec.components])
    if spec.kind == "operator":
        mat = np.array(spec.matrix, dtype=complex)
        dim = 2**spec.n
        if mat.shape != (dim, dim):
            raise ValidationError(f"operator matrix shape {mat.shape}, expected ({dim}, {dim})")
        return mat
    return realize_state(spec).density
