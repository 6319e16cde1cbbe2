"""Canonical map from the N-spin space into a truncated two-mode Fock space.

The truncated Fock basis enumerates pairs (n1, n2) with n1 + n2 <= cutoff,
ordered by total excitation and then by n1, so index 0 is (0, 0). A basis
vector |k, l, m> from the selected degeneracy tower of each shell is sent
to |l+m, l-m>; all other towers are annihilated. The embedding intertwines
the collective spin components with their two-mode bilinear counterparts
and its Gram matrix is an orthogonal projector onto the represented
subspace.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import NumericError, ValidationError
from .spin_core import AngularBasis, _collective, _readonly, _total_squared

_HERM_TOL = 1e-10
_PSD_TOL = 1e-10
_TRACE_TOL = 1e-10
_INTERTWINE_TOL = 1e-9
#: Spin-space commutator threshold below which an operator counts as
#: compatible with the three-variable reduction.
S2_COMMUTE_TOL = 1e-9


@lru_cache(maxsize=64)
def fock_states(cutoff: int) -> tuple[tuple[int, int], ...]:
    """Ordered truncated basis: (n1, n2) with n1 + n2 <= cutoff."""
    return tuple((n1, total - n1) for total in range(cutoff + 1) for n1 in range(total + 1))


@lru_cache(maxsize=64)
def fock_index(cutoff: int) -> dict[tuple[int, int], int]:
    return {pair: i for i, pair in enumerate(fock_states(cutoff))}


@lru_cache(maxsize=64)
def _lowering(cutoff: int, mode: int) -> np.ndarray:
    """Annihilation matrix for one mode on the truncated basis."""
    states = fock_states(cutoff)
    index = fock_index(cutoff)
    size = len(states)
    a = np.zeros((size, size), dtype=complex)
    for i, (n1, n2) in enumerate(states):
        occ = (n1, n2)[mode]
        if occ > 0:
            dst = (n1 - 1, n2) if mode == 0 else (n1, n2 - 1)
            a[index[dst], i] = np.sqrt(occ)
    return _readonly(a)


def jordan_schwinger(fock_cutoff: int, axis: int) -> np.ndarray:
    """Angular-momentum component as a two-mode ladder bilinear.

    The bilinears conserve total excitation, so on the truncated basis the
    su(2) commutation relations hold to machine precision everywhere.
    """
    if fock_cutoff < 1:
        raise ValidationError(f"fock_cutoff must be >= 1, got {fock_cutoff}")
    if axis not in (1, 2, 3):
        raise ValidationError(f"axis must be 1, 2 or 3, got {axis!r}")
    a1 = _lowering(fock_cutoff, 0)
    a2 = _lowering(fock_cutoff, 1)
    jp = a1.conj().T @ a2
    jm = a2.conj().T @ a1
    if axis == 1:
        return (jp + jm) / 2.0
    if axis == 2:
        return (jp - jm) / 2.0j
    return (a1.conj().T @ a1 - a2.conj().T @ a2) / 2.0


def jordan_schwinger_squared(fock_cutoff: int) -> np.ndarray:
    """Two-mode counterpart of total spin squared."""
    j1, j2, j3 = (jordan_schwinger(fock_cutoff, ax) for ax in (1, 2, 3))
    return j1 @ j1 + j2 @ j2 + j3 @ j3


@dataclass(frozen=True)
class OmegaMap:
    """Linear map coefficients against the truncated Fock basis.

    ``coefficients[f, j]`` is the amplitude of Fock basis state f in the
    image of computational basis state j.
    """

    n: int
    fock_cutoff: int
    coefficients: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coefficients, dtype=complex)
        expect = (len(fock_states(self.fock_cutoff)), 2**self.n)
        if c.shape != expect:
            raise ValidationError(f"coefficient shape {c.shape}, expected {expect}")
        object.__setattr__(self, "coefficients", _readonly(c))

    @property
    def represented_rank(self) -> int:
        """Rank of the Gram projector: one (2l+1) block per distinct shell."""
        return sum(two_l + 1 for two_l in range(self.n, (self.n % 2) - 1, -2))

    def gram(self) -> np.ndarray:
        return self.coefficients.conj().T @ self.coefficients


@dataclass(frozen=True)
class OscillatorDensity:
    """Operator pushed onto the truncated Fock basis.

    ``elements[f, g]`` holds <f| (pushed operator) |g>. The spin-space
    commutator with S^2 is checked before pushing; its residual and the
    represented trace travel with the object so downstream code can refuse
    or report without re-deriving them.
    """

    n: int
    elements: np.ndarray
    represented_trace: float
    s2_residual: float

    def __post_init__(self):
        e = np.asarray(self.elements, dtype=complex)
        size = len(fock_states(self.n))
        if e.shape != (size, size):
            raise ValidationError(f"element matrix shape {e.shape}, expected ({size}, {size})")
        object.__setattr__(self, "elements", _readonly(e))

    @property
    def fock_cutoff(self) -> int:
        return self.n

    @property
    def commutes_with_s2(self) -> bool:
        return self.s2_residual <= S2_COMMUTE_TOL

    @property
    def is_hermitian(self) -> bool:
        return bool(np.max(np.abs(self.elements - self.elements.conj().T)) <= 1e-12)

    @classmethod
    def from_fock_elements(cls, n: int, elements: np.ndarray) -> "OscillatorDensity":
        """Wrap a raw Fock-basis matrix, deriving the compatibility residual.

        An operator commutes with total spin squared exactly when it is
        block diagonal in total excitation, so the residual can be read off
        the cross-block entries directly.
        """
        e = np.asarray(elements, dtype=complex)
        states = fock_states(n)
        totals = np.array([a + b for a, b in states], dtype=float)
        lvals = totals / 2.0
        casimir = lvals * (lvals + 1.0)
        residual = float(np.max(np.abs((casimir[:, None] - casimir[None, :]) * e), initial=0.0))
        return cls(n, e, float(np.trace(e).real), residual)


def construct_omega(basis: AngularBasis,
                    shell_mixing: dict[int, np.ndarray] | None = None) -> OmegaMap:
    """Build the canonical embedding from a labelled eigenbasis.

    By default the first degeneracy tower (k = 0) of each shell is the one
    represented. ``shell_mixing`` optionally supplies, per doubled shell
    label, a unitary that remixes the degenerate towers first; row 0 of the
    unitary then defines the represented tower. The intertwining property
    is verified before returning.
    """
    n = basis.n
    index = fock_index(n)
    size = len(fock_states(n))
    coeff = np.zeros((size, 2**n), dtype=complex)

    mixing = shell_mixing or {}
    for two_l, u in mixing.items():
        u = np.asarray(u, dtype=complex)
        d = u.shape[0]
        if u.shape != (d, d) or np.max(np.abs(u.conj().T @ u - np.eye(d))) > 1e-12:
            raise ValidationError(f"shell_mixing[{two_l}] is not unitary")

    for entry in basis.entries:
        u = mixing.get(entry.two_l)
        if u is None:
            weight = 1.0 + 0.0j if entry.k == 0 else 0.0j
        else:
            if entry.k >= u.shape[0]:
                raise ValidationError(
                    f"shell_mixing[{entry.two_l}] has size {u.shape[0]}, "
                    f"but tower index {entry.k} occurs"
                )
            weight = u[0, entry.k].conjugate()
        if weight == 0.0:
            continue
        f = index[((entry.two_l + entry.two_m) // 2, (entry.two_l - entry.two_m) // 2)]
        coeff[f, :] += weight * entry.state.amplitudes.conj()

    omega = OmegaMap(n, n, coeff)
    residual = intertwining_residual(omega)
    if residual > _INTERTWINE_TOL:
        raise NumericError(
            f"intertwining residual {residual:.3e} exceeds {_INTERTWINE_TOL:.0e}; "
            "the supplied basis is inconsistent"
        )
    return omega


def intertwining_residual(omega: OmegaMap) -> float:
    """Max entrywise deviation between mapped spin action and ladder action."""
    c = omega.coefficients
    res = 0.0
    for axis in (1, 2, 3):
        lhs = c @ _collective(omega.n, axis)
        rhs = jordan_schwinger(omega.fock_cutoff, axis) @ c
        res = max(res, float(np.max(np.abs(lhs - rhs))))
    return res


def _push(omega: OmegaMap, op: np.ndarray) -> OscillatorDensity:
    s2 = _total_squared(omega.n)
    residual = float(np.max(np.abs(op @ s2 - s2 @ op)))
    elements = omega.coefficients @ op @ omega.coefficients.conj().T
    return OscillatorDensity(omega.n, elements, float(np.trace(elements).real), residual)


def push_operator(omega: OmegaMap, op: np.ndarray) -> OscillatorDensity:
    """Push an arbitrary spin-space operator through the embedding."""
    op = np.asarray(op, dtype=complex)
    dim = 2**omega.n
    if op.shape != (dim, dim):
        raise ValidationError(f"operator shape {op.shape}, expected ({dim}, {dim})")
    return _push(omega, op)


def push_density(omega: OmegaMap, rho: np.ndarray) -> OscillatorDensity:
    """Push a density operator, validating hermiticity, positivity and trace.

    The represented trace of the result may be below 1: weight carried by
    discarded degeneracy towers is lost, and callers should inspect
    ``represented_trace`` to detect that.
    """
    rho = np.asarray(rho, dtype=complex)
    dim = 2**omega.n
    if rho.shape != (dim, dim):
        raise ValidationError(f"density shape {rho.shape}, expected ({dim}, {dim})")
    herm = float(np.max(np.abs(rho - rho.conj().T)))
    if herm > _HERM_TOL:
        raise ValidationError(f"density is not Hermitian (max deviation {herm:.3e})")
    tr = complex(np.trace(rho))
    if abs(tr - 1.0) > _TRACE_TOL:
        raise ValidationError(f"density trace {tr!r} is not 1 within {_TRACE_TOL}")
    lowest = float(np.linalg.eigvalsh((rho + rho.conj().T) / 2.0)[0])
    if lowest < -_PSD_TOL:
        raise ValidationError(f"density has negative eigenvalue {lowest:.3e}")
    return _push(omega, rho)
