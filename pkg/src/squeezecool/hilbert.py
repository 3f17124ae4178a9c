"""Truncated Fock-space operator algebra for bosonic modes, optionally with a qubit.

Basis ordering convention (fixed for the whole package): the qubit factor comes
first, then modes in ascending index; within each factor states are ordered by
ascending occupation.  The qubit basis is (|0>, |1>) with sigma_z = diag(-1, +1),
so |0> is the ground state.

Operators are dense complex matrices; spaces in this package stay small
(total dimension <= ~4096), so no sparse storage is needed here.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import lgamma

import numpy as np

#: population of the top two Fock levels above which a reported state is
#: flagged as truncation-inadequate
TRUNCATION_FLAG_THRESHOLD = 1e-8

BOGOLIUBOV_TOL = 1e-12


@dataclass(frozen=True)
class FockSpace:
    """Tensor product of truncated bosonic modes, optionally prefixed by a qubit."""

    mode_dims: tuple[int, ...]
    has_qubit: bool = False

    def __post_init__(self):
        object.__setattr__(self, "mode_dims", tuple(int(d) for d in self.mode_dims))
        if any(d < 2 for d in self.mode_dims):
            raise ValueError(f"every mode dimension must be >= 2, got {self.mode_dims}")

    @property
    def n_modes(self) -> int:
        return len(self.mode_dims)

    @property
    def dim(self) -> int:
        d = 2 if self.has_qubit else 1
        for m in self.mode_dims:
            d *= m
        return d

    def factor_dims(self) -> tuple[int, ...]:
        """Dimensions of all tensor factors in basis order (qubit first)."""
        return ((2,) if self.has_qubit else ()) + self.mode_dims


@dataclass
class Op:
    """A dense operator together with the space it acts on."""

    space: FockSpace
    matrix: np.ndarray

    def __post_init__(self):
        self.matrix = np.asarray(self.matrix, dtype=complex)
        if self.matrix.shape != (self.space.dim, self.space.dim):
            raise ValueError(
                f"matrix shape {self.matrix.shape} does not match space dim {self.space.dim}"
            )

    def dag(self) -> "Op":
        return Op(self.space, self.matrix.conj().T)

    def _check(self, other: "Op"):
        if self.space != other.space:
            raise ValueError("operators act on different FockSpaces")

    def __matmul__(self, other: "Op") -> "Op":
        self._check(other)
        return Op(self.space, self.matrix @ other.matrix)

    def __add__(self, other: "Op") -> "Op":
        self._check(other)
        return Op(self.space, self.matrix + other.matrix)

    def __sub__(self, other: "Op") -> "Op":
        self._check(other)
        return Op(self.space, self.matrix - other.matrix)

    def __mul__(self, scalar: complex) -> "Op":
        return Op(self.space, scalar * self.matrix)

    __rmul__ = __mul__

    def commutator(self, other: "Op") -> "Op":
        return self @ other - other @ self

    def expect(self, state: np.ndarray) -> complex:
        """<psi|O|psi> for a vector, or tr(O rho) for a square matrix."""
        state = np.asarray(state, dtype=complex)
        if state.ndim == 1:
            return complex(np.vdot(state, self.matrix @ state))
        return complex(np.trace(self.matrix @ state))


@dataclass(frozen=True)
class BogoliubovPair:
    """(u, v, gbar) defining a squeezing jump operator D = u*a + v*b_dagger.

    u^2 - v^2 = 1 is required (canonical commutator preservation); gbar is the
    effective coupling strength attached to the pair, in GHz.
    """

    u: float
    v: float
    gbar: float = field(default=0.0)

    def __post_init__(self):
        if self.u < 0 or self.v < 0 or self.gbar < 0:
            raise ValueError("u, v, gbar must be non-negative")
        if abs(self.u**2 - self.v**2 - 1.0) > BOGOLIUBOV_TOL:
            raise ValueError(
                f"Bogoliubov identity violated: u^2 - v^2 = {self.u**2 - self.v**2!r}"
            )

    @property
    def r(self) -> float:
        """Squeezing parameter, exp(r) = u + v."""
        return float(np.log(self.u + self.v))


def pair_from_r(r: float, gbar: float = 0.0) -> BogoliubovPair:
    return BogoliubovPair(u=float(np.cosh(r)), v=float(np.sinh(r)), gbar=gbar)


def _embed(space: FockSpace, factor_index: int, small: np.ndarray) -> np.ndarray:
    """Embed a single-factor matrix by identity on all other factors."""
    dims = space.factor_dims()
    out = np.array([[1.0 + 0j]])
    for k, d in enumerate(dims):
        out = np.kron(out, small if k == factor_index else np.eye(d))
    return out


def identity(space: FockSpace) -> Op:
    return Op(space, np.eye(space.dim))


def _ladder(dim: int) -> np.ndarray:
    """Annihilation matrix, <n-1|a|n> = sqrt(n)."""
    a = np.zeros((dim, dim), dtype=complex)
    for n in range(1, dim):
        a[n - 1, n] = np.sqrt(n)
    return a


def destroy(space: FockSpace, mode_index: int) -> Op:
    """Annihilation operator of one mode, identity on all other factors."""
    if not 0 <= mode_index < space.n_modes:
        raise ValueError(f"mode index {mode_index} out of range for {space.n_modes} modes")
    factor = mode_index + (1 if space.has_qubit else 0)
    return Op(space, _embed(space, factor, _ladder(space.mode_dims[mode_index])))


def number(space: FockSpace, mode_index: int) -> Op:
    a = destroy(space, mode_index)
    return a.dag() @ a


def qubit_lower(space: FockSpace) -> Op:
    """sigma_minus on the qubit factor: sigma_minus |1> = |0>."""
    if not space.has_qubit:
        raise ValueError("space has no qubit factor")
    sm = np.array([[0, 1], [0, 0]], dtype=complex)
    return Op(space, _embed(space, 0, sm))


def qubit_z(space: FockSpace) -> Op:
    """sigma_z on the qubit factor, diag(-1, +1) in the (|0>, |1>) basis."""
    if not space.has_qubit:
        raise ValueError("space has no qubit factor")
    sz = np.diag([-1.0, 1.0]).astype(complex)
    return Op(space, _embed(space, 0, sz))


def bogoliubov_op(
    space: FockSpace,
    pair: BogoliubovPair,
    mode_a: int,
    mode_b: int | None = None,
) -> Op:
    """u * a_{mode_a} + v * a_dagger_{mode_b}.

    With mode_b omitted or equal to mode_a this is the single-mode squeezing
    operator D = u*a + v*a_dagger.
    """
    if mode_b is None:
        mode_b = mode_a
    a = destroy(space, mode_a)
    b = destroy(space, mode_b)
    return pair.u * a + pair.v * b.dag()


def _squeezed_amplitudes_single(dim: int, r: float) -> np.ndarray:
    """Fock amplitudes of the single-mode squeezed vacuum, cosh(r)=u, sinh(r)=v."""
    t = np.tanh(r)
    amps = np.zeros(dim)
    for n in range(0, dim, 2):
        k = n // 2
        # sqrt((2k)!)/(2^k k!), computed in log space to stay finite
        log_comb = 0.5 * lgamma(2 * k + 1) - k * np.log(2.0) - lgamma(k + 1)
        amps[n] = (-t) ** k * np.exp(log_comb)
    return amps / np.sqrt(np.cosh(r))


def _squeezed_amplitudes_two_mode(dim_a: int, dim_b: int, r: float) -> np.ndarray:
    """Amplitudes on |n, n> for the two-mode squeezed vacuum."""
    t = np.tanh(r)
    nmax = min(dim_a, dim_b)
    vec = np.zeros(dim_a * dim_b)
    for n in range(nmax):
        vec[n * dim_b + n] = (-t) ** n
    return vec / np.cosh(r)


def squeezed_vacuum(
    space: FockSpace,
    r: float,
    two_mode: bool = False,
    cutoff_tol: float = 1e-10,
) -> np.ndarray:
    """Normalized squeezed vacuum annihilated by the (u, v) squeezing operator.

    Raises if the analytic amplitude at the truncation cutoff exceeds
    ``cutoff_tol`` (truncation too small for the requested squeezing).
    """
    if space.has_qubit:
        raise ValueError("squeezed_vacuum expects a purely bosonic space")
    if two_mode:
        if space.n_modes != 2:
            raise ValueError("two-mode squeezed vacuum needs exactly 2 modes")
        da, db = space.mode_dims
        vec = _squeezed_amplitudes_two_mode(da, db, r)
        edge = abs(vec[(min(da, db) - 1) * db + (min(da, db) - 1)])
    else:
        if space.n_modes != 1:
            raise ValueError("single-mode squeezed vacuum needs exactly 1 mode")
        dim = space.mode_dims[0]
        vec = _squeezed_amplitudes_single(dim, r)
        edge = max(abs(vec[-1]), abs(vec[-2]))
    norm = np.linalg.norm(vec)
    if edge / norm > cutoff_tol:
        raise ValueError(
            f"truncation too small: cutoff amplitude {edge / norm:.3e} > {cutoff_tol:.1e}"
        )
    return (vec / norm).astype(complex)


def top_level_population(rho: np.ndarray, space: FockSpace, n_levels: int = 2) -> float:
    """Total population of the ``n_levels`` highest Fock levels of any mode.

    Used as the truncation-adequacy monitor: steady states reporting more than
    TRUNCATION_FLAG_THRESHOLD here are flagged invalid.
    """
    rho = np.asarray(rho)
    if rho.ndim == 1:
        rho = np.outer(rho, rho.conj())
    dims = space.factor_dims()
    probs = np.real(np.diag(rho)).reshape(dims)
    total = 0.0
    offset = 1 if space.has_qubit else 0
    for m, d in enumerate(space.mode_dims):
        axis_probs = probs.sum(axis=tuple(k for k in range(len(dims)) if k != m + offset))
        total += float(axis_probs[max(0, d - n_levels):].sum())
    return total


def truncation_flag(rho: np.ndarray, space: FockSpace) -> bool:
    """True when the truncation-adequacy monitor trips."""
    return top_level_population(rho, space) >= TRUNCATION_FLAG_THRESHOLD
