"""Covariance-matrix backend for Liouvillians with linear jump operators.

Quadratures are x_i = a_i + a_i^+, p_i = -i(a_i - a_i^+), interleaved as
r = (x_1, p_1, x_2, p_2, ...), so [r_i, r_j] = 2i Omega_ij and the vacuum
covariance is the identity.  First/second moments obey

    d<r>/dt  = A <r>,
    d cov/dt = A cov + cov A^T + Dmat.

For a jump O = sum_j (c_j a_j + d_j a_j^+) write O = b^T r with
b_{x_j} = (c_j + d_j)/2 and b_{p_j} = i (c_j - d_j)/2.  A channel of complex
rate Gamma then contributes (Re G = dissipator, Im G = O^+O Hamiltonian shift)

    A    += -2 ReG * Omega Im(b b^+) + 2 ImG * Omega Re(b b^+),
    Dmat +=  4 ReG * Omega Re(b b^+) Omega^T,

and an explicit quadratic Hamiltonian H = (1/2) r^T G r adds A += 2 Omega G.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .hilbert import Op


def symplectic_form(n_modes: int) -> np.ndarray:
    J = np.array([[0.0, 1.0], [-1.0, 0.0]])
    return scipy.linalg.block_diag(*([J] * n_modes))


@dataclass
class LinearJump:
    """Jump operator as complex coefficient vectors over (a_i, a_i^+)."""

    coeff_a: np.ndarray
    coeff_adag: np.ndarray
    gamma: complex

    def __post_init__(self):
        self.coeff_a = np.atleast_1d(np.asarray(self.coeff_a, dtype=complex))
        self.coeff_adag = np.atleast_1d(np.asarray(self.coeff_adag, dtype=complex))
        if self.coeff_a.shape != self.coeff_adag.shape:
            raise ValueError("coefficient vectors differ in length")
        self.gamma = complex(self.gamma)
        if self.gamma.real < -1e-15:
            raise ValueError(f"negative dissipation rate Re(Gamma) = {self.gamma.real!r}")

    @property
    def n_modes(self) -> int:
        return len(self.coeff_a)

    def b_vector(self) -> np.ndarray:
        b = np.zeros(2 * self.n_modes, dtype=complex)
        b[0::2] = 0.5 * (self.coeff_a + self.coeff_adag)
        b[1::2] = 0.5j * (self.coeff_a - self.coeff_adag)
        return b


@dataclass
class GaussianState:
    n_modes: int
    mean: np.ndarray
    cov: np.ndarray

    def __post_init__(self):
        self.mean = np.asarray(self.mean, dtype=float)
        self.cov = np.asarray(self.cov, dtype=float)
        n = 2 * self.n_modes
        if self.mean.shape != (n,) or self.cov.shape != (n, n):
            raise ValueError("moment shapes do not match mode count")
        if np.max(np.abs(self.cov - self.cov.T)) > 1e-12:
            raise ValueError("covariance not symmetric within 1e-12")
        omega = symplectic_form(self.n_modes)
        if np.min(scipy.linalg.eigvalsh(self.cov + 1j * omega)) < -1e-8:
            raise ValueError("uncertainty relation violated: cov + i*Omega not PSD")

    def var_x(self, mode: int = 0) -> float:
        return float(self.cov[2 * mode, 2 * mode])

    def var_p(self, mode: int = 0) -> float:
        return float(self.cov[2 * mode + 1, 2 * mode + 1])


def vacuum_state(n_modes: int) -> GaussianState:
    return GaussianState(n_modes, np.zeros(2 * n_modes), np.eye(2 * n_modes))


@dataclass
class DriftDiffusion:
    A: np.ndarray
    Dmat: np.ndarray

    def __post_init__(self):
        self.A = np.asarray(self.A, dtype=float)
        self.Dmat = np.asarray(self.Dmat, dtype=float)
        if self.A.shape != self.Dmat.shape or self.A.shape[0] != self.A.shape[1]:
            raise ValueError("A and Dmat must be square with matching shapes")
        if np.min(scipy.linalg.eigvalsh(0.5 * (self.Dmat + self.Dmat.T))) < -1e-10:
            raise ValueError("diffusion matrix not PSD within 1e-10")

    @property
    def n_modes(self) -> int:
        return self.A.shape[0] // 2


def drift_diffusion(
    jumps: list[LinearJump],
    hamiltonian_form: np.ndarray | None = None,
    n_modes: int | None = None,
) -> DriftDiffusion:
    """Moment matrices for a set of linear channels plus a quadratic Hamiltonian."""
    if n_modes is None:
        if jumps:
            n_modes = jumps[0].n_modes
        elif hamiltonian_form is not None:
            n_modes = hamiltonian_form.shape[0] // 2
        else:
            raise ValueError("cannot infer mode count")
    n = 2 * n_modes
    omega = symplectic_form(n_modes)
    A = np.zeros((n, n))
    Dmat = np.zeros((n, n))
    for j in jumps:
        if j.n_modes != n_modes:
            raise ValueError("jump acts on a different number of modes")
        b = j.b_vector()
        bb = np.outer(b, b.conj())
        A += -2.0 * j.gamma.real * (omega @ bb.imag) + 2.0 * j.gamma.imag * (omega @ bb.real)
        Dmat += 4.0 * j.gamma.real * (omega @ bb.real @ omega.T)
    if hamiltonian_form is not None:
        G = np.asarray(hamiltonian_form, dtype=float)
        if G.shape != (n, n) or np.max(np.abs(G - G.T)) > 1e-12:
            raise ValueError("hamiltonian quadratic form must be symmetric 2M x 2M")
        A += 2.0 * (omega @ G)
    Dmat = 0.5 * (Dmat + Dmat.T)
    return DriftDiffusion(A, Dmat)


class UnstableDriftError(RuntimeError):
    """Drift matrix not strictly stable: the configuration does not cool."""


def lyapunov_steady(dd: DriftDiffusion, residual_tol: float = 1e-10) -> GaussianState:
    """Steady covariance from A cov + cov A^T + Dmat = 0, solved vectorized."""
    eigs = np.linalg.eigvals(dd.A)
    if np.max(eigs.real) >= -1e-12:
        raise UnstableDriftError(
            f"drift not stable (max Re eig = {np.max(eigs.real):.3e}); "
            "physically non-cooling parameter set"
        )
    n = dd.A.shape[0]
    eye = np.eye(n)
    M = np.kron(eye, dd.A) + np.kron(dd.A, eye)
    vec = np.linalg.solve(M, -dd.Dmat.flatten(order="F"))
    cov = vec.reshape((n, n), order="F")
    cov = 0.5 * (cov + cov.T)
    residual = np.max(np.abs(dd.A @ cov + cov @ dd.A.T + dd.Dmat))
    if residual > residual_tol * max(1.0, np.max(np.abs(dd.Dmat))):
        raise RuntimeError(f"Lyapunov residual {residual:.3e} too large")
    return GaussianState(n // 2, np.zeros(n), cov)


def affine_propagator(dd: DriftDiffusion, t: float) -> tuple[np.ndarray, np.ndarray]:
    """(F, J) with cov -> F cov F^T + J and mean -> F mean over time t.

    J = int_0^t e^{As} Dmat e^{A^T s} ds via the block-matrix-exponential identity.
    """
    n = dd.A.shape[0]
    C = np.zeros((2 * n, 2 * n))
    C[:n, :n] = -dd.A
    C[:n, n:] = dd.Dmat
    C[n:, n:] = dd.A.T
    E = scipy.linalg.expm(C * t)
    F = E[n:, n:].T
    J = F @ E[:n, n:]
    return F, 0.5 * (J + J.T)


def evolve_covariance(state: GaussianState, dd: DriftDiffusion, t: float) -> GaussianState:
    if t == 0.0:
        return GaussianState(state.n_modes, state.mean.copy(), state.cov.copy())
    F, J = affine_propagator(dd, t)
    mean = F @ state.mean
    cov = F @ state.cov @ F.T + J
    return GaussianState(state.n_modes, mean, 0.5 * (cov + cov.T))


def symplectic_eigenvalues(cov: np.ndarray) -> np.ndarray:
    """Symplectic spectrum; physical states have all values >= 1."""
    n_modes = cov.shape[0] // 2
    omega = symplectic_form(n_modes)
    vals = np.abs(np.linalg.eigvals(1j * omega @ cov))
    return np.sort(vals)[::2]


# ---------------------------------------------------------------------------
# bridging from the Fock representation
# ---------------------------------------------------------------------------


def linear_jump_from_op(op: Op, gamma: complex, tol: float = 1e-10) -> LinearJump:
    """Extract (c, d) coefficients of a linear jump from its Fock matrix.

    Raises ValueError when the operator is not a pure linear combination of
    annihilation/creation operators.
    """
    from .hilbert import destroy  # local import to avoid cycle at module load

    space = op.space
    if space.has_qubit:
        raise ValueError("linear jumps are defined on purely bosonic spaces")
    M = space.n_modes
    vac = np.zeros(space.dim, dtype=complex)
    vac[0] = 1.0
    c = np.zeros(M, dtype=complex)
    d = np.zeros(M, dtype=complex)
    recon = np.zeros_like(op.matrix)
    for m in range(M):
        a = destroy(space, m)
        one = a.dag().matrix @ vac
        c[m] = np.vdot(vac, op.matrix @ one)
        d[m] = np.vdot(one, op.matrix @ vac)
        recon += c[m] * a.matrix + d[m] * a.dag().matrix
    if np.max(np.abs(recon - op.matrix)) > tol:
        raise ValueError("nonlinear jump operator supplied")
    return LinearJump(c, d, gamma)


def number_quadratic_form(n_modes: int, mode: int, coeff: float) -> np.ndarray:
    """Quadratic form G for H = coeff * a_mode^+ a_mode (constant dropped)."""
    G = np.zeros((2 * n_modes, 2 * n_modes))
    G[2 * mode, 2 * mode] = coeff / 2.0
    G[2 * mode + 1, 2 * mode + 1] = coeff / 2.0
    return G
