"""Complex-rate Lindblad terms: Liouvillian construction, evolution, steady states.

A dissipative channel is parametrized by a jump operator O and a complex rate
Gamma through

    L_{O,Gamma}(rho) = (Gamma/2) (O rho O^+ - O^+ O rho) + H.c.

which is algebraically identical (for Hermitian rho) to a standard dissipator
of rate Re(Gamma) plus the Hamiltonian shift (Im(Gamma)/2) O^+ O:

    L(rho) = Re(G) (O rho O^+ - {O^+O, rho}/2) - i (Im(G)/2) [O^+O, rho].

The decomposed form is what gets evaluated (manifestly trace preserving); the
literal two-term form is kept for unit tests.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
import scipy.linalg
import scipy.sparse
import scipy.sparse.linalg

from .hilbert import FockSpace, Op

#: refuse to build dense superoperators beyond this total dimension d
DENSE_DIM_CAP = 64
#: refuse to build any vectorized superoperator beyond this d^2
VEC_DIM_CAP = 400_000_000


@dataclass
class LindbladTerm:
    """Jump operator paired with a complex rate (GHz).  Re(rate) >= 0 enforced."""

    op: Op
    gamma: complex

    def __post_init__(self):
        self.gamma = complex(self.gamma)
        if self.gamma.real < -1e-15:
            raise ValueError(f"negative dissipation rate Re(Gamma) = {self.gamma.real!r}")


GeneratorHook = Callable[[float], tuple[Op | None, Sequence[LindbladTerm]]]


@dataclass
class LiouvillianSpec:
    """Hamiltonian plus Lindblad terms, all acting on one FockSpace.

    ``time_dependent_hook`` maps t -> (hamiltonian, terms) for driven problems;
    when present it overrides the static fields during evolve_timedep.
    """

    space: FockSpace
    hamiltonian: Op | None = None
    terms: list[LindbladTerm] = field(default_factory=list)
    time_dependent_hook: GeneratorHook | None = None

    def __post_init__(self):
        if self.hamiltonian is not None:
            if self.hamiltonian.space != self.space:
                raise ValueError("hamiltonian acts on a different space")
            H = self.hamiltonian.matrix
            if np.max(np.abs(H - H.conj().T)) > 1e-12:
                raise ValueError("hamiltonian is not Hermitian within 1e-12")
        for t in self.terms:
            if t.op.space != self.space:
                raise ValueError("jump operator acts on a different space")


@dataclass
class DensityMatrix:
    space: FockSpace
    rho: np.ndarray

    def __post_init__(self):
        self.rho = np.asarray(self.rho, dtype=complex)
        if self.rho.shape != (self.space.dim, self.space.dim):
            raise ValueError("density matrix shape does not match space")
        tr = np.trace(self.rho)
        if abs(tr - 1.0) > 1e-10:
            raise ValueError(f"trace = {tr!r}, not 1 within 1e-10")
        if np.max(np.abs(self.rho - self.rho.conj().T)) > 1e-10:
            raise ValueError("density matrix not Hermitian within 1e-10")
        if np.min(scipy.linalg.eigvalsh(self.rho)) < -1e-8:
            raise ValueError("density matrix has eigenvalue below -1e-8")

    def expect(self, op: Op) -> complex:
        return complex(np.trace(op.matrix @ self.rho))


def apply_term_literal(term: LindbladTerm, rho: np.ndarray) -> np.ndarray:
    """The parametrization as written: (G/2)(O rho O^+ - O^+O rho) + H.c."""
    O = term.op.matrix
    half = 0.5 * term.gamma * (O @ rho @ O.conj().T - O.conj().T @ O @ rho)
    return half + half.conj().T


def apply_term(term: LindbladTerm, rho: np.ndarray) -> np.ndarray:
    """Decomposed evaluation: Re-rate dissipator + (Im/2) O^+O Hamiltonian shift."""
    O = term.op.matrix
    OdO = O.conj().T @ O
    g_re, g_im = term.gamma.real, term.gamma.imag
    out = g_re * (O @ rho @ O.conj().T - 0.5 * (OdO @ rho + rho @ OdO))
    if g_im != 0.0:
        out = out - 0.5j * g_im * (OdO @ rho - rho @ OdO)
    return out


def apply_generator(
    rho: np.ndarray,
    hamiltonian: Op | None,
    terms: Sequence[LindbladTerm],
) -> np.ndarray:
    """d rho / dt in apply (matrix) form."""
    out = np.zeros_like(rho)
    if hamiltonian is not None:
        H = hamiltonian.matrix
        out = out - 1j * (H @ rho - rho @ H)
    for t in terms:
        out = out + apply_term(t, rho)
    return out


def build_liouvillian_matrix(spec: LiouvillianSpec, sparse: bool = False):
    """Superoperator L with vec(d rho/dt) = L vec(rho), column-stacking convention.

    Dense by default (d <= DENSE_DIM_CAP); pass sparse=True for larger spaces.
    """
    if spec.time_dependent_hook is not None:
        raise ValueError("time-dependent spec has no static Liouvillian matrix")
    d = spec.space.dim
    if d * d > VEC_DIM_CAP:
        raise ValueError(f"vectorized dimension {d*d} above cap {VEC_DIM_CAP}")
    if not sparse and d > DENSE_DIM_CAP:
        raise ValueError(
            f"dimension {d} above dense cap {DENSE_DIM_CAP}; use sparse=True"
        )

    if sparse:
        eye = scipy.sparse.identity(d, dtype=complex, format="csr")
        kron = scipy.sparse.kron

        def csr(m):
            return scipy.sparse.csr_matrix(m)

        L = scipy.sparse.csr_matrix((d * d, d * d), dtype=complex)
    else:
        eye = np.eye(d, dtype=complex)
        kron = np.kron
        csr = np.asarray
        L = np.zeros((d * d, d * d), dtype=complex)

    if spec.hamiltonian is not None:
        H = csr(spec.hamiltonian.matrix)
        L = L + (-1j) * (kron(eye, H) - kron(H.T, eye))
    for t in spec.terms:
        O = csr(t.op.matrix)
        Od = csr(t.op.matrix.conj().T)
        OdO = Od @ O
        g_re, g_im = t.gamma.real, t.gamma.imag
        L = L + g_re * (kron(O.conj(), O) - 0.5 * (kron(eye, OdO) + kron(OdO.T, eye)))
        if g_im != 0.0:
            L = L + (-0.5j * g_im) * (kron(eye, OdO) - kron(OdO.T, eye))
    if sparse:
        L = scipy.sparse.csc_matrix(L)
    return L


# ---------------------------------------------------------------------------
# adaptive embedded Runge-Kutta (Dormand-Prince 5(4)) on matrix-valued states
# ---------------------------------------------------------------------------

_DP_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_DP_A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    [35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
]
_DP_B5 = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_DP_B4 = np.array(
    [5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40]
)


class IntegrationError(RuntimeError):
    pass


def _rk45(rhs, y0: np.ndarray, t0: float, t1: float, rtol: float, atol: float,
          max_step: float = np.inf, monitor=None):
    """Dormand-Prince 5(4) with PI step-size control; y is any ndarray."""
    t, y = t0, y0.copy()
    h = min(max_step, (t1 - t0) / 100.0, 1.0)
    err_prev = 1.0
    k1 = rhs(t, y)
    n_reject = 0
    while t < t1 - 1e-14 * max(1.0, abs(t1)):
        h = min(h, t1 - t, max_step)
        if h < 1e-14 * max(1.0, abs(t)):
            raise IntegrationError(f"step-size underflow at t = {t!r}")
        ks = [k1]
        for i in range(1, 7):
            yi = y + h * sum(a * k for a, k in zip(_DP_A[i], ks))
            ks.append(rhs(t + _DP_C[i] * h, yi))
        y5 = y + h * sum(b * k for b, k in zip(_DP_B5, ks) if b != 0.0)
        y4 = y + h * sum(b * k for b, k in zip(_DP_B4, ks) if b != 0.0)
        scale = atol + rtol * np.maximum(np.abs(y), np.abs(y5))
        err = float(np.sqrt(np.mean(np.abs((y5 - y4) / scale) ** 2)))
        if err <= 1.0:
            t += h
            y = y5
            k1 = ks[6]  # FSAL
            if monitor is not None:
                monitor(t, y)
            fac = 5.0 if err == 0.0 else 0.9 * err**-0.2 * err_prev**0.08
            err_prev = max(err, 1e-10)
            h *= min(5.0, max(0.2, fac))
        else:
            n_reject += 1
            if n_reject > 10_000:
                raise IntegrationError("too many rejected steps")
            h *= max(0.1, 0.9 * err**-0.25)
    return y


def _finalize_density(rho: np.ndarray, space: FockSpace) -> DensityMatrix:
    """Re-hermitize and renormalize, failing if either correction is large."""
    herm_defect = float(np.max(np.abs(rho - rho.conj().T)))
    trace_defect = float(abs(np.trace(rho) - 1.0))
    if herm_defect > 1e-8 or trace_defect > 1e-8:
        raise IntegrationError(
            f"invariant violation: hermiticity defect {herm_defect:.2e}, "
            f"trace defect {trace_defect:.2e}"
        )
    rho = 0.5 * (rho + rho.conj().T)
    rho = rho / np.trace(rho).real
    return DensityMatrix(space, rho)


def evolve(
    rho0: DensityMatrix,
    spec: LiouvillianSpec,
    t_final: float,
    tol: float = 1e-9,
    max_step: float = np.inf,
) -> DensityMatrix:
    """Integrate the static master equation in apply form up to t_final."""

    def rhs(t, rho):
        return apply_generator(rho, spec.hamiltonian, spec.terms)

    rho = _rk45(rhs, rho0.rho, 0.0, t_final, rtol=tol, atol=tol, max_step=max_step)
    return _finalize_density(rho, spec.space)


def evolve_timedep(
    rho0: DensityMatrix,
    spec: LiouvillianSpec,
    t_final: float,
    tol: float = 1e-9,
    max_step: float = np.inf,
    sample_times: Sequence[float] | None = None,
) -> DensityMatrix | list[DensityMatrix]:
    """As evolve, re-evaluating the hook generator at every integrator stage.

    With ``sample_times`` a list of the state at those times is returned
    (the last entry is the state at sample_times[-1]).
    """
    hook = spec.time_dependent_hook
    if hook is None:
        hook = lambda t: (spec.hamiltonian, spec.terms)  # noqa: E731

    def rhs(t, rho):
        H, terms = hook(t)
        return apply_generator(rho, H, terms)

    if sample_times is None:
        rho = _rk45(rhs, rho0.rho, 0.0, t_final, rtol=tol, atol=tol, max_step=max_step)
        return _finalize_density(rho, spec.space)

    out = []
    rho, t_prev = rho0.rho, 0.0
    for ts in sample_times:
        if ts > t_prev:
            rho = _rk45(rhs, rho, t_prev, ts, rtol=tol, atol=tol, max_step=max_step)
            t_prev = ts
        out.append(_finalize_density(rho, spec.space))
    return out


# ---------------------------------------------------------------------------
# steady states
# ---------------------------------------------------------------------------


class DegenerateSteadyStateError(RuntimeError):
    pass


def _check_unique_zero(L, d: int):
    """Second-smallest |eigenvalue| must clear 1e-8 x spectral scale."""
    size = L.shape[0]
    if scipy.sparse.issparse(L):
        scale = float(abs(L).max())
    else:
        scale = float(np.max(np.abs(L)))
    if size <= 400:
        Ld = L.toarray() if scipy.sparse.issparse(L) else L
        vals = np.sort(np.abs(scipy.linalg.eigvals(Ld)))
        second = float(vals[1])
    else:
        # shift-invert around zero; cheap next to the steady solve itself
        Ls = L if scipy.sparse.issparse(L) else scipy.sparse.csc_matrix(L)
        try:
            vals = scipy.sparse.linalg.eigs(Ls, k=2, sigma=0.0, which="LM",
                                            return_eigenvectors=False)
        except Exception as exc:  # pragma: no cover - diagnostic path
            raise DegenerateSteadyStateError(f"eigenvalue check failed: {exc}") from exc
        second = sorted(abs(v) for v in vals)[1]
    if second <= 1e-8 * scale:
        raise DegenerateSteadyStateError(
            f"steady space degenerate: second-smallest |eig| = {second:.3e} "
            f"vs scale {scale:.3e}"
        )


def steady_state(
    spec: LiouvillianSpec,
    check_unique: bool = True,
    residual_tol: float = 1e-10,
) -> DensityMatrix:
    """Solve L vec(rho) = 0 with the trace row replaced by the trace functional."""
    d = spec.space.dim
    # the structured Liouvillians here are sparse; direct sparse factorization
    # beats dense LU well below the dense cap
    use_sparse = d > 10
    L = build_liouvillian_matrix(spec, sparse=use_sparse)
    if check_unique:
        _check_unique_zero(L, d)

    # trace functional on column-stacked vec: ones at diagonal positions
    trace_row = np.zeros(d * d, dtype=complex)
    trace_row[:: d + 1] = 1.0
    rhs = np.zeros(d * d, dtype=complex)
    rhs[0] = 1.0

    if use_sparse:
        M = scipy.sparse.lil_matrix(L)
        M[0, :] = trace_row
        M = scipy.sparse.csc_matrix(M)
        vec = scipy.sparse.linalg.splu(M).solve(rhs)
        residual = float(np.linalg.norm(L @ vec))
    else:
        M = np.array(L)
        M[0, :] = trace_row
        vec = np.linalg.solve(M, rhs)
        residual = float(np.linalg.norm(L @ vec))
    if residual > residual_tol:
        raise DegenerateSteadyStateError(f"steady-state residual {residual:.3e}")
    rho = vec.reshape((d, d), order="F")
    rho = 0.5 * (rho + rho.conj().T)
    return DensityMatrix(spec.space, rho / np.trace(rho).real)
