"""Squeezing observables: quadrature variances, dB metrics, occupations.

The unified squeezing metric is dB below vacuum,
S = -10 log10(var / var_vacuum), so the vacuum reads 0 dB in every mode
convention.  The unnormalized variant -10 log10(var) is also provided for
traceability of multimode plots against their non-unit vacuum value.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .gaussian import GaussianState
from .hilbert import BogoliubovPair, FockSpace, destroy


def squeezing_db(variance: float, vacuum_variance: float = 1.0) -> float:
    """Noise suppression in dB below the vacuum value."""
    if variance <= 0 or vacuum_variance <= 0:
        raise ValueError(f"variance must be positive, got {variance!r}")
    return float(-10.0 * np.log10(variance / vacuum_variance))


def squeezing_db_unnormalized(variance: float) -> float:
    """-10 log10(var) against an implicit unit reference (multimode plot convention)."""
    if variance <= 0:
        raise ValueError(f"variance must be positive, got {variance!r}")
    return float(-10.0 * np.log10(variance))


# -- moments of Gaussian states ---------------------------------------------


def mode_amplitude(state: GaussianState, mode: int) -> complex:
    """<a_mode>."""
    mx, mp = state.mean[2 * mode], state.mean[2 * mode + 1]
    return 0.5 * (mx + 1j * mp)


def occupation_bare(state: GaussianState, mode: int) -> float:
    """<a^+ a> of one mode (not mean-subtracted)."""
    i = 2 * mode
    mx, mp = state.mean[i], state.mean[i + 1]
    return float((state.cov[i, i] + state.cov[i + 1, i + 1] + mx**2 + mp**2) / 4.0 - 0.5)


def pair_moment(state: GaussianState, mode_i: int, mode_j: int) -> complex:
    """<a_i a_j> including mean contributions (i = j gives <a_i^2>)."""
    xi, pi = 2 * mode_i, 2 * mode_i + 1
    xj, pj = 2 * mode_j, 2 * mode_j + 1
    c = state.cov
    if mode_i == mode_j:
        central = (c[xi, xi] - c[pi, pi] + 2j * c[xi, pi]) / 4.0
    else:
        central = (c[xi, xj] - c[pi, pj] + 1j * (c[xi, pj] + c[pi, xj])) / 4.0
    return complex(central) + mode_amplitude(state, mode_i) * mode_amplitude(state, mode_j)


def two_mode_quadrature_variance(state: GaussianState, modes: tuple[int, int] = (0, 1)) -> float:
    """Variance of (x_i + x_j)/2; the two-mode vacuum value is 1/2."""
    if state.n_modes < 2:
        raise ValueError("two-mode quadrature needs a state with at least 2 modes")
    i, j = (2 * m for m in modes)
    return float(0.25 * (state.cov[i, i] + state.cov[j, j] + 2.0 * state.cov[i, j]))


def occupation_D(state: GaussianState, pair: BogoliubovPair,
                 modes: tuple[int, int] | int = (0, 1)) -> float:
    """<D^+ D> with D = u a + v b^+ (or the single-mode form for a single index)."""
    u, v = pair.u, pair.v
    if isinstance(modes, int):
        ma = mb = modes
    else:
        ma, mb = modes
    n_a = occupation_bare(state, ma)
    n_b = occupation_bare(state, mb)
    cross = 2.0 * pair_moment(state, ma, mb).real
    return float(u**2 * n_a + v**2 * (n_b + 1.0) + u * v * cross)


# -- moments of Fock-backend states ------------------------------------------


def fock_moments(rho: np.ndarray, space: FockSpace) -> dict:
    """First and second mode-operator moments of a density matrix."""
    ops = [destroy(space, m).matrix for m in range(space.n_modes)]
    out = {"a": [], "n": [], "aa": {}, }
    for m, a in enumerate(ops):
        out["a"].append(complex(np.trace(a @ rho)))
        out["n"].append(float(np.real(np.trace(a.conj().T @ a @ rho))))
    for i, ai in enumerate(ops):
        for j, aj in enumerate(ops):
            if j >= i:
                out["aa"][(i, j)] = complex(np.trace(ai @ aj @ rho))
    return out


def gaussian_from_fock(rho: np.ndarray, space: FockSpace) -> GaussianState:
    """Project the first/second moments of a Fock-space state onto a GaussianState."""
    rho = np.asarray(rho)
    if rho.ndim == 1:
        rho = np.outer(rho, rho.conj())
    mom = fock_moments(rho, space)
    M = space.n_modes
    ops = [destroy(space, m).matrix for m in range(M)]
    mean = np.zeros(2 * M)
    cov = np.zeros((2 * M, 2 * M))
    for m in range(M):
        mean[2 * m] = 2.0 * mom["a"][m].real
        mean[2 * m + 1] = 2.0 * mom["a"][m].imag
    for i in range(M):
        aa = mom["aa"][(i, i)]
        ai = mom["a"][i]
        n = mom["n"][i]
        # <x^2> = 2 Re<a^2> + 2<n> + 1, <p^2> = -2 Re<a^2> + 2<n> + 1
        cov[2 * i, 2 * i] = 2 * aa.real + 2 * n + 1 - (2 * ai.real) ** 2
        cov[2 * i + 1, 2 * i + 1] = -2 * aa.real + 2 * n + 1 - (2 * ai.imag) ** 2
        cov[2 * i, 2 * i + 1] = cov[2 * i + 1, 2 * i] = 2 * aa.imag - 4 * ai.real * ai.imag
        for j in range(i + 1, M):
            # A = <a_i a_j>, B = <a_i^+ a_j>; modes commute, so
            # <x_i x_j> = 2 Re(A + B), <p_i p_j> = 2 Re(B - A),
            # <x_i p_j> = 2 Im(A + B), <p_i x_j> = 2 Im(A - B)
            A = mom["aa"][(i, j)]
            B = complex(np.trace(ops[i].conj().T @ ops[j] @ rho))
            ai, aj = mom["a"][i], mom["a"][j]
            cov[2 * i, 2 * j] = cov[2 * j, 2 * i] = 2 * (A + B).real - 4 * ai.real * aj.real
            cov[2 * i + 1, 2 * j + 1] = cov[2 * j + 1, 2 * i + 1] = (
                2 * (B - A).real - 4 * ai.imag * aj.imag
            )
            cov[2 * i, 2 * j + 1] = cov[2 * j + 1, 2 * i] = (
                2 * (A + B).imag - 4 * ai.real * aj.imag
            )
            cov[2 * i + 1, 2 * j] = cov[2 * j, 2 * i + 1] = (
                2 * (A - B).imag - 4 * ai.imag * aj.real
            )
    return GaussianState(M, mean, cov)


# -- report container ---------------------------------------------------------


@dataclass
class SqueezingReport:
    """Per-configuration squeezing summary (vacuum variance = 1 per mode)."""

    var_x: float
    var_p: float
    S_db: float
    occ_bare: list[float]
    occ_D: float
    occ_Dbar: float | None = None
    validity_flags: list[tuple[str, float, float]] = field(default_factory=list)

    def flagged(self) -> list[str]:
        return [name for name, ratio, thr in self.validity_flags if ratio > thr]
