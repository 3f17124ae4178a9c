"""Multimode waveguide model: Ohmic couplings, per-offset two-mode pair
generators for the two drive configurations, averaged dynamics, and the
stroboscopic alternation map.

Mode convention for a pair at offset nu: mode 0 is the upper mode at
omega_a + nu, mode 1 the lower mode at omega_b - nu.  The two squeezing
operators are

    D_nu    = u_nu a_0 + v_nu a_1^+        (rate gbar_nu^2 / (-i nu + gamma_q))
    Dbar_nu = u_nu a_1 + v_nu a_0^+        (rate gbar_nu^2 / (+i nu + gamma_q))

with gbar_nu^2 = eta1^2 g_{wa+nu}^2 - eta2^2 g_{wb-nu}^2, u_nu = eta1 g_{wa+nu}
/ gbar_nu, v_nu = eta2 g_{wb-nu} / gbar_nu.  The bar configuration is realized
by the second drive set (etabar_1 = eta1 g_wa / g_wb, etabar_2 = eta2 g_wb /
g_wa); that recipe reproduces exactly the same (u, v) on the swapped mode pair
at nu = 0 and deviates at order nu/omega_{a,b} away from it, so Dbar_nu is
constructed with the ideal (u_nu, v_nu) of its definition and the bar
amplitudes enter the correction channels only.

The correction channels on a mode at frequency w rotate at E_1(w) = w + w_ref
and E_2(w) = -(w + w_ref); the reference w_ref is not fixed by the model (it
enters only through |E| >> gamma_q) and defaults to omega_a, configurable for
sensitivity checks.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import gaussian, master, metrics
from .hilbert import BogoliubovPair, FockSpace, bogoliubov_op, destroy

#: validity thresholds
FLAG_OMEGA_OVER_EPSILON = 0.3
FLAG_ALPHA = 0.01
FLAG_STROBE = 0.1


def coupling(omega: float, alpha: float, delta_omega: float) -> float:
    """Ohmic mode coupling g_w = sqrt(g0 w) with g0 = 2 alpha Delta_omega."""
    if omega <= 0:
        raise ValueError(f"mode frequency must be positive, got {omega!r}")
    return float(np.sqrt(2.0 * alpha * delta_omega * omega))


def qubit_decay(alpha: float, epsilon: float) -> float:
    """gamma_q = J(epsilon) = 2 pi alpha epsilon."""
    if epsilon <= 0 or alpha < 0:
        raise ValueError("epsilon must be positive and alpha non-negative")
    return float(2.0 * np.pi * alpha * epsilon)


@dataclass
class ContinuumParams:
    """Waveguide model parameters (GHz / ns units)."""

    epsilon: float = 15.0
    omega_a: float = 3.0
    omega_b: float = 2.4
    alpha: float = 6e-4
    delta_omega: float = 0.01
    nu_max: float = 0.25
    n_nu: int = 41
    Q: float = 1e6
    eta1: float = 0.2
    eta2: float = 0.2
    strobe_dt: float | None = None  # ns; None -> 1e-3 / |Gamma_sq_0|
    fock_dim: int = 12
    omega_ref: float | None = None  # None -> omega_a

    def __post_init__(self):
        if self.omega_a == self.omega_b:
            raise ValueError("omega_a and omega_b must differ")
        for name in ("epsilon", "omega_a", "omega_b", "delta_omega", "Q"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.omega_b - self.nu_max <= 0:
            raise ValueError("band extends to non-positive mode frequencies")
        # gbar_nu^2 > 0 across the whole band (worst case at nu = -nu_max)
        for nu in (-self.nu_max, self.nu_max):
            lhs = self.eta1**2 * coupling(self.omega_a_nu(nu), self.alpha,
                                          self.delta_omega) ** 2
            rhs = self.eta2**2 * coupling(self.omega_b_nu(nu), self.alpha,
                                          self.delta_omega) ** 2
            if lhs <= rhs:
                raise ValueError(
                    f"gbar_nu imaginary at nu = {nu}: eta1^2 g_a^2 <= eta2^2 g_b^2"
                )

    def omega_a_nu(self, nu: float) -> float:
        return self.omega_a + nu

    def omega_b_nu(self, nu: float) -> float:
        return self.omega_b - nu

    @property
    def gamma_q(self) -> float:
        return qubit_decay(self.alpha, self.epsilon)

    @property
    def kappa(self) -> float:
        """Waveguide loss estimate kappa = Delta_omega / Q."""
        return self.delta_omega / self.Q

    @property
    def w_ref(self) -> float:
        return self.omega_a if self.omega_ref is None else self.omega_ref

    def nu_grid(self) -> np.ndarray:
        return np.linspace(-self.nu_max, self.nu_max, self.n_nu)


def bar_drive_amplitudes(p: ContinuumParams) -> tuple[float, float]:
    """(etabar_1, etabar_2) realizing the Dbar configuration."""
    g_a = coupling(p.omega_a, p.alpha, p.delta_omega)
    g_b = coupling(p.omega_b, p.alpha, p.delta_omega)
    return p.eta1 * g_a / g_b, p.eta2 * g_b / g_a


@dataclass(frozen=True)
class PairCorrection:
    mode: int  # 0 = omega_a + nu side, 1 = omega_b - nu side
    kind: str  # "a" | "adag"
    gamma: complex


@dataclass
class PairModel:
    """Two-mode generator data for one offset nu in one drive configuration."""

    nu: float
    config: str  # "D" | "Dbar"
    pair: BogoliubovPair
    gamma_sq: complex
    corrections: list[PairCorrection]
    kappa: float
    omega_modes: tuple[float, float]

    def __post_init__(self):
        if self.gamma_sq.real <= 0:
            raise ValueError("Re Gamma_sq must be positive")


def pair_parameters(nu: float, p: ContinuumParams, config: str = "D") -> PairModel:
    """PairModel at offset nu for drive configuration "D" or "Dbar"."""
    if config not in ("D", "Dbar"):
        raise ValueError(f"unknown configuration {config!r}")
    w_a, w_b = p.omega_a_nu(nu), p.omega_b_nu(nu)
    g_a = coupling(w_a, p.alpha, p.delta_omega)
    g_b = coupling(w_b, p.alpha, p.delta_omega)
    gbar_sq = p.eta1**2 * g_a**2 - p.eta2**2 * g_b**2
    if gbar_sq <= 0:
        raise ValueError(f"gbar_nu imaginary at nu = {nu}")
    gbar = float(np.sqrt(gbar_sq))
    pair = BogoliubovPair(u=p.eta1 * g_a / gbar, v=p.eta2 * g_b / gbar, gbar=gbar)
    gq = p.gamma_q
    if config == "D":
        gamma_sq = gbar_sq / (-1j * nu + gq)
        e1, e2 = p.eta1, p.eta2
    else:
        # Dbar rotates at exp(+i nu t); amplitudes from the bar drive set
        gamma_sq = gbar_sq / (+1j * nu + gq)
        e1, e2 = bar_drive_amplitudes(p)
    corrections = []
    for mode, w, g_w in ((0, w_a, g_a), (1, w_b, g_b)):
        E = w + p.w_ref
        corrections.append(PairCorrection(mode, "a", (e1 * g_w) ** 2 / (-1j * E + gq)))
        corrections.append(PairCorrection(mode, "adag", (e2 * g_w) ** 2 / (+1j * E + gq)))
    return PairModel(
        nu=nu,
        config=config,
        pair=pair,
        gamma_sq=gamma_sq,
        corrections=corrections,
        kappa=p.kappa,
        omega_modes=(w_a, w_b),
    )


def _pair_channel_coeffs(pm: PairModel) -> tuple[np.ndarray, np.ndarray]:
    """(coeff_a, coeff_adag) of the squeezing jump over modes (0, 1)."""
    u, v = pm.pair.u, pm.pair.v
    if pm.config == "D":
        return np.array([u, 0.0]), np.array([0.0, v])
    return np.array([0.0, u]), np.array([v, 0.0])


def pair_linear_jumps(pm: PairModel, with_corrections: bool = True,
                      with_loss: bool = True, rate_scale: float = 1.0
                      ) -> list[gaussian.LinearJump]:
    """Gaussian-backend channels of one pair generator."""
    ca, cd = _pair_channel_coeffs(pm)
    jumps = [gaussian.LinearJump(ca, cd, rate_scale * pm.gamma_sq)]
    if with_corrections:
        for c in pm.corrections:
            vec_a, vec_d = np.zeros(2), np.zeros(2)
            if c.kind == "a":
                vec_a[c.mode] = 1.0
            else:
                vec_d[c.mode] = 1.0
            jumps.append(gaussian.LinearJump(vec_a, vec_d, rate_scale * c.gamma))
    if with_loss and pm.kappa > 0:
        jumps.append(gaussian.LinearJump([1, 0], [0, 0], rate_scale * pm.kappa))
        jumps.append(gaussian.LinearJump([0, 1], [0, 0], rate_scale * pm.kappa))
    return jumps


def build_pair_liouvillian(pm: PairModel, mode: str = "with_corrections",
                           fock_dims: tuple[int, int] | None = None,
                           ) -> master.LiouvillianSpec:
    """Fock-backend two-mode Liouvillian for one pair generator."""
    if mode not in ("ideal", "with_corrections"):
        raise ValueError(f"unknown mode {mode!r}")
    dims = fock_dims or (12, 12)
    space = FockSpace(tuple(dims))
    if pm.config == "D":
        D = bogoliubov_op(space, pm.pair, 0, 1)
    else:
        D = bogoliubov_op(space, pm.pair, 1, 0)
    terms = [master.LindbladTerm(D, pm.gamma_sq)]
    if mode == "with_corrections":
        for c in pm.corrections:
            a = destroy(space, c.mode)
            terms.append(master.LindbladTerm(a if c.kind == "a" else a.dag(), c.gamma))
        if pm.kappa > 0:
            terms.append(master.LindbladTerm(destroy(space, 0), pm.kappa))
            terms.append(master.LindbladTerm(destroy(space, 1), pm.kappa))
    return master.LiouvillianSpec(space, terms=terms)


def averaged_drift(nu: float, p: ContinuumParams, mode: str = "with_corrections"
                   ) -> gaussian.DriftDiffusion:
    """Drift/diffusion of the averaged generator (L_D + L_Dbar)/2."""
    with_c = mode == "with_corrections"
    jumps = pair_linear_jumps(pair_parameters(nu, p, "D"), with_c, with_c, 0.5)
    jumps += pair_linear_jumps(pair_parameters(nu, p, "Dbar"), with_c, with_c, 0.5)
    return gaussian.drift_diffusion(jumps, n_modes=2)


def half_cycle_drifts(nu: float, p: ContinuumParams, mode: str = "with_corrections"
                      ) -> tuple[gaussian.DriftDiffusion, gaussian.DriftDiffusion]:
    with_c = mode == "with_corrections"
    dd = []
    for config in ("D", "Dbar"):
        pm = pair_parameters(nu, p, config)
        dd.append(gaussian.drift_diffusion(pair_linear_jumps(pm, with_c, with_c),
                                           n_modes=2))
    return dd[0], dd[1]


@dataclass
class StroboscopicResult:
    strobe: gaussian.GaussianState
    averaged: gaussian.GaussianState
    strobe_dt: float
    n_iter: int
    max_abs_mismatch: float

    @property
    def relative_mismatch(self) -> float:
        scale = float(np.max(np.abs(self.averaged.cov)))
        return self.max_abs_mismatch / scale


class StroboscopicDivergence(RuntimeError):
    pass


def stroboscopic_steady(
    nu: float,
    p: ContinuumParams,
    tol: float = 1e-10,
    mode: str = "with_corrections",
    strobe_dt: float | None = None,
    max_iter: int = 1_000_000,
) -> StroboscopicResult:
    """Fixed point of E_Dbar(dt) o E_D(dt) on (mean, cov), plus the averaged
    steady state for comparison.

    The fixed point is found by iterating the affine covariance map from the
    vacuum until successive covariances differ by less than ``tol`` in max
    norm.
    """
    dd_D, dd_B = half_cycle_drifts(nu, p, mode)
    gamma_sq_0 = abs(pair_parameters(0.0, p, "D").gamma_sq)
    dt = strobe_dt if strobe_dt is not None else (
        p.strobe_dt if p.strobe_dt is not None else 1e-3 / gamma_sq_0
    )
    f1, j1 = gaussian.affine_propagator(dd_D, dt)
    f2, j2 = gaussian.affine_propagator(dd_B, dt)
    g_cycle = f2 @ f1
    k_cycle = f2 @ j1 @ f2.T + j2
    if np.max(np.abs(np.linalg.eigvals(g_cycle))) >= 1.0 - 1e-14:
        raise StroboscopicDivergence("composed stroboscopic map is not contractive")
    cov = np.eye(4)
    n_iter = 0
    for n_iter in range(1, max_iter + 1):
        new = g_cycle @ cov @ g_cycle.T + k_cycle
        delta = float(np.max(np.abs(new - cov)))
        cov = new
        if delta < tol:
            break
    else:
        raise StroboscopicDivergence(f"no convergence after {max_iter} iterations")
    cov = 0.5 * (cov + cov.T)
    strobe = gaussian.GaussianState(2, np.zeros(4), cov)
    averaged = gaussian.lyapunov_steady(averaged_drift(nu, p, mode))
    mismatch = float(np.max(np.abs(cov - averaged.cov)))
    return StroboscopicResult(strobe, averaged, dt, n_iter, mismatch)


def continuum_validity_flags(p: ContinuumParams) -> list[tuple[str, float, float]]:
    """Global validity monitors for the multimode model."""
    gq = p.gamma_q
    # sum of |Gamma_sq_nu| over the physical mode grid across the band
    n_half = int(np.floor(p.nu_max / p.delta_omega))
    total = 0.0
    for k in range(-n_half, n_half + 1):
        try:
            total += abs(pair_parameters(k * p.delta_omega, p, "D").gamma_sq)
        except ValueError:
            continue
    gamma_sq_0 = abs(pair_parameters(0.0, p, "D").gamma_sq)
    flags = [
        ("sum_gamma_sq_over_gamma_q", total / gq, 1.0),
        ("omega_ab_over_epsilon", max(p.omega_a, p.omega_b) / p.epsilon,
         FLAG_OMEGA_OVER_EPSILON),
        ("alpha", p.alpha, FLAG_ALPHA),
        # the stated smallness condition reads omega_{a,b} << gamma_q while the
        # reference parameters have omega_{a,b} ~ 50 gamma_q; both ratios are
        # reported, neither direction is hard-enforced
        ("gamma_q_over_omega_ab", gq / min(p.omega_a, p.omega_b), 1.0),
        ("omega_ab_over_gamma_q", min(p.omega_a, p.omega_b) / gq, 1.0),
        ("two_gamma_sq0_over_delta_omega", 2.0 * gamma_sq_0 / p.delta_omega, 1.0),
    ]
    if p.strobe_dt is not None:
        flags.append(("strobe_dt_times_gamma_sq0", p.strobe_dt * gamma_sq_0, FLAG_STROBE))
    return flags


@dataclass
class BandPoint:
    nu: float
    status: str  # "ok" | error text
    report: metrics.SqueezingReport | None
    pair: BogoliubovPair | None
    gamma_sq: complex | None
    var_Xnu: float | None = None


def band_sweep(p: ContinuumParams, mode: str = "with_corrections",
               scheme: str = "averaged") -> list[BandPoint]:
    """Per-nu steady-state reports across the symmetric band.

    ``scheme`` selects the averaged generator (default) or the stroboscopic
    fixed point; individual point failures are recorded without aborting.
    """
    if scheme not in ("averaged", "strobe"):
        raise ValueError(f"unknown scheme {scheme!r}")
    flags = continuum_validity_flags(p)
    points: list[BandPoint] = []
    for nu in p.nu_grid():
        try:
            pm = pair_parameters(float(nu), p, "D")
            if scheme == "averaged":
                state = gaussian.lyapunov_steady(averaged_drift(float(nu), p, mode))
            else:
                state = stroboscopic_steady(float(nu), p, mode=mode).strobe
            var_xnu = metrics.two_mode_quadrature_variance(state)
            rep = metrics.SqueezingReport(
                var_x=state.var_x(0),
                var_p=state.var_p(0),
                S_db=metrics.squeezing_db(var_xnu, 0.5),
                occ_bare=[metrics.occupation_bare(state, 0),
                          metrics.occupation_bare(state, 1)],
                occ_D=metrics.occupation_D(state, pm.pair, (0, 1)),
                occ_Dbar=metrics.occupation_D(state, pm.pair, (1, 0)),
                validity_flags=flags,
            )
            points.append(BandPoint(float(nu), "ok", rep, pm.pair, pm.gamma_sq, var_xnu))
        except Exception as exc:  # per-point failures must not abort the sweep
            points.append(BandPoint(float(nu), f"error: {exc}", None, None, None))
    return points
