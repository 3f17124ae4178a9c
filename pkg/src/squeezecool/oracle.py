"""Brute-force validation of the effective single-mode model: simulate the
full driven qubit + cavity system in the lab frame and compare against the
adiabatically eliminated generator.

The full model is

    H(t) = (epsilon/2) sigma_z + omega0 a^+a + g (sigma^+ + sigma^-)(a + a^+)
           - sum_m eta_m w_dm cos(w_dm t) sigma_z

with qubit decay (sigma^-, gamma_q) and optional cavity loss (a, kappa).

Drive retuning: the off-resonant couplings pull the cavity frequency
(dispersive + Bloch-Siegert, about -0.21 g^2 at the reference detunings with
the exact Bessel-weighted sidebands, see ``exact_frequency_pull``).  Driving
at the bare resonance therefore detunes the squeezing channel by a
g-independent fraction of Gamma_sq and the squeezing never forms in the
omega0 frame; the default here tunes the drives to the pulled frequency and
reports quadratures in the pulled rotating frame, matching the "recentered"
effective model.

Numerically the master equation is integrated in the interaction picture of
H0 (exact transformation; dissipators are invariant, observables pick known
phases), which lowers the fastest generator frequency from epsilon + w_d2 to
epsilon + omega0 and keeps full-horizon runs at minutes scale.  The frame
code is validated against the lab-frame evolve_timedep on short horizons.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse

from . import _integrate, singlemode
from .hilbert import FockSpace, Op, destroy, qubit_lower, qubit_z, top_level_population
from .master import LindbladTerm, LiouvillianSpec
from .singlemode import SingleModeOptions, SingleModeParams


def exact_frequency_pull(base: SingleModeParams, gamma: float,
                         drives: list[tuple[float, float]] | None = None,
                         kmax: int = 6) -> float:
    """Second-order cavity frequency pull with the exact (Bessel) drive phase.

    The modulated coupling G(t) = g exp(-2i sum eta_m sin(w_m t)) decomposes
    over the drive-harmonic lattice with amplitudes J_{k1}(2 eta_1) J_{k2}
    (2 eta_2); every off-resonant component pulls the cavity by
    g_n^2 E / (E^2 + gamma^2) through both its a and a^+ sidebands.  The
    linear-order sideband table underestimates the carrier depletion and
    overestimates the pull by ~10% at eta_1 = 0.2.
    """
    from scipy.special import jv

    if drives is None:
        drives = [(base.epsilon - base.omega0, base.eta1),
                  (base.epsilon + base.omega0, base.eta2)]
    (w1, e1), (w2, e2) = drives
    pull = 0.0
    for k1 in range(-kmax, kmax + 1):
        for k2 in range(-kmax, kmax + 1):
            amp = base.g * jv(k1, 2 * e1) * jv(k2, 2 * e2)
            if amp == 0.0:
                continue
            nu = k1 * w1 + k2 * w2
            for e_rot in (nu - w1, nu - w2):  # a-sideband, a^+-sideband
                pull += amp**2 * e_rot / (e_rot**2 + gamma**2)
    return pull


@dataclass
class FullModelParams:
    """Lab-frame simulation parameters.

    ``drives`` is a list of (omega_d, eta); when None the two-drive squeezing
    configuration is generated, retuned to the pulled cavity frequency unless
    ``retune`` is False.  ``horizon`` defaults to 20 / Gamma_sq (the quoted
    2 gbar^2 / gamma_q rate), the minimum for steady-state claims.
    """

    base: SingleModeParams
    drives: list[tuple[float, float]] | None = None
    horizon: float | None = None
    n_samples: int = 600
    fock_dim: int = 15
    retune: bool = True
    tol: float = 1e-9
    options: SingleModeOptions = field(default_factory=SingleModeOptions)

    @property
    def space(self) -> FockSpace:
        return FockSpace((self.fock_dim,), has_qubit=True)

    @property
    def kappa(self) -> float:
        return self.base.omega0 / self.base.Q

    def gamma_sq_paper(self) -> float:
        dec = singlemode.sideband_decomposition(self.base)
        return singlemode.effective_rates(self.base, dec, linewidth="paper").gamma_sq

    def frame_frequency(self) -> float:
        """Reporting-frame frequency: pulled cavity frequency when retuned."""
        return self.base.omega0 + (self.pull() if self.retune else 0.0)

    def pull(self) -> float:
        gamma = self.base.gamma_q
        if self.options.linewidth == "coherence":
            gamma = 0.5 * gamma
        return exact_frequency_pull(self.base, gamma)

    def resolved_drives(self) -> list[tuple[float, float]]:
        if self.drives is not None:
            return list(self.drives)
        w = self.frame_frequency()
        return [(self.base.epsilon - w, self.base.eta1),
                (self.base.epsilon + w, self.base.eta2)]

    def resolved_horizon(self) -> float:
        return self.horizon if self.horizon is not None else 20.0 / self.gamma_sq_paper()


def lab_frame_generator(p: FullModelParams, t: float) -> tuple[Op, list[LindbladTerm]]:
    """H(t) and the static dissipators of the full model in the lab frame."""
    space = p.space
    a = destroy(space, 0)
    sm = qubit_lower(space)
    sz = qubit_z(space)
    b = p.base
    H = (0.5 * b.epsilon) * sz + b.omega0 * (a.dag() @ a) \
        + b.g * ((sm.dag() + sm) @ (a + a.dag()))
    drive = -sum(eta * wd * np.cos(wd * t) for wd, eta in p.resolved_drives())
    H = H + drive * sz
    terms = [LindbladTerm(sm, b.gamma_q)]
    if p.kappa > 0:
        terms.append(LindbladTerm(a, p.kappa))
    return H, terms


def lab_frame_spec(p: FullModelParams) -> LiouvillianSpec:
    """Time-dependent spec for the (slow, reference) lab-frame integrator."""
    space = p.space
    return LiouvillianSpec(space, time_dependent_hook=lambda t: lab_frame_generator(p, t))


# -- fast interaction-picture integration -------------------------------------


def _comm_superop(M: np.ndarray) -> scipy.sparse.csr_matrix:
    """-i (I (x) M - M^T (x) I), column-stacking convention."""
    d = M.shape[0]
    eye = scipy.sparse.identity(d, format="csr", dtype=complex)
    Ms = scipy.sparse.csr_matrix(M)
    return (-1j * (scipy.sparse.kron(eye, Ms) - scipy.sparse.kron(Ms.T, eye))).tocsr()


def _dissipator_superop(L: np.ndarray, gamma: float) -> scipy.sparse.csr_matrix:
    d = L.shape[0]
    eye = scipy.sparse.identity(d, format="csr", dtype=complex)
    Ls = scipy.sparse.csr_matrix(L)
    LdL = scipy.sparse.csr_matrix(L.conj().T @ L)
    out = gamma * (scipy.sparse.kron(Ls.conj(), Ls)
                   - 0.5 * (scipy.sparse.kron(eye, LdL) + scipy.sparse.kron(LdL.T, eye)))
    return out.tocsr()


@dataclass
class OracleTrajectory:
    """Sampled full-model moments, in the H0 interaction picture."""

    times: np.ndarray
    a_mom: np.ndarray  # <a>_I
    a2_mom: np.ndarray  # <a^2>_I
    nbar: np.ndarray
    p_excited: np.ndarray
    purity: np.ndarray
    top2: np.ndarray
    trace_defect: float
    herm_defect: float
    min_eig: float
    frame_delta: float  # reporting frame frequency minus omega0
    n_steps: int

    def var_x(self) -> np.ndarray:
        """Quadrature variance of x = a e^{i w_f t} + h.c. in the report frame."""
        ph = np.exp(2j * self.frame_delta * self.times)
        mean_x = 2.0 * np.real(self.a_mom * np.exp(1j * self.frame_delta * self.times))
        return 2.0 * np.real(self.a2_mom * ph) + 2.0 * self.nbar + 1.0 - mean_x**2

    def var_p(self) -> np.ndarray:
        ph = np.exp(2j * self.frame_delta * self.times)
        mean_p = 2.0 * np.imag(self.a_mom * np.exp(1j * self.frame_delta * self.times))
        return -2.0 * np.real(self.a2_mom * ph) + 2.0 * self.nbar + 1.0 - mean_p**2


def simulate_full(p: FullModelParams, sample_times: np.ndarray | None = None
                  ) -> OracleTrajectory:
    """Integrate the full model from |ground, vacuum> and sample moments."""
    space = p.space
    d = space.dim
    b = p.base
    a = destroy(space, 0).matrix
    sm = qubit_lower(space).matrix
    sz = qubit_z(space).matrix

    L_static = _dissipator_superop(sm, b.gamma_q)
    if p.kappa > 0:
        L_static = (L_static + _dissipator_superop(a, p.kappa)).tocsr()
    # the sigma_z commutator superoperator is diagonal; build it directly
    zfull = np.diag(sz)
    zdiag = np.array([-1j * (zfull[i] - zfull[j]) for j in range(d) for i in range(d)])

    drives = p.resolved_drives()
    camp = np.array([-eta * wd for wd, eta in drives])
    wfreq = np.array([wd for wd, eta in drives])

    P1 = sm.conj().T @ a  # sigma^+ a, rotating at epsilon - omega0
    P2 = sm.conj().T @ a.conj().T  # sigma^+ a^+, rotating at epsilon + omega0
    dm = b.epsilon - b.omega0
    dp = b.epsilon + b.omega0
    phased = [
        (b.g * _comm_superop(P1), dm),
        (b.g * _comm_superop(P1.conj().T), -dm),
        (b.g * _comm_superop(P2), dp),
        (b.g * _comm_superop(P2.conj().T), -dp),
    ]

    T = p.resolved_horizon()
    if sample_times is None:
        sample_times = np.linspace(T / p.n_samples, T, p.n_samples)
    rho0 = np.zeros((d, d), dtype=complex)
    rho0[0, 0] = 1.0
    # the embedded error control resolves the epsilon + omega0 oscillations on
    # its own at these tolerances; the step bound is a safety backstop
    fmax = b.epsilon + b.omega0
    max_step = 1.0 / (5.0 * fmax)
    states, n_steps = _integrate.integrate_driven(
        L_static, zdiag, camp, wfreq, phased, rho0.flatten(order="F"),
        sample_times, rtol=p.tol, atol=p.tol, max_step=max_step,
    )

    n_op = a.conj().T @ a
    a2 = a @ a
    pe_op = sm.conj().T @ sm
    ns = len(sample_times)
    a_mom = np.empty(ns, dtype=complex)
    a2_mom = np.empty(ns, dtype=complex)
    nbar = np.empty(ns)
    p_exc = np.empty(ns)
    purity = np.empty(ns)
    top2 = np.empty(ns)
    trace_defect = herm_defect = 0.0
    min_eig = 1.0
    for k in range(ns):
        rho = states[k].reshape((d, d), order="F")
        trace_defect = max(trace_defect, abs(np.trace(rho).real - 1.0))
        herm_defect = max(herm_defect, float(np.max(np.abs(rho - rho.conj().T))))
        rho = 0.5 * (rho + rho.conj().T)
        a_mom[k] = np.trace(a @ rho)
        a2_mom[k] = np.trace(a2 @ rho)
        nbar[k] = np.trace(n_op @ rho).real
        p_exc[k] = np.trace(pe_op @ rho).real
        purity[k] = float(np.sum(np.abs(states[k]) ** 2))
        top2[k] = top_level_population(rho, space)
    # positivity at the final sample only (eigendecomposition is the slow part)
    rho_last = states[-1].reshape((d, d), order="F")
    min_eig = float(np.min(np.linalg.eigvalsh(0.5 * (rho_last + rho_last.conj().T))))
    return OracleTrajectory(
        times=np.asarray(sample_times), a_mom=a_mom, a2_mom=a2_mom, nbar=nbar,
        p_excited=p_exc, purity=purity, top2=top2,
        trace_defect=trace_defect, herm_defect=herm_defect, min_eig=min_eig,
        frame_delta=p.frame_frequency() - b.omega0, n_steps=n_steps,
    )


# -- sideband spectrum of the exact drive phase --------------------------------


@dataclass
class SidebandSpectrumReport:
    carrier: complex
    sidebands: dict[float, complex]  # frequency -> measured amplitude
    expected: dict[float, complex]
    max_relative_error: float
    eta_sq_coefficient: float  # fitted C with |error| <= C eta^2 (units of g)


def effective_coupling_check(
    drives: list[tuple[float, float]], g: float = 1.0, n_grid: int = 2**16
) -> SidebandSpectrumReport:
    """Fourier analysis of the exact interaction-picture coupling phase.

    The exact modulated coupling is G(t) = g exp(-2i sum_m eta_m sin(w_m t));
    its Fourier weight at frequency 0 is compared with g and at -/+ w_m with
    +/- eta_m g (the linear-order sideband amplitudes).
    """
    freqs = np.array([wd for wd, _ in drives])
    etas = np.array([eta for _, eta in drives])
    if np.any(etas > 0.3):
        raise ValueError("sideband check is meant for small drive amplitudes")
    # integration window: many periods of every drive, near-commensurate
    w_min = freqs.min()
    T = 2.0 * np.pi * 512 / w_min
    t = np.linspace(0.0, T, n_grid, endpoint=False)
    phase = np.zeros_like(t)
    for wd, eta in drives:
        phase += eta * np.sin(wd * t)
    G = g * np.exp(-2j * phase)

    def fourier(w):
        """Amplitude of exp(+i w t) in G."""
        return complex(np.mean(G * np.exp(-1j * w * t)))

    carrier = fourier(0.0)
    sidebands = {}
    expected = {0.0: complex(g)}
    for wd, eta in drives:
        sidebands[-wd] = fourier(-wd)
        sidebands[+wd] = fourier(+wd)
        expected[-wd] = complex(+eta * g)
        expected[+wd] = complex(-eta * g)
    errs = [abs(carrier - g) / g]
    for wd, eta in drives:
        if eta > 0:
            errs.append(abs(sidebands[-wd] - expected[-wd]) / (eta * g))
            errs.append(abs(sidebands[+wd] - expected[+wd]) / (eta * g))
    # eta^2 coefficient from the dominant sideband deficit
    C = 0.0
    for wd, eta in drives:
        if eta > 0:
            C = max(C, abs(sidebands[-wd] - eta * g) / (eta**2))
    return SidebandSpectrumReport(
        carrier=carrier,
        sidebands=sidebands,
        expected=expected,
        max_relative_error=float(max(errs)),
        eta_sq_coefficient=float(C / g),
    )


# -- comparison against the effective model -----------------------------------


@dataclass
class DiscrepancyReport:
    settled: bool
    drift: float
    var_x_full: float
    var_p_full: float
    nbar_full: float
    var_x_effective: float
    var_x_ideal: float
    rel_error_vs_effective: float
    rel_error_vs_ideal: float
    max_qubit_excitation: float
    validity_gamma_sq_over_gamma_q: float
    validity_gamma_q_over_min_E: float


def compare_effective(traj: OracleTrajectory, p: FullModelParams,
                      window: float = 0.1) -> DiscrepancyReport:
    """Late-time full-model moments against the effective steady state."""
    n = len(traj.times)
    w = max(4, int(window * n))
    var_x = traj.var_x()
    late = var_x[-w:]
    half = w // 2
    drift = abs(np.mean(late[half:]) - np.mean(late[:half])) / np.mean(late)
    settled = bool(drift < 0.01)

    options = SingleModeOptions(
        include_corrections=p.options.include_corrections,
        include_loss=p.kappa > 0,
        linewidth=p.options.linewidth,
        lamb=p.options.lamb,
    )
    eff = singlemode.steady_state_gaussian(p.base, options)
    dec = singlemode.sideband_decomposition(p.base)
    rates = singlemode.effective_rates(p.base, dec, linewidth=options.linewidth)
    ideal = (dec.pair.u - dec.pair.v) ** 2

    var_x_full = float(np.mean(late))
    var_p_full = float(np.mean(traj.var_p()[-w:]))
    nbar_full = float(np.mean(traj.nbar[-w:]))
    min_e = min(abs(c.E_lambda) for c in dec.corrections)
    return DiscrepancyReport(
        settled=settled,
        drift=float(drift),
        var_x_full=var_x_full,
        var_p_full=var_p_full,
        nbar_full=nbar_full,
        var_x_effective=eff.var_x(0),
        var_x_ideal=float(ideal),
        rel_error_vs_effective=abs(var_x_full - eff.var_x(0)) / eff.var_x(0),
        rel_error_vs_ideal=abs(var_x_full - ideal) / ideal,
        max_qubit_excitation=float(np.max(traj.p_excited)),
        validity_gamma_sq_over_gamma_q=rates.gamma_sq / p.base.gamma_q,
        validity_gamma_q_over_min_E=p.base.gamma_q / min_e,
    )
