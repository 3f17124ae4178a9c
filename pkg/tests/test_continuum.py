import numpy as np
import pytest

from squeezecool import continuum as ct
from squeezecool import gaussian as ga
from squeezecool import hilbert as hb
from squeezecool import master, metrics


def fig3_params(**kw):
    return ct.ContinuumParams(**kw)


def test_coupling_value():
    """alpha = 6e-4, dw = 0.01, w = 3: g_w = sqrt(2 a dw w) = 6.0e-3."""
    assert ct.coupling(3.0, 6e-4, 0.01) == pytest.approx(6.0e-3)


def test_coupling_sqrt_scaling():
    g1 = ct.coupling(1.7, 3e-4, 0.02)
    g4 = ct.coupling(4 * 1.7, 3e-4, 0.02)
    assert g4 / g1 == pytest.approx(2.0, rel=1e-14)
    assert ct.coupling(1e-12, 3e-4, 0.02) < 1e-6


def test_coupling_rejects_nonpositive():
    with pytest.raises(ValueError):
        ct.coupling(0.0, 6e-4, 0.01)
    with pytest.raises(ValueError):
        ct.coupling(-2.0, 6e-4, 0.01)


def test_qubit_decay_value():
    """gamma_q = 2 pi alpha eps ~ 0.05655 at Fig. 3 parameters."""
    assert ct.qubit_decay(6e-4, 15.0) == pytest.approx(0.05655, abs=1e-5)
    assert ct.qubit_decay(0.0, 15.0) == 0.0
    assert ct.qubit_decay(2 * 6e-4, 15.0) == pytest.approx(2 * ct.qubit_decay(6e-4, 15.0))


def test_pair_parameters_nu0():
    """eta1 = eta2: u0 = sqrt(wa/(wa-wb)) = sqrt5, v0 = sqrt(wb/(wa-wb)) = 2."""
    pm = ct.pair_parameters(0.0, fig3_params(), "D")
    assert pm.pair.u == pytest.approx(np.sqrt(5.0), abs=1e-12)
    assert pm.pair.v == pytest.approx(2.0, abs=1e-12)
    assert pm.pair.u**2 - pm.pair.v**2 == pytest.approx(1.0, abs=1e-12)
    # gbar_0^2 = 2 alpha dw eta^2 (wa - wb)
    assert pm.pair.gbar**2 == pytest.approx(2 * 6e-4 * 0.01 * 0.04 * 0.6, rel=1e-12)
    assert pm.gamma_sq.imag == 0.0
    assert pm.gamma_sq.real == pytest.approx(pm.pair.gbar**2 / fig3_params().gamma_q)


def test_pair_parameters_rejects_inverted_band():
    """omega_a < omega_b makes gbar imaginary at eta1 = eta2 (hard error)."""
    with pytest.raises(ValueError, match="imaginary"):
        fig3_params(omega_a=2.4, omega_b=3.0)


def test_bogoliubov_identity_across_grid():
    p = fig3_params()
    for config in ("D", "Dbar"):
        for nu in p.nu_grid():
            pair = ct.pair_parameters(float(nu), p, config).pair
            assert pair.u**2 - pair.v**2 == pytest.approx(1.0, abs=1e-12)


def test_bar_drive_consistency_nu0():
    """At nu = 0 the etabar recipe reproduces (u0, v0) on the swapped pair,
    and the two operators commute in a small Fock space."""
    p = fig3_params()
    e1b, e2b = ct.bar_drive_amplitudes(p)
    g_a = ct.coupling(p.omega_a, p.alpha, p.delta_omega)
    g_b = ct.coupling(p.omega_b, p.alpha, p.delta_omega)
    gbar_sq = e1b**2 * g_b**2 - e2b**2 * g_a**2
    u_bar = e1b * g_b / np.sqrt(gbar_sq)
    v_bar = e2b * g_a / np.sqrt(gbar_sq)
    pm = ct.pair_parameters(0.0, p, "D")
    assert u_bar == pytest.approx(pm.pair.u, abs=1e-12)
    assert v_bar == pytest.approx(pm.pair.v, abs=1e-12)

    space = hb.FockSpace((8, 8))
    D = hb.bogoliubov_op(space, pm.pair, 0, 1)
    Dbar = hb.bogoliubov_op(space, pm.pair, 1, 0)
    comm = D.commutator(Dbar).matrix
    P = np.zeros((8, 8))
    P[np.arange(6), np.arange(6)] = 1.0
    proj = np.kron(P, P)
    np.testing.assert_allclose(proj @ comm @ proj, np.zeros_like(comm), atol=1e-12)


def test_gamma_sq_lorentzian_falloff():
    p = fig3_params()
    mags = [abs(ct.pair_parameters(nu, p, "D").gamma_sq) for nu in (0.0, 0.05, 0.1, 0.2)]
    assert all(b < a for a, b in zip(mags, mags[1:]))


def test_ideal_pair_dark_state():
    """One-sided cooling leaves the partner hot; both sides cool to the
    two-mode squeezed vacuum."""
    p = fig3_params()
    pm = ct.pair_parameters(0.0, p, "D")
    one_sided = ga.drift_diffusion(
        ct.pair_linear_jumps(pm, with_corrections=False, with_loss=False)
        + [ga.LinearJump([1, 0], [0, 0], 1e-6 * pm.gamma_sq.real),
           ga.LinearJump([0, 1], [0, 0], 1e-6 * pm.gamma_sq.real)],
        n_modes=2)
    st1 = ga.lyapunov_steady(one_sided)
    assert metrics.occupation_D(st1, pm.pair, (0, 1)) < 1e-4
    assert metrics.occupation_D(st1, pm.pair, (1, 0)) == pytest.approx(
        pm.pair.v**2, rel=1e-3)

    st2 = ga.lyapunov_steady(ct.averaged_drift(0.0, p, "ideal"))
    assert metrics.occupation_D(st2, pm.pair, (0, 1)) < 1e-10
    assert metrics.occupation_D(st2, pm.pair, (1, 0)) < 1e-10
    assert metrics.two_mode_quadrature_variance(st2) == pytest.approx(
        (np.sqrt(5) - 2) ** 2 / 2, abs=1e-10)


def test_loss_only_gives_vacuum():
    p = fig3_params(Q=1e4)
    pm = ct.pair_parameters(0.05, p, "D")
    jumps = [j for j in ct.pair_linear_jumps(pm) if j is not None][-2:]  # loss only
    st = ga.lyapunov_steady(ga.drift_diffusion(jumps, n_modes=2))
    np.testing.assert_allclose(st.cov, np.eye(4), atol=1e-12)


def test_fock_pair_liouvillian_matches_gaussian():
    """Two-mode Fock steady state agrees with the Lyapunov solution at nu=0
    with eta scaled down (keeps v0 <= 1 and the truncation feasible)."""
    p = fig3_params(eta1=0.2, eta2=0.0894427190999916)  # v0 ~ 0.47
    pm = ct.pair_parameters(0.0, p, "D")
    assert pm.pair.v < 0.5
    dims = (14, 14)
    spec_d = ct.build_pair_liouvillian(pm, "with_corrections", dims)
    pm_bar = ct.pair_parameters(0.0, p, "Dbar")
    spec_b = ct.build_pair_liouvillian(pm_bar, "with_corrections", dims)
    space = spec_d.space
    avg_terms = [master.LindbladTerm(t.op, 0.5 * t.gamma)
                 for t in spec_d.terms + spec_b.terms]
    dm = master.steady_state(master.LiouvillianSpec(space, terms=avg_terms),
                             check_unique=False)
    fock_state = metrics.gaussian_from_fock(dm.rho, space)
    gauss = ga.lyapunov_steady(ct.averaged_drift(0.0, p, "with_corrections"))
    np.testing.assert_allclose(fock_state.cov, gauss.cov, atol=1e-6)


def test_pair_independence_block_factorization():
    """A joint 4-mode generator made of two independent pairs factorizes:
    the joint steady state equals the tensor product of pair steady states."""
    p = fig3_params(eta1=0.12, eta2=0.05)  # small v keeps dim-4 modes adequate
    dims = (4, 4)
    nus = (0.0, 0.1)
    # per-pair Fock steady states
    pair_states = []
    for nu in nus:
        pm = ct.pair_parameters(nu, p, "D")
        spec = ct.build_pair_liouvillian(pm, "ideal", dims)
        extra = [master.LindbladTerm(hb.destroy(spec.space, m), 0.02 * pm.gamma_sq.real)
                 for m in (0, 1)]
        spec = master.LiouvillianSpec(spec.space, terms=spec.terms + extra)
        pair_states.append(master.steady_state(spec, check_unique=False).rho)
    # joint 4-mode system, modes ordered (a1, b1, a2, b2)
    joint_space = hb.FockSpace(dims + dims)
    terms = []
    for k, nu in enumerate(nus):
        pm = ct.pair_parameters(nu, p, "D")
        D = hb.bogoliubov_op(joint_space, pm.pair, 2 * k, 2 * k + 1)
        terms.append(master.LindbladTerm(D, pm.gamma_sq))
        for m in (2 * k, 2 * k + 1):
            terms.append(master.LindbladTerm(hb.destroy(joint_space, m),
                                             0.02 * pm.gamma_sq.real))
    joint = master.steady_state(master.LiouvillianSpec(joint_space, terms=terms),
                                check_unique=False)
    expected = np.kron(pair_states[0], pair_states[1])
    assert np.max(np.abs(joint.rho - expected)) < 1e-8


def test_stroboscopic_small_dt_matches_averaged():
    p = fig3_params(Q=1e5)
    g0 = abs(ct.pair_parameters(0.0, p, "D").gamma_sq)
    res = ct.stroboscopic_steady(0.0, p, strobe_dt=1e-3 / g0)
    assert res.relative_mismatch < 1e-4


def test_stroboscopic_large_dt_breaks_down():
    p = fig3_params(Q=1e5)
    g0 = abs(ct.pair_parameters(0.0, p, "D").gamma_sq)
    res = ct.stroboscopic_steady(0.0, p, strobe_dt=10.0 / g0)
    assert res.relative_mismatch > 1e-2


def test_stroboscopic_order_swap_fixed_point():
    """E_D(dt) applied to the fixed point of E_Dbar o E_D gives the fixed
    point of E_D o E_Dbar (half-cycle conjugation of fixed points)."""
    p = fig3_params(Q=1e5)
    g0 = abs(ct.pair_parameters(0.0, p, "D").gamma_sq)
    dt = 0.5 / g0
    dd_D, dd_B = ct.half_cycle_drifts(0.0, p)
    f1, j1 = ga.affine_propagator(dd_D, dt)
    f2, j2 = ga.affine_propagator(dd_B, dt)

    def fixed_point(g, k):
        cov = np.eye(4)
        for _ in range(200000):
            new = g @ cov @ g.T + k
            if np.max(np.abs(new - cov)) < 1e-13:
                return new
            cov = new
        raise AssertionError("no convergence")

    # map order: first D then Dbar (cov_1 = F2(F1 c F1^T + J1)F2^T + J2)
    cov_ba = fixed_point(f2 @ f1, f2 @ j1 @ f2.T + j2)
    cov_ab = fixed_point(f1 @ f2, f1 @ j2 @ f1.T + j1)
    conj = f1 @ cov_ba @ f1.T + j1
    np.testing.assert_allclose(conj, cov_ab, atol=1e-10)


def test_band_sweep_ideal_dark_everywhere():
    p = fig3_params(n_nu=11)
    points = ct.band_sweep(p, mode="ideal")
    assert all(pt.status == "ok" for pt in points)
    for pt in points:
        assert pt.report.occ_D < 1e-10
        assert pt.report.occ_Dbar < 1e-10


def test_band_sweep_q_ordering_at_nu0():
    occs, sdbs = [], []
    for Q in (1e3, 1e4, 1e5, 1e6):
        p = fig3_params(Q=Q, n_nu=3, nu_max=0.01)
        points = ct.band_sweep(p)
        mid = points[1]
        assert mid.nu == pytest.approx(0.0)
        occs.append(mid.report.occ_D)
        sdbs.append(mid.report.S_db)
    assert all(b < a for a, b in zip(occs, occs[1:]))
    assert all(b > a for a, b in zip(sdbs, sdbs[1:]))


def test_band_sweep_loss_dominated_limit():
    """kappa >> Gamma_sq: occupations near bare vacuum, <D+D> -> v^2."""
    p = fig3_params(Q=0.1, n_nu=3, nu_max=0.05)  # kappa = 0.1 >> 5e-6
    for pt in ct.band_sweep(p):
        assert abs(pt.report.occ_bare[0]) < 2e-4
        assert pt.report.occ_D == pytest.approx(pt.pair.v**2, rel=1e-3)


def test_validity_flags():
    p = fig3_params()
    flags = dict((n, (r, t)) for n, r, t in ct.continuum_validity_flags(p))
    assert flags["sum_gamma_sq_over_gamma_q"][0] < 1.0
    assert flags["omega_ab_over_gamma_q"][0] > 1.0  # the paper's condition (i) tension
    assert flags["alpha"][0] == pytest.approx(6e-4)


def test_strobe_contractivity_guard():
    p = fig3_params(Q=1e5)
    with pytest.raises(ct.StroboscopicDivergence):
        # zero-duration cycles cannot contract
        ct.stroboscopic_steady(0.0, p, strobe_dt=0.0)
