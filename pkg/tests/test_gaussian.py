import numpy as np
import pytest

from squeezecool import gaussian as ga
from squeezecool import hilbert as hb


def test_decay_channel_drift_diffusion():
    """Single decay channel a with rate kappa: A = -(kappa/2) I, D = kappa I."""
    kappa = 0.37
    dd = ga.drift_diffusion([ga.LinearJump([1], [0], kappa)])
    np.testing.assert_allclose(dd.A, -0.5 * kappa * np.eye(2), atol=1e-14)
    np.testing.assert_allclose(dd.Dmat, kappa * np.eye(2), atol=1e-14)


def test_squeezing_channel_steady_variances():
    """D = u a + v a+ at real rate: var(x) = (u-v)^2, var(p) = (u+v)^2."""
    u, v = 1.25, 0.75
    dd = ga.drift_diffusion([ga.LinearJump([u], [v], 0.8)])
    st = ga.lyapunov_steady(dd)
    assert st.var_x(0) == pytest.approx((u - v) ** 2, abs=1e-12)
    assert st.var_p(0) == pytest.approx((u + v) ** 2, abs=1e-12)
    assert st.cov[0, 1] == pytest.approx(0.0, abs=1e-12)


def test_imaginary_rate_is_pure_hamiltonian_flow():
    """Im-only rate: no diffusion, symplectic eigenvalues conserved."""
    dd = ga.drift_diffusion([ga.LinearJump([1], [0], 0.45j)])
    np.testing.assert_allclose(dd.Dmat, np.zeros((2, 2)), atol=1e-14)
    state = ga.GaussianState(1, np.zeros(2), np.diag([0.25, 4.0]))
    for t in (0.3, 1.7, 4.0):
        out = ga.evolve_covariance(state, dd, t)
        np.testing.assert_allclose(
            ga.symplectic_eigenvalues(out.cov), [1.0], atol=1e-10)


def test_lyapunov_decay_gives_vacuum():
    dd = ga.drift_diffusion([ga.LinearJump([1], [0], 1.3)])
    st = ga.lyapunov_steady(dd)
    np.testing.assert_allclose(st.cov, np.eye(2), atol=1e-12)


def test_lyapunov_two_mode_pair_nu0():
    """u = sqrt5, v = 2 two-sided cooling: var X0 = (sqrt5-2)^2/2 ~ 12.5 dB."""
    u, v = np.sqrt(5.0), 2.0
    jumps = [ga.LinearJump([u, 0], [0, v], 1.0), ga.LinearJump([0, u], [v, 0], 1.0)]
    st = ga.lyapunov_steady(ga.drift_diffusion(jumps))
    var_x0 = 0.25 * (st.cov[0, 0] + st.cov[2, 2] + 2 * st.cov[0, 2])
    assert var_x0 == pytest.approx((np.sqrt(5) - 2) ** 2 / 2, abs=1e-10)
    # two-sided ideal steady state is pure
    np.testing.assert_allclose(ga.symplectic_eigenvalues(st.cov), [1, 1], atol=1e-8)


def test_lyapunov_rejects_unstable_drift():
    """Anti-damped configuration (heating > cooling) must be rejected."""
    jumps = [ga.LinearJump([1], [0], 0.2), ga.LinearJump([0], [1], 0.5)]
    with pytest.raises(ga.UnstableDriftError):
        ga.lyapunov_steady(ga.drift_diffusion(jumps))


def test_lyapunov_rejects_marginal_drift():
    """Zero-rate drift (eta2 -> eta1 limit) is marginally stable, not cooling."""
    dd = ga.DriftDiffusion(np.zeros((2, 2)), np.zeros((2, 2)))
    with pytest.raises(ga.UnstableDriftError):
        ga.lyapunov_steady(dd)


def test_evolve_covariance_identity_at_t0():
    st = ga.GaussianState(1, np.array([0.3, -0.1]), np.diag([0.5, 2.0]))
    dd = ga.drift_diffusion([ga.LinearJump([1], [0], 0.7)])
    out = ga.evolve_covariance(st, dd, 0.0)
    np.testing.assert_allclose(out.cov, st.cov)
    np.testing.assert_allclose(out.mean, st.mean)


def test_evolve_covariance_vacuum_fixed_point():
    dd = ga.drift_diffusion([ga.LinearJump([1], [0], 0.9)])
    vac = ga.vacuum_state(1)
    for t in (0.5, 3.0, 10.0):
        out = ga.evolve_covariance(vac, dd, t)
        np.testing.assert_allclose(out.cov, np.eye(2), atol=1e-12)


def test_evolve_covariance_converges_to_lyapunov():
    u, v = np.cosh(0.4), np.sinh(0.4)
    jumps = [ga.LinearJump([u], [v], 0.6), ga.LinearJump([1], [0], 0.05)]
    dd = ga.drift_diffusion(jumps)
    target = ga.lyapunov_steady(dd)
    out = ga.evolve_covariance(ga.vacuum_state(1), dd, 200.0)
    np.testing.assert_allclose(out.cov, target.cov, atol=1e-8)
    # mean decays to zero as well
    moved = ga.GaussianState(1, np.array([1.0, -2.0]), np.eye(2))
    out = ga.evolve_covariance(moved, dd, 200.0)
    np.testing.assert_allclose(out.mean, np.zeros(2), atol=1e-10)


def test_drift_diffusion_complex_rate_matches_split(rng):
    """Complex-rate channel equals Re-dissipator + explicit O+O Hamiltonian."""
    c, d = 0.8 + 0.3j, 0.4 - 0.2j
    gamma = 0.5 + 0.7j
    full = ga.drift_diffusion([ga.LinearJump([c], [d], gamma)])
    b = ga.LinearJump([c], [d], 1.0).b_vector()
    G = gamma.imag * np.real(np.outer(b, b.conj()))
    split = ga.drift_diffusion([ga.LinearJump([c], [d], gamma.real)], hamiltonian_form=G)
    np.testing.assert_allclose(full.A, split.A, atol=1e-13)
    np.testing.assert_allclose(full.Dmat, split.Dmat, atol=1e-13)


def test_nonlinear_jump_rejected():
    sp = hb.FockSpace((6,))
    a = hb.destroy(sp, 0)
    with pytest.raises(ValueError, match="nonlinear"):
        ga.linear_jump_from_op(a @ a, 1.0)


def test_linear_jump_extraction_roundtrip():
    sp = hb.FockSpace((7, 7))
    pair = hb.BogoliubovPair(np.cosh(0.5), np.sinh(0.5))
    D = hb.bogoliubov_op(sp, pair, 0, 1)
    j = ga.linear_jump_from_op(D, 0.3)
    np.testing.assert_allclose(j.coeff_a, [pair.u, 0.0], atol=1e-12)
    np.testing.assert_allclose(j.coeff_adag, [0.0, pair.v], atol=1e-12)


def test_uncertainty_validation():
    with pytest.raises(ValueError, match="uncertainty"):
        ga.GaussianState(1, np.zeros(2), np.diag([0.25, 0.25]))


def test_purity_degrades_with_extra_channel():
    """Ideal squeezing is pure; adding bare-mode loss pushes sympl eigs > 1."""
    u, v = 1.25, 0.75
    ideal = ga.lyapunov_steady(ga.drift_diffusion([ga.LinearJump([u], [v], 1.0)]))
    np.testing.assert_allclose(ga.symplectic_eigenvalues(ideal.cov), [1.0], atol=1e-8)
    lossy = ga.lyapunov_steady(ga.drift_diffusion(
        [ga.LinearJump([u], [v], 1.0), ga.LinearJump([1], [0], 0.1)]))
    assert ga.symplectic_eigenvalues(lossy.cov)[0] > 1.0 + 1e-6
