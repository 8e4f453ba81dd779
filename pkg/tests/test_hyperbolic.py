import numpy as np
import pytest

from bimoment import closure as cl
from bimoment import hyperbolic as hyp
from bimoment.states import (
    ClosureKind,
    DegenerateState,
    cons_to_prim,
    prim_state,
    prim_to_cons,
)

K4 = ClosureKind.BIDELTA
K5 = ClosureKind.BIGAUSSIAN
KB = ClosureKind.BIBSPLINE

FIG1_LEFT = prim_state(1.5, -0.5, 1.5, 1.0, 4.5)


def _near_maxwellian(alpha=2e-3, rho=1e6, p=100.0, u=0.0):
    """Two-Gaussian state with |mu2 - mu1| = 2 sqrt(p alpha / rho) << 1."""
    r = (3.0 - 2.0 * alpha**2) * p**2 / rho
    return prim_state(rho, u, p, 0.0, r)


def _fd_jacobian(prim, kind, h=1e-7):
    m = prim_to_cons(prim, kind)
    n = m.size
    J = np.empty((n, n))
    for j in range(n):
        hp = h * max(1.0, abs(float(m[j])))
        mp, mm = m.copy(), m.copy()
        mp[j] += hp
        mm[j] -= hp
        J[:, j] = (cl.flux_vector(cons_to_prim(mp, kind, check=False), kind)
                   - cl.flux_vector(cons_to_prim(mm, kind, check=False), kind)) / (2 * hp)
    return J


# ---------------------------------------------------------------------------
# bi-delta eigenstructure


def test_eigen_bidelta_symmetric():
    eig = hyp.eigen_bidelta(prim_state(1.0, 0.0, 1.0, 0.0))
    np.testing.assert_allclose(eig.lam, [-1, -1, 1, 1], atol=1e-14)
    assert eig.defective


def test_eigen_bidelta_example():
    eig = hyp.eigen_bidelta(prim_state(1.0, 0.8, 2.16, -1.296))
    np.testing.assert_allclose(eig.lam, [-1, -1, 2, 2], rtol=1e-13)
    # exactly two independent eigenvectors
    assert np.linalg.matrix_rank(eig.R, tol=1e-10) == 2


def test_eigen_bidelta_vandermonde_vs_fd_jacobian():
    pr = prim_state(1.2, 0.3, 0.9, -0.2)
    eig = hyp.eigen_bidelta(pr)
    J = _fd_jacobian(pr, K4)
    for k in (0, 2):
        v = eig.R[:, k]
        np.testing.assert_allclose(J @ v, eig.lam[k] * v, atol=5e-6)


# ---------------------------------------------------------------------------
# closure Jacobian row and quintic spectrum


def test_jacobian_row_fig1_has_five_real_roots():
    rows = hyp.jacobian_closure_row(FIG1_LEFT, K5)
    roots = np.linalg.eigvals(hyp.companion_matrix(rows))
    assert np.max(np.abs(roots.imag)) < 1e-8 * (1.0 + np.max(np.abs(roots)))
    z = np.sort(roots.real)
    assert np.min(np.diff(z)) > 1e-3  # strictly hyperbolic at this state


def test_jacobian_row_degenerate_raises():
    with pytest.raises(DegenerateState):
        hyp.jacobian_closure_row(prim_state(1.0, 0.0, 1.0, 0.0, 3.0), K5)


def test_near_equilibrium_speeds_formula():
    z = hyp.near_equilibrium_speeds(prim_state(1.0, 0.0, 1.0, 0.0, 3.0))
    s10 = np.sqrt(10.0)
    expect = [-np.sqrt(5 + s10), -np.sqrt(5 - s10), 0.0, np.sqrt(5 - s10), np.sqrt(5 + s10)]
    np.testing.assert_allclose(z, expect, atol=1e-14)


def test_near_equilibrium_speeds_symmetric_about_u():
    z = hyp.near_equilibrium_speeds(prim_state(2.0, 0.7, 1.3, 0.0, 2.4 * 1.3**2 / 2.0))
    np.testing.assert_allclose(z - 0.7, -(z[::-1] - 0.7), atol=1e-13)


def test_quintic_roots_match_near_equilibrium_display():
    pr = _near_maxwellian()
    rows = hyp.jacobian_closure_row(pr, K5)
    roots = np.sort(np.linalg.eigvals(hyp.companion_matrix(rows)).real)
    z = hyp.near_equilibrium_speeds(pr)
    np.testing.assert_allclose(roots, z, atol=1e-5)


def test_eigen_five_moment_left_right_identity():
    eig = hyp.eigen_five_moment(FIG1_LEFT, K5)
    np.testing.assert_allclose(eig.L @ eig.R, np.eye(5), atol=1e-8)
    assert not eig.defective


def test_eigen_five_moment_vandermonde_vs_fd_jacobian():
    eig = hyp.eigen_five_moment(FIG1_LEFT, K5)
    J = _fd_jacobian(FIG1_LEFT, K5)
    for k in range(5):
        v = eig.R[:, k]
        resid = J @ v - eig.lam[k] * v
        assert np.max(np.abs(resid)) < 1e-7 * max(1.0, np.max(np.abs(eig.lam[k] * v)))


# ---------------------------------------------------------------------------
# wave speeds


def test_wave_speeds_bidelta():
    lmin, lmax = hyp.wave_speeds(prim_state(1.0, 0.0, 1.0, 0.0), K4)
    assert float(lmin) == pytest.approx(-1.0)
    assert float(lmax) == pytest.approx(1.0)


def test_wave_speeds_near_maxwellian_magnitude():
    pr = _near_maxwellian()
    lmin, lmax, flagged = hyp.wave_speeds_detail(pr, K5)
    expect = np.sqrt((5 + np.sqrt(10.0)) * pr.p / pr.rho)
    if not flagged:
        assert lmax == pytest.approx(float(expect), rel=1e-2)
        assert lmin == pytest.approx(-float(expect), rel=1e-2)
    else:
        # fallback still bounds the true speeds
        assert lmax >= float(expect)


def test_wave_speeds_galilean_shift():
    rng = np.random.default_rng(2)
    for kind in (K4, K5, KB):
        for _ in range(5):
            rho, p = rng.uniform(0.5, 2.0), rng.uniform(0.5, 2.0)
            q = rng.uniform(-0.3, 0.3) * np.sqrt(p**3 / rho)
            if kind is K4:
                pr0 = prim_state(rho, 0.0, p, q)
                pr1 = prim_state(rho, 0.5, p, q)
            else:
                r = cl.r_lower_bound(rho, p, q) + 1.1 * p**2 / rho
                pr0 = prim_state(rho, 0.0, p, q, r)
                pr1 = prim_state(rho, 0.5, p, q, r)
            a0, b0 = hyp.wave_speeds(pr0, kind)
            a1, b1 = hyp.wave_speeds(pr1, kind)
            assert float(a1) == pytest.approx(float(a0) + 0.5, abs=1e-8)
            assert float(b1) == pytest.approx(float(b0) + 0.5, abs=1e-8)


def test_wave_speeds_fallback_on_degenerate_states():
    # single-Gaussian moments: the closure row is undefined, so the bound is used
    pr = prim_state(1.0, 0.3, 1.0, 0.0, 3.0)
    lmin, lmax, flagged = hyp.wave_speeds_detail(pr, K5)
    assert flagged
    bound = float(hyp.speed_bound(pr, K5))
    assert lmax == pytest.approx(bound)
    assert lmin == pytest.approx(-bound)
    assert lmax >= 0.3 + np.sqrt(5 + np.sqrt(10.0)) - 1e-12


def test_wave_speeds_vectorized_mixed_states():
    rho = np.array([1.0, 1.0])
    u = np.array([0.0, 0.3])
    p = np.array([1.0, 1.0])
    q = np.array([0.8, 0.0])
    r = np.array([cl.r_lower_bound(1.0, 1.0, 0.8) + 1.2, 3.0])
    lmin, lmax, flagged = hyp.wave_speeds_detail(prim_state(rho, u, p, q, r), K5)
    assert lmin.shape == (2,)
    assert not flagged[0] and flagged[1]


# ---------------------------------------------------------------------------
# genuine nonlinearity indicator


def test_gnl_indicator_bidelta_is_zero():
    assert hyp.gnl_indicator(prim_state(1.0, 0.2, 1.0, 0.1), K4, 1) == 0.0


def test_gnl_indicator_sign_flips_with_q():
    # middle wave family of a mildly skewed state near equilibrium
    rho, p = 1.0, 1.0
    for q0 in (1e-3, 3e-3):
        r = 3.0 * p**2 / rho  # with q != 0 the cubic allows r at the Gaussian value
        plus = hyp.gnl_indicator(prim_state(rho, 0.0, p, q0, r), K5, 2)
        minus = hyp.gnl_indicator(prim_state(rho, 0.0, p, -q0, r), K5, 2)
        assert plus * minus < 0.0
        assert plus == pytest.approx(-minus, rel=1e-3)


def test_gnl_indicator_sign_follows_wave_constants():
    # near equilibrium every family's indicator carries the sign of c_k * q
    for q0 in (2e-3, -2e-3):
        pr = prim_state(1.0, 0.0, 1.0, q0, 3.0)
        for k, c_k in enumerate(hyp.GNL_WAVE_CONSTANTS):
            val = hyp.gnl_indicator(pr, K5, k)
            assert np.sign(val) == np.sign(c_k * q0), (k, q0, val)


def test_gnl_indicator_continuous_in_q():
    rho, p, r = 1.0, 1.0, 3.0
    qs = np.array([1e-3, 2e-3, 3e-3])
    vals = [hyp.gnl_indicator(prim_state(rho, 0.0, p, q, r), K5, 2) for q in qs]
    # smooth, same sign, monotone-ish over this small sweep
    assert all(v > 0 for v in vals) or all(v < 0 for v in vals)
    diffs = np.diff(vals)
    assert np.all(np.sign(diffs) == np.sign(diffs[0]))


def test_gnl_indicator_degenerate_raises():
    # the single-Gaussian collapse has no usable closure row
    with pytest.raises(DegenerateState):
        hyp.gnl_indicator(prim_state(1.0, 0.0, 1.0, 0.0, 3.0), K5, 0)
