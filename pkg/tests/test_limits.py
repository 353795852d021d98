import math

import numpy as np
import pytest

from oqrw import catalog, limits
from oqrw.core import I2, KrausPair, apply_channel, random_kraus_pair
from oqrw.exceptions import (
    DegenerateMax,
    NoInvariantState,
    NonUniqueInvariant,
    ParameterError,
)

from conftest import make_random_pairs


def _pair(text):
    return catalog.build(catalog.parse_example_spec(text))


# ---- invariant states -------------------------------------------------------


def test_invariant_state_ex5():
    rep = limits.invariant_states(_pair("ex5"))
    assert rep.fixed_space_dim == 1
    np.testing.assert_allclose(rep.rho_inf, I2 / 2, atol=1e-12)
    assert rep.residual <= 1e-10


@pytest.mark.parametrize("p", [0.3, 0.5, 0.7])
def test_invariant_state_ex2(p):
    kp = _pair(f"ex2:p={p}")
    rep = limits.invariant_states(kp)
    assert rep.fixed_space_dim == 1
    fixed = apply_channel(kp, rep.rho_inf)
    np.testing.assert_allclose(fixed, rep.rho_inf, atol=1e-10)
    # the channel wipes out coherences in one step, so rho_inf is diagonal
    assert abs(rep.rho_inf[0, 1]) <= 1e-10


def test_invariant_state_ex3_is_pure_upper():
    rep = limits.invariant_states(_pair("ex3"))
    assert rep.fixed_space_dim == 1
    np.testing.assert_allclose(rep.rho_inf, np.diag([1.0, 0.0]), atol=1e-9)


@pytest.mark.parametrize("text", ["ex1", "ex4", "ex1:p=0.3", "ex4:eps=0.3"])
def test_degenerate_fixed_space_reported(text):
    rep = limits.invariant_states(_pair(text))
    assert rep.fixed_space_dim >= 2
    assert rep.rho_inf is None and rep.residual is None


def test_no_invariant_state():
    dead = KrausPair(np.zeros((2, 2), dtype=complex), np.zeros((2, 2), dtype=complex))
    with pytest.raises(NoInvariantState):
        limits.invariant_states(dead)


def test_random_pairs_have_invariant_or_degenerate():
    for kp in make_random_pairs(20, seed=7):
        rep = limits.invariant_states(kp)
        if rep.fixed_space_dim == 1:
            assert rep.residual <= 1e-10


# ---- Poisson equation and CLT parameters ------------------------------------


def test_clt_params_ex5():
    out = limits.clt_params(_pair("ex5"))
    assert out.m == pytest.approx(0.0, abs=1e-12)
    assert out.sigma2 == pytest.approx(8.0 / 9.0, abs=1e-12)
    assert max(out.residuals.values()) <= 1e-10
    np.testing.assert_allclose(out.L, out.L.conj().T, atol=1e-12)


def test_clt_params_ex3_degenerate_variance():
    out = limits.clt_params(_pair("ex3"))
    assert out.m == pytest.approx(-1.0, abs=1e-12)
    assert out.sigma2 == pytest.approx(0.0, abs=1e-10)


@pytest.mark.parametrize("p", [0.3, 0.5, 0.7])
def test_clt_params_ex2(p):
    out = limits.clt_params(_pair(f"ex2:p={p}"))
    assert out.m == pytest.approx(0.0, abs=1e-10)
    assert out.sigma2 == pytest.approx(p / (1.0 - p), abs=1e-10)


@pytest.mark.parametrize("text", ["ex1", "ex4"])
def test_clt_params_refuses_degenerate(text):
    with pytest.raises(NonUniqueInvariant):
        limits.clt_params(_pair(text))


def test_poisson_residual_small_for_unique_case():
    kp = _pair("ex5")
    rho = limits.invariant_states(kp).rho_inf
    m, L = limits.solve_poisson(kp, rho)
    assert limits.poisson_residual(kp, L, m) <= 1e-12


def test_drift_matches_one_step_mean(ex5_pair, rho_half):
    # for ex5 the invariant state is the initial state, so the drift equals
    # the mean displacement of the very first step
    from oqrw.lattice import distribution, evolve, initial_state

    d = distribution(evolve(ex5_pair, initial_state(rho_half), 1))
    assert limits.drift(ex5_pair, rho_half) == pytest.approx(d.mean(), abs=1e-14)


def test_sigma2_gauge_invariance_catalog():
    for text in ("ex2", "ex5", "ex3:p=0.4,gamma=0.6"):
        kp = _pair(text)
        rho = limits.invariant_states(kp).rho_inf
        m, L = limits.solve_poisson(kp, rho)
        base = limits.clt_variance(kp, rho, L, m)
        for c in (-1.0, 1.0, 10.0):
            shifted = limits.clt_variance(kp, rho, L + c * I2, m)
            assert abs(shifted - base) < 1e-9


def test_sigma2_gauge_invariance_random():
    rng = np.random.default_rng(123)
    for _ in range(5):
        kp = random_kraus_pair(rng)
        rep = limits.invariant_states(kp)
        if rep.fixed_space_dim != 1:
            continue
        m, L = limits.solve_poisson(kp, rep.rho_inf)
        base = limits.clt_variance(kp, rep.rho_inf, L, m)
        for c in (-1.0, 1.0, 10.0):
            assert abs(limits.clt_variance(kp, rep.rho_inf, L + c * I2, m) - base) < 1e-9


def test_ex4_blocks_give_unit_variance():
    # ex4 has a degenerate fixed space and its Poisson equation is genuinely
    # inconsistent: the right-hand side -4*eps*a*X is itself fixed by the
    # channel, so lstsq projects it away entirely and returns L = 0. The
    # residual reports the inconsistency; the variance formula still evaluates.
    kp = _pair("ex4:eps=0.35")
    rho = I2 / 2
    m, L = limits.solve_poisson(kp, rho)
    assert m == pytest.approx(0.0, abs=1e-12)
    np.testing.assert_allclose(L, np.zeros((2, 2)), atol=1e-10)
    eps = 0.35
    a = math.sqrt(0.5 - eps * eps)
    assert limits.poisson_residual(kp, L, m) == pytest.approx(4 * eps * a, abs=1e-10)
    assert limits.clt_variance(kp, rho, L, m) == pytest.approx(1.0, abs=1e-10)


# ---- Laplace-type ratio ------------------------------------------------------


def test_laplace_ratio_converges_to_g_at_max():
    f = lambda x: 1.0 - x * x
    g = lambda x: x + 2.0
    r = limits.laplace_ratio(f, g, (-1.0, 1.0), 400)
    assert abs(r - 2.0) < 0.01


def test_laplace_ratio_constant_g_is_exact():
    r = limits.laplace_ratio(np.cos, lambda x: np.ones_like(x), (-1.0, 1.0), 7)
    assert r == pytest.approx(1.0, abs=1e-14)


def test_laplace_ratio_off_center_maximizer():
    f = lambda x: np.cos(x - 0.5)
    g = lambda x: x
    r = limits.laplace_ratio(f, g, (-1.0, 2.0), 3000)
    assert r == pytest.approx(0.5, abs=0.01)


def test_laplace_ratio_rejects_two_peaks():
    with pytest.raises(DegenerateMax):
        limits.laplace_ratio(lambda x: np.cos(2 * x), lambda x: x + 2.0, (-np.pi, np.pi), 10)


def test_laplace_ratio_rejects_plateau():
    with pytest.raises(DegenerateMax):
        limits.laplace_ratio(np.ones_like, lambda x: x, (0.0, 1.0), 4)


def test_laplace_ratio_rejects_zero_f():
    with pytest.raises(DegenerateMax):
        limits.laplace_ratio(np.zeros_like, lambda x: x, (0.0, 1.0), 2)


def test_laplace_ratio_input_validation():
    f = lambda x: 1.0 - x * x
    g = lambda x: x + 2.0
    with pytest.raises(ValueError):
        limits.laplace_ratio(f, g, (1.0, -1.0), 5)
    with pytest.raises(ValueError):
        limits.laplace_ratio(f, g, (-1.0, 1.0), -2)


# ---- local-limit scale and drift concentration -------------------------------


def test_ex5_alpha_positive_and_decaying():
    values = [limits.ex5_alpha(n) for n in (2, 8, 32, 128)]
    assert all(v > 0 for v in values)
    assert all(a > b for a, b in zip(values, values[1:]))


def test_ex5_alpha_matches_sqrt_decay():
    # Laplace approximation with lam1(0) = 1 and lam1''(0) = -8/9 gives
    # alpha_n ~ sqrt(2 pi / (n * 8/9)) = sqrt(9 pi / (4 n))
    n = 400
    assert limits.ex5_alpha(n) == pytest.approx(math.sqrt(9 * math.pi / (4 * n)), rel=0.01)


def test_ex5_alpha_requires_positive_n():
    with pytest.raises(ValueError):
        limits.ex5_alpha(0)


def test_drift_concentration_zero_for_stuck_start():
    kp = _pair("ex3")
    assert limits.drift_concentration_check(kp, np.diag([1.0, 0.0]), 0.5, 40) == 0.0


def test_drift_concentration_decreases():
    kp = _pair("ex3")
    rho = np.diag([0.5, 0.5])
    masses = [limits.drift_concentration_check(kp, rho, 1.0, n) for n in (50, 100, 200)]
    assert masses[0] > masses[1] > masses[2]


def test_drift_concentration_rejects_wrong_shape():
    with pytest.raises(ParameterError):
        limits.drift_concentration_check(_pair("ex5"), np.diag([0.5, 0.5]), 1.0, 10)
    with pytest.raises(ParameterError):
        limits.drift_concentration_check(
            _pair("ex3"), np.array([[0.5, 0.2], [0.2, 0.5]]), 1.0, 10
        )
