import numpy as np
import pytest
from numpy.polynomial.legendre import leggauss
from scipy import stats

import rmtlab as r
from rmtlab.errors import ConfigurationError, SingularityError
from rmtlab.paths import PathConfig, heat_kernel, km_conditional_density


def _gl(lo, hi, n=96):
    x, w = leggauss(n)
    return 0.5 * (hi - lo) * x + 0.5 * (hi + lo), 0.5 * (hi - lo) * w


# ---------------------------------------------------------------------------
# heat kernel


def test_heat_kernel_mass_and_chapman_kolmogorov():
    t, y0 = 0.7, 0.3
    x, w = _gl(y0 - 10 * np.sqrt(t), y0 + 10 * np.sqrt(t), 128)
    assert abs(np.sum(w * heat_kernel(t, x, y0)) - 1.0) < 1e-12
    # semigroup property: integrating out the midpoint composes the legs
    s = 0.4
    z, wz = _gl(-12.0, 12.0, 192)
    lhs = np.sum(wz * heat_kernel(s, 0.9, z) * heat_kernel(t, z, y0))
    assert abs(lhs - heat_kernel(s + t, 0.9, y0)) < 1e-10
    with pytest.raises(ConfigurationError):
        heat_kernel(0.0, 0.0, 0.0)


# ---------------------------------------------------------------------------
# bridge density and its long-bridge limit


def test_bridge_mass_on_ordered_sector():
    cfg = PathConfig(np.array([-1.0, 1.0]), S=1.0, T=1.0)
    x1, w1 = _gl(-6.0, 7.0, 96)
    grid = np.array([[km_conditional_density(np.array([a, b]), cfg) for b in x1] for a in x1])
    full_plane = float(w1 @ grid @ w1)
    # symmetric in x, so the plane carries twice the ordered-sector mass
    assert abs(full_plane - 2.0) < 1e-6


def test_bridge_reflection_symmetry():
    # symmetric y and z make the law invariant under x -> -x reversed
    cfg = PathConfig(np.array([-1.0, 1.0]), S=1.0, T=1.0, z=np.array([-0.5, 0.5]))
    rng = np.random.default_rng(7)
    for _ in range(20):
        x = np.sort(rng.uniform(-3, 3, 2))
        a = km_conditional_density(x, cfg)
        b = km_conditional_density(np.sort(-x), cfg)
        assert abs(a - b) <= 1e-10 * max(a, 1e-300)


def test_bridge_converges_to_limit_density():
    y = np.array([-1.0, 1.0])
    S = 1.0
    probes = [np.array([a, b]) for a in np.linspace(-3, 3, 9) for b in np.linspace(-3, 3, 9)]
    sups = []
    for T in (10.0, 1e3, 1e6):
        cfg = PathConfig(y, S=S, T=T)
        sups.append(
            max(
                abs(km_conditional_density(x, cfg) - r.km_limit_density_qS(x, y, S))
                for x in probes
            )
        )
    assert sups[0] > sups[1] > sups[2]
    assert sups[2] < 1e-6


def test_limit_density_mass_and_symmetry():
    y = np.array([-1.0, 1.0])
    S = 0.5
    x1, w1 = _gl(-7.0, 7.0, 128)
    grid = np.array([[r.km_limit_density_qS(np.array([a, b]), y, S) for b in x1] for a in x1])
    assert abs(float(w1 @ grid @ w1) - 2.0) < 1e-6  # N! as a symmetric function
    # exchanging the two arguments changes nothing
    assert r.km_limit_density_qS(np.array([0.2, -0.7]), y, S) == pytest.approx(
        r.km_limit_density_qS(np.array([-0.7, 0.2]), y, S), rel=1e-12
    )


def test_limit_density_concentrates_for_small_S():
    y = np.array([-1.0, 1.0])
    S = 1e-4
    for k, yk in enumerate(y):
        xs, ws = _gl(yk - 0.1, yk + 0.1, 64)
        other = y[1 - k]
        mass = sum(
            w * r.km_limit_density_qS(np.sort(np.array([v, other])), y, S)
            for v, w in zip(xs, ws)
        )
        assert mass > 0.99  # each path stays pinned near its start


def test_rhoN_is_limit_at_matched_variance():
    y = np.array([-0.8, 0.1, 0.9])
    x = np.array([-0.7, 0.0, 1.1])
    a = 0.6
    assert r.eigen_density_rhoN(x, y, a, 3) == pytest.approx(
        r.km_limit_density_qS(x, y, a * a / 3), rel=1e-14
    )
    with pytest.raises(ConfigurationError):
        r.eigen_density_rhoN(x, y, a, 4)


def test_validation_and_guards():
    with pytest.raises(ConfigurationError):
        PathConfig(np.array([1.0, -1.0]), S=1.0, T=1.0)
    with pytest.raises(ConfigurationError):
        PathConfig(np.array([-1.0, 1.0]), S=0.0, T=1.0)
    with pytest.raises(ConfigurationError):
        PathConfig(np.array([-1.0, 1.0]), S=1.0, T=1.0, z=np.array([0.0]))
    cfg7 = PathConfig(np.arange(7, dtype=float), S=1.0, T=1.0)
    with pytest.raises(ConfigurationError):
        km_conditional_density(np.arange(7, dtype=float), cfg7)
    with pytest.raises(SingularityError):
        r.km_limit_density_qS(np.array([0.0, 1.0]), np.array([0.5, 0.5]), 1.0)
    with pytest.raises(ConfigurationError):
        r.km_limit_density_qS(np.array([0.0, 1.0]), np.array([1.0, 0.5]), 1.0)


# ---------------------------------------------------------------------------
# eigenvalue SDE


def test_dyson_step_rule_and_determinism():
    y = np.array([-1.0, 0.0, 1.0])
    with pytest.raises(ConfigurationError):
        r.dyson_evolve(y, 0.5, 1e-2, r.RngSeed(1, 0))  # violates dt <= 1e-4 gap^2
    out1 = r.dyson_evolve(y, 0.05, 5e-5, r.RngSeed(11, 0))
    out2 = r.dyson_evolve(y, 0.05, 5e-5, r.RngSeed(11, 0))
    assert np.array_equal(out1, out2)
    assert np.all(np.diff(out1) > 0)  # repulsion keeps the order strict
    out3 = r.dyson_evolve(y, 0.05, 5e-5, r.RngSeed(12, 0))
    assert not np.array_equal(out1, out3)


def test_dyson_single_particle_is_brownian():
    term = r.dyson_ensemble(np.array([0.0]), 1.0, 1e-2, r.RngSeed(21, 0), 4000)
    ks = stats.kstest(term[:, 0], stats.norm(loc=0.0, scale=1.0).cdf).statistic
    assert ks < 0.03


def test_dyson_terminal_law_matches_limit_density():
    # two-particle SDE at time t against the lower-path marginal of q_{S=t}
    y = np.array([-1.0, 1.0])
    t_final = 0.5
    term = r.dyson_ensemble(y, t_final, 4e-4, r.RngSeed(31, 0), 1500)
    xs = np.linspace(-5.0, 5.0, 241)
    bq, wq = _gl(-6.0, 6.0, 192)
    pdf_min = np.array(
        [
            sum(
                w * r.km_limit_density_qS(np.array([xv, b]), y, t_final)
                for b, w in zip(bq, wq)
                if b > xv
            )
            for xv in xs
        ]
    )
    cdf_min = np.concatenate([[0.0], np.cumsum(0.5 * (pdf_min[1:] + pdf_min[:-1]) * np.diff(xs))])
    cdf_min /= cdf_min[-1]
    emp = np.sort(term[:, 0])
    emp_cdf = np.searchsorted(emp, xs, side="right") / emp.size
    assert np.max(np.abs(emp_cdf - cdf_min)) < 0.06
