import numpy as np
import pytest
from scipy import integrate

import rmtlab as r
from rmtlab.errors import ConfigurationError, NumericalError


def test_eigenvalues_vs_charpoly_roots():
    # brute-force oracle at N=8: roots of the characteristic polynomial
    n = 8
    w = r.sample_wigner(r.gaussian_spec(), n, r.RngSeed(21, 0))
    vals = r.hermitian_eigenvalues(w).values
    coeffs = np.poly(w.entries)
    roots = np.sort(np.roots(coeffs).real)
    assert np.max(np.abs(vals - roots)) < 1e-10


def test_eigenvalues_sorted_and_validated():
    w = r.sample_wigner(r.bernoulli_spec(), 60, r.RngSeed(21, 1))
    spec = r.hermitian_eigenvalues(w)
    assert np.all(np.diff(spec.values) >= 0)
    bad = w.entries.copy()
    bad[0, 1] += 1e-6  # breaks Hermitian symmetry
    with pytest.raises(ConfigurationError):
        r.hermitian_eigenvalues(bad)


def test_gue_edge_location():
    # pure GUE part: largest |eigenvalue| near 2a
    v = r.sample_gue(400, r.RngSeed(22, 0))
    m = v.entries / np.sqrt(400)
    vals = r.hermitian_eigenvalues(m).values
    assert abs(max(abs(vals[0]), abs(vals[-1])) - 2.0) < 0.15


def test_deformed_density_normalization():
    for a in (0.5, 1.0, 2.0):
        edge = np.sqrt(1 + 4 * a * a)
        total, _ = integrate.quad(lambda u: r.semicircle_rho(u, a), -edge, edge)
        assert abs(total - 1.0) < 1e-10


def test_reference_density_normalization():
    total, _ = integrate.quad(r.semicircle_sigma, -1, 1)
    assert abs(total - 1.0) < 1e-12
    assert r.semicircle_sigma(0.0) == pytest.approx(2 / np.pi)
    assert r.semicircle_sigma(1.5) == 0.0


def test_potential_derivatives_fd(spectrum_cache):
    y = spectrum_cache("bernoulli", 300, 31)
    rng = np.random.default_rng(8)
    h = 1e-5
    for _ in range(12):
        z = complex(rng.uniform(-2, 2), rng.uniform(0.2, 2.0) * rng.choice([-1, 1]))
        f0, fp, fpp = r.log_potential_fN(z, 0.3, 1.0, y)
        fm, _, _ = r.log_potential_fN(z - h, 0.3, 1.0, y)
        fp_, _, _ = r.log_potential_fN(z + h, 0.3, 1.0, y)
        fd1 = (fp_ - fm) / (2 * h)
        assert abs(fd1 - fp) / abs(fp) < 1e-8
        _, fpm, _ = r.log_potential_fN(z - h, 0.3, 1.0, y)
        _, fpp_, _ = r.log_potential_fN(z + h, 0.3, 1.0, y)
        fd2 = (fpp_ - fpm) / (2 * h)
        assert abs(fd2 - fpp) / max(abs(fpp), 1.0) < 1e-7


def test_potential_rejects_real_axis_and_coincidence(spectrum_cache):
    y = spectrum_cache("bernoulli", 50, 31)
    with pytest.raises(ConfigurationError):
        r.log_potential_fN(0.5 + 0j, 0.0, 1.0, y)


def test_limit_potential_value():
    # closed form at z=2, u=0, a=1: f'(2) = 2 + 2(2 - sqrt(3))
    _, fp = r.limit_potential_f(2.0 + 0j, 0.0, 1.0)
    assert abs(fp - (2.0 + 2.0 * (2.0 - np.sqrt(3.0)))) < 1e-12

    # independent quadrature oracle: f'(z) = (z-u)/a^2 + int sigma(t)/(z-t) dt
    z = 1.7 + 0.9j
    for u, a in ((0.0, 1.0), (0.4, 0.8)):
        _, fp = r.limit_potential_f(z, u, a)
        re_part, _ = integrate.quad(
            lambda t: (r.semicircle_sigma(t) * (z - t).real / abs(z - t) ** 2),
            -1, 1, limit=200)
        im_part, _ = integrate.quad(
            lambda t: (-r.semicircle_sigma(t) * (z - t).imag / abs(z - t) ** 2),
            -1, 1, limit=200)
        oracle = (z - u) / a ** 2 + complex(re_part, -im_part).conjugate()
        assert abs(fp - oracle) < 1e-9


def test_limit_potential_rejects_cut():
    with pytest.raises(ConfigurationError):
        r.limit_potential_f(0.2 + 0j, 0.0, 1.0)


def test_finite_potential_converges_to_limit(spectrum_cache):
    # sup over a grid away from the support shrinks as N grows
    grid = [complex(x, s * 0.6) for x in (-1.4, -0.3, 0.8, 1.9)
            for s in (-1, 1)]
    sups = []
    for n in (50, 200, 800):
        y = spectrum_cache("bernoulli", n, 77)
        gaps = []
        for z in grid:
            fN, _, _ = r.log_potential_fN(z, 0.0, 1.0, y)
            fL, _ = r.limit_potential_f(z, 0.0, 1.0)
            gaps.append(abs(fN - fL))
        sups.append(max(gaps))
    assert sups[2] < sups[1] < sups[0]


def test_saddle_point_data():
    sd = r.saddle_data(0.5, 1.0)
    _, fp = r.limit_potential_f(sd.z_c_plus, 0.5, 1.0)
    assert abs(fp) < 1e-12
    # scaling identity linking the saddle to the density
    c = 1.0 * 1.0 * sd.rho_u
    assert abs(sd.z_c_plus / c - (sd.omega0 + 1j * np.pi)) < 1e-10
    # conjugate saddle
    assert sd.z_c_minus == sd.z_c_plus.conjugate()


def test_saddle_domain_guard():
    # bulk window |u| <= sqrt(1/2 + 2 a^2)
    r.saddle_data(1.58, 1.0)
    with pytest.raises(ConfigurationError):
        r.saddle_data(1.59, 1.0)


def test_spectrum_export_roundtrip(tmp_path):
    y = np.sort(np.random.default_rng(3).normal(size=40))
    p = tmp_path / "s.bin"
    r.write_spectrum_binary(p, r.Spectrum(values=y))
    back = r.read_spectrum_binary(p)
    assert np.array_equal(back.values, y)
    csv = tmp_path / "s.csv"
    r.write_spectrum_csv(csv, y)
    assert len(csv.read_text().splitlines()) == 40
