import numpy as np
import pytest

import rmtlab as r
from rmtlab.ensembles import OFF_COMPONENT_VAR, SIGMA_SQ
from rmtlab.errors import ConfigurationError


def _offdiag_parts(mat):
    iu = np.triu_indices(mat.n, k=1)
    return mat.entries[iu].real, mat.entries[iu].imag


def _var_se(x):
    # standard error of the sample variance from the fourth moment
    v = x.var()
    m4 = np.mean((x - x.mean()) ** 4)
    return v, np.sqrt(max(m4 - v * v, 0.0) / x.size)


@pytest.mark.parametrize("kind", ["bernoulli", "uniform", "gaussian", "two_point"])
def test_wigner_component_variances(kind):
    # pool off-diagonal components across draws until past 1e5 samples
    spec = r.WignerSpec.from_kind(kind)
    res, ims, diags = [], [], []
    for s in range(9):
        w = r.sample_wigner(spec, 160, r.RngSeed(100 + s, 0))
        re, im = _offdiag_parts(w)
        res.append(re)
        ims.append(im)
        diags.append(np.diag(w.entries).real)
    re = np.concatenate(res)
    im = np.concatenate(ims)
    dg = np.concatenate(diags)
    assert re.size > 100_000

    v, se = _var_se(re)
    assert abs(v - OFF_COMPONENT_VAR) < 3 * se
    v, se = _var_se(im)
    assert abs(v - OFF_COMPONENT_VAR) < 3 * se
    v, se = _var_se(dg)
    assert abs(v - SIGMA_SQ) < 3 * se
    # total entry variance sigma^2 = 1/4
    tot = re.var() + im.var()
    assert abs(tot - SIGMA_SQ) < 0.01


def test_wigner_mean_zero():
    spec = r.WignerSpec.from_kind("two_point")
    w = r.sample_wigner(spec, 300, r.RngSeed(5, 0))
    re, im = _offdiag_parts(w)
    assert abs(re.mean()) < 4 * np.sqrt(OFF_COMPONENT_VAR / re.size)
    assert abs(im.mean()) < 4 * np.sqrt(OFF_COMPONENT_VAR / im.size)


def test_gue_variances():
    # diagonal variance 1, off-diagonal component variance 1/2
    diags, res = [], []
    for s in range(4):
        v = r.sample_gue(160, r.RngSeed(200 + s, 0))
        diags.append(np.diag(v.entries).real)
        re, _ = _offdiag_parts(v)
        res.append(re)
    dg = np.concatenate(diags)
    re = np.concatenate(res)
    v1, se1 = _var_se(dg)
    assert abs(v1 - 1.0) < 3 * se1
    v2, se2 = _var_se(re)
    assert abs(v2 - 0.5) < 3 * se2


def test_hermiticity_and_dtype():
    for sampler in (lambda: r.sample_wigner(r.bernoulli_spec(), 64, r.RngSeed(1, 0)),
                    lambda: r.sample_gue(64, r.RngSeed(1, 0))):
        m = sampler()
        assert m.entries.dtype == np.complex128
        assert m.is_hermitian_exact()
        assert np.all(np.diag(m.entries).imag == 0.0)


def test_seed_determinism():
    a = r.sample_wigner(r.uniform_spec(), 50, r.RngSeed(42, 3))
    b = r.sample_wigner(r.uniform_spec(), 50, r.RngSeed(42, 3))
    c = r.sample_wigner(r.uniform_spec(), 50, r.RngSeed(42, 4))
    assert np.array_equal(a.entries, b.entries)
    assert not np.array_equal(a.entries, c.entries)


def test_assemble_deformed_scaling():
    n, a = 120, 0.7
    w = r.sample_wigner(r.gaussian_spec(), n, r.RngSeed(9, 0))
    m = r.assemble_deformed(w, a, r.RngSeed(9, 1))
    assert m.is_hermitian_exact()
    # a=0 reduces to W/sqrt(N) exactly, no GUE draw consumed
    m0 = r.assemble_deformed(w, 0.0, r.RngSeed(9, 1))
    assert np.allclose(m0.entries, w.entries / np.sqrt(n), rtol=0, atol=0)


def test_deformed_entry_variances():
    # off-diagonal real part 1/8 + a^2/2, diagonal 1/4 + a^2
    n, a = 200, 1.0
    res, dgs = [], []
    for s in range(8):
        w = r.sample_wigner(r.bernoulli_spec(), n, r.RngSeed(300 + s, 0))
        m = r.assemble_deformed(w, a, r.RngSeed(300 + s, 1))
        scaled = m.entries * np.sqrt(n)
        iu = np.triu_indices(n, k=1)
        res.append(scaled[iu].real)
        dgs.append(np.diag(scaled).real)
    re = np.concatenate(res)
    dg = np.concatenate(dgs)
    v, se = _var_se(re)
    assert abs(v - (0.125 + a * a / 2)) < 3 * se
    v, se = _var_se(dg)
    assert abs(v - (0.25 + a * a)) < 3 * se


def test_convolution_equivalence_check():
    out = r.convolution_equivalence_check(r.bernoulli_spec(), 1.0, 24,
                                          trials=1000, seed=r.RngSeed(77, 0))
    for name in ("off_re", "off_im", "diag"):
        assert out[name]["deviation_se"] < 4.0
    assert out["off_re"]["analytic"] == 0.125 + 0.5


def test_moment_bound_is_respected():
    law = r.ElementLaw(kind="uniform", variance=0.125)
    x = law.sample(r.RngSeed(4, 0).generator(), 200_000)
    emp = np.mean(np.abs(x) ** law.moment_order)
    assert emp <= law.moment_bound * 1.05


def test_two_point_law_moments():
    law = r.ElementLaw(kind="two_point", variance=0.125, skew_weight=0.25)
    x = law.sample(r.RngSeed(4, 1).generator(), 400_000)
    assert abs(x.mean()) < 4 * x.std() / np.sqrt(x.size)
    assert abs(x.var() - 0.125) < 0.002


def test_spec_validation():
    law = lambda v: r.ElementLaw(kind="gaussian", variance=v)
    with pytest.raises(ConfigurationError):
        r.WignerSpec(off_re=law(0.2), off_im=law(0.2), diag=law(0.25))
    with pytest.raises(ConfigurationError):
        r.WignerSpec(off_re=law(0.125), off_im=law(0.125), diag=law(0.3))
    with pytest.raises(ConfigurationError):
        r.ElementLaw(kind="nonsense", variance=0.125)


def test_matrix_binary_roundtrip(tmp_path):
    w = r.sample_wigner(r.bernoulli_spec(), 48, r.RngSeed(13, 0))
    p = tmp_path / "m.bin"
    r.write_matrix_binary(p, w)
    back = r.read_matrix_binary(p)
    assert back.n == 48
    assert np.array_equal(back.entries, w.entries)


def test_matrix_csv_small_only(tmp_path):
    w = r.sample_wigner(r.bernoulli_spec(), 8, r.RngSeed(13, 1))
    p = tmp_path / "m.csv"
    r.write_matrix_csv(p, w)
    txt = p.read_text().splitlines()
    assert len(txt) == 8  # one matrix row per line
    assert len(txt[0].split(",")) == 16  # re/im interleaved
    big = r.sample_wigner(r.bernoulli_spec(), 65, r.RngSeed(13, 2))
    with pytest.raises(ConfigurationError):
        r.write_matrix_csv(tmp_path / "big.csv", big)
