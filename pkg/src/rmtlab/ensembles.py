"""Matrix ensembles: Wigner entry laws, GUE, and the additive deformation.

A Wigner matrix W here is Hermitian with independent entries on and above
the diagonal.  Off-diagonal entries are complex with independent real and
imaginary parts; the two component variances must sum to 1/4.  Diagonal
entries are real with variance 1/4.  The GUE matrix V has density
proportional to exp(-Tr V^2 / 2), i.e. diagonal variance 1 and off-diagonal
component variances 1/2.  The deformed model is M = (W + a V)/sqrt(N).

Randomness is counter-based (Philox) and addressed by an explicit
(master, stream) pair, so replay is independent of thread count and of the
order in which streams are consumed.  Within one sampler call the draw
order is fixed: off-diagonal real parts, off-diagonal imaginary parts,
then the diagonal.
"""

from __future__ import annotations

import io
import struct
from dataclasses import dataclass, field
from math import gamma as _gamma_fn
from math import pi, sqrt

import numpy as np

from .errors import ConfigurationError

SIGMA_SQ = 0.25  # total variance of a single Wigner entry
OFF_COMPONENT_VAR = SIGMA_SQ / 2.0  # per real/imaginary part of w_jk, j < k

_MAGIC = b"HERMMAT1"
_HEADER = struct.Struct("<8sQ")  # 16 bytes: magic, matrix dimension

LAW_KINDS = ("bernoulli", "uniform", "gaussian", "two_point")


@dataclass(frozen=True)
class RngSeed:
    """Address of one independent random stream.

    ``master`` is a 64-bit experiment seed; ``stream`` selects a substream.
    Distinct streams are statistically independent, so Monte Carlo drivers
    allocate one stream per (trial, matrix) pair and results do not depend
    on execution order.
    """

    master: int
    stream: int = 0

    def __post_init__(self):
        if not (0 <= int(self.master) < 2**64):
            raise ConfigurationError("master seed must fit in 64 bits")
        if int(self.stream) < 0:
            raise ConfigurationError("stream index must be nonnegative")

    def generator(self) -> np.random.Generator:
        ss = np.random.SeedSequence(self.master, spawn_key=(self.stream,))
        return np.random.Generator(np.random.Philox(ss))

    def shifted(self, offset: int) -> "RngSeed":
        return RngSeed(self.master, self.stream + offset)


@dataclass(frozen=True)
class ElementLaw:
    """A centered scalar law with a declared variance and moment bound.

    ``moment_bound`` is the analytic value of E|x|^moment_order, recorded
    so configurations can assert the uniform moment hypothesis the local
    universality statements require.
    """

    kind: str
    variance: float
    skew_weight: float = 0.5  # P(positive value) for the two-point law
    moment_order: int = 8
    moment_bound: float = field(default=0.0)

    def __post_init__(self):
        if self.kind not in LAW_KINDS:
            raise ConfigurationError(f"unknown element law kind {self.kind!r}")
        if not (self.variance > 0.0):
            raise ConfigurationError("element law variance must be positive")
        if self.kind == "two_point" and not (0.0 < self.skew_weight < 1.0):
            raise ConfigurationError("two_point skew weight must lie in (0, 1)")
        if self.moment_order < 4 or self.moment_order % 2:
            raise ConfigurationError("moment order must be an even integer >= 4")
        object.__setattr__(self, "moment_bound", self._abs_moment(self.moment_order))

    def _abs_moment(self, q: int) -> float:
        v = self.variance
        if self.kind == "bernoulli":
            return v ** (q / 2.0)
        if self.kind == "uniform":
            b = sqrt(3.0 * v)
            return b**q / (q + 1.0)
        if self.kind == "gaussian":
            return v ** (q / 2.0) * 2.0 ** (q / 2.0) * _gamma_fn((q + 1) / 2.0) / sqrt(pi)
        p = self.skew_weight
        hi = sqrt(v * (1.0 - p) / p)
        lo = sqrt(v * p / (1.0 - p))
        return p * hi**q + (1.0 - p) * lo**q

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        v = self.variance
        if self.kind == "bernoulli":
            return (2.0 * rng.integers(0, 2, size) - 1.0) * sqrt(v)
        if self.kind == "uniform":
            b = sqrt(3.0 * v)
            return rng.uniform(-b, b, size)
        if self.kind == "gaussian":
            return rng.normal(0.0, sqrt(v), size)
        p = self.skew_weight
        hi = sqrt(v * (1.0 - p) / p)
        lo = -sqrt(v * p / (1.0 - p))
        return np.where(rng.random(size) < p, hi, lo)


@dataclass(frozen=True)
class WignerSpec:
    """Entry laws of a Wigner matrix with total entry variance 1/4.

    ``off_re`` and ``off_im`` govern the two components of an off-diagonal
    entry, ``diag`` the (real) diagonal.  The diagonal imaginary part is
    identically zero.
    """

    off_re: ElementLaw
    off_im: ElementLaw
    diag: ElementLaw

    def __post_init__(self):
        total = self.off_re.variance + self.off_im.variance
        if abs(total - SIGMA_SQ) > 1e-12:
            raise ConfigurationError(
                f"off-diagonal component variances sum to {total}, expected {SIGMA_SQ}"
            )
        if abs(self.diag.variance - SIGMA_SQ) > 1e-12:
            raise ConfigurationError(
                f"diagonal variance is {self.diag.variance}, expected {SIGMA_SQ}"
            )

    @classmethod
    def from_kind(cls, kind: str, skew_weight: float = 0.25) -> "WignerSpec":
        if kind == "two_point":
            off = ElementLaw("two_point", OFF_COMPONENT_VAR, skew_weight=skew_weight)
            dg = ElementLaw("two_point", SIGMA_SQ, skew_weight=skew_weight)
        else:
            off = ElementLaw(kind, OFF_COMPONENT_VAR)
            dg = ElementLaw(kind, SIGMA_SQ)
        return cls(off_re=off, off_im=off, diag=dg)


def bernoulli_spec() -> WignerSpec:
    return WignerSpec.from_kind("bernoulli")


def uniform_spec() -> WignerSpec:
    return WignerSpec.from_kind("uniform")


def gaussian_spec() -> WignerSpec:
    return WignerSpec.from_kind("gaussian")


@dataclass(frozen=True)
class HermitianMatrix:
    """An N x N complex Hermitian matrix with its provenance seed."""

    n: int
    entries: np.ndarray
    seed: RngSeed | None = None

    def __post_init__(self):
        e = self.entries
        if e.shape != (self.n, self.n):
            raise ConfigurationError("entry array shape does not match declared size")
        if e.dtype != np.complex128:
            raise ConfigurationError("entries must be complex128")

    def is_hermitian_exact(self) -> bool:
        return bool(np.array_equal(self.entries, self.entries.conj().T))


def _hermitian_from_parts(
    n: int, off_re: np.ndarray, off_im: np.ndarray, diag: np.ndarray, seed: RngSeed | None
) -> HermitianMatrix:
    upper = np.zeros((n, n), dtype=np.complex128)
    iu, ju = np.triu_indices(n, k=1)
    upper[iu, ju] = off_re + 1j * off_im
    entries = upper + upper.conj().T
    entries[np.diag_indices(n)] = diag  # real values, imaginary part exactly 0
    return HermitianMatrix(n=n, entries=entries, seed=seed)


def sample_wigner(spec: WignerSpec, n: int, seed: RngSeed) -> HermitianMatrix:
    """Draw one Wigner matrix (unscaled: entries are O(1))."""
    if n < 1:
        raise ConfigurationError("matrix dimension must be >= 1")
    rng = seed.generator()
    m = n * (n - 1) // 2
    off_re = spec.off_re.sample(rng, m)
    off_im = spec.off_im.sample(rng, m)
    diag = spec.diag.sample(rng, n)
    return _hermitian_from_parts(n, off_re, off_im, diag, seed)


def sample_gue(n: int, seed: RngSeed) -> HermitianMatrix:
    """Draw one GUE matrix V with density proportional to exp(-Tr V^2 / 2)."""
    if n < 1:
        raise ConfigurationError("matrix dimension must be >= 1")
    rng = seed.generator()
    m = n * (n - 1) // 2
    off_re = rng.normal(0.0, sqrt(0.5), m)
    off_im = rng.normal(0.0, sqrt(0.5), m)
    diag = rng.normal(0.0, 1.0, n)
    return _hermitian_from_parts(n, off_re, off_im, diag, seed)


def assemble_deformed(w: HermitianMatrix, a: float, seed: RngSeed) -> HermitianMatrix:
    """Form M = (W + a V)/sqrt(N) with a fresh GUE matrix V.

    a = 0 is allowed here (pure rescaled Wigner); downstream kernel code
    refuses it because the deformation sets the transition time scale.
    """
    if a < 0.0:
        raise ConfigurationError("deformation strength a must be >= 0")
    n = w.n
    if a == 0.0:
        entries = w.entries / sqrt(n)
        return HermitianMatrix(n=n, entries=entries, seed=seed)
    v = sample_gue(n, seed)
    entries = (w.entries + a * v.entries) / sqrt(n)
    return HermitianMatrix(n=n, entries=entries, seed=seed)


def convolved_entry_variances(spec: WignerSpec, a: float) -> dict:
    """Analytic second moments of sqrt(N) * M entries.

    Adding a*V convolves each entry law with a centered Gaussian, so the
    variances simply add: a^2/2 per off-diagonal component, a^2 on the
    diagonal.
    """
    return {
        "off_re": spec.off_re.variance + 0.5 * a * a,
        "off_im": spec.off_im.variance + 0.5 * a * a,
        "diag": spec.diag.variance + a * a,
    }


def convolution_equivalence_check(
    spec: WignerSpec, a: float, n: int, trials: int, seed: RngSeed
) -> dict:
    """Compare empirical second moments of sqrt(N)*M against the convolution formula.

    Pools every entry position across ``trials`` independent matrices
    (entries are i.i.d. across positions).  Returns empirical and analytic
    variances together with the deviation measured in standard errors of
    the pooled variance estimator.
    """
    if trials < 1000:
        raise ConfigurationError("convolution check needs at least 1000 trials")
    off_re_samples = []
    off_im_samples = []
    diag_samples = []
    iu, ju = np.triu_indices(n, k=1)
    for t in range(trials):
        w = sample_wigner(spec, n, seed.shifted(2 * t))
        m = assemble_deformed(w, a, seed.shifted(2 * t + 1))
        scaled = m.entries * sqrt(n)
        off = scaled[iu, ju]
        off_re_samples.append(off.real)
        off_im_samples.append(off.imag)
        diag_samples.append(scaled.diagonal().real)
    report = {"a": a, "n": n, "trials": trials}
    analytic = convolved_entry_variances(spec, a)
    for name, chunks in (
        ("off_re", off_re_samples),
        ("off_im", off_im_samples),
        ("diag", diag_samples),
    ):
        x = np.concatenate(chunks)
        var = float(np.var(x))
        m4 = float(np.mean((x - x.mean()) ** 4))
        se = sqrt(max(m4 - var * var, 0.0) / x.size) or 1e-300
        report[name] = {
            "empirical": var,
            "analytic": analytic[name],
            "deviation_se": abs(var - analytic[name]) / se,
        }
    return report


def write_matrix_binary(path, h: HermitianMatrix) -> None:
    """Little-endian layout: 16-byte header (magic, N), then row-major
    interleaved re/im float64 pairs."""
    buf = io.BytesIO()
    buf.write(_HEADER.pack(_MAGIC, h.n))
    inter = np.empty((h.n, h.n, 2), dtype="<f8")
    inter[..., 0] = h.entries.real
    inter[..., 1] = h.entries.imag
    buf.write(inter.tobytes())
    with open(path, "wb") as f:
        f.write(buf.getvalue())


def read_matrix_binary(path) -> HermitianMatrix:
    with open(path, "rb") as f:
        raw = f.read()
    if len(raw) < _HEADER.size:
        raise ConfigurationError("matrix file too short for header")
    magic, n = _HEADER.unpack_from(raw, 0)
    if magic != _MAGIC:
        raise ConfigurationError("bad magic in matrix file")
    body = np.frombuffer(raw, dtype="<f8", offset=_HEADER.size)
    if body.size != 2 * n * n:
        raise ConfigurationError("matrix file payload size mismatch")
    body = body.reshape(n, n, 2)
    entries = (body[..., 0] + 1j * body[..., 1]).astype(np.complex128)
    return HermitianMatrix(n=int(n), entries=entries)


def write_matrix_csv(path, h: HermitianMatrix) -> None:
    """Readable export for small matrices: one matrix row per CSV line,
    columns alternating re_0, im_0, re_1, im_1, ..."""
    if h.n > 64:
        raise ConfigurationError("CSV matrix export is limited to N <= 64")
    inter = np.empty((h.n, 2 * h.n))
    inter[:, 0::2] = h.entries.real
    inter[:, 1::2] = h.entries.imag
    np.savetxt(path, inter, delimiter=",", fmt="%.17g")
