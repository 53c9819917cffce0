"""Spectra, equilibrium densities, and the saddle geometry of the kernel.

The deformed model M = (W + a V)/sqrt(N) has limiting spectral density

    rho(u) = 2 / (pi (1 + 4 a^2)) * sqrt(1 + 4 a^2 - u^2),

while the rescaled Wigner part H = W/sqrt(N) alone follows

    sigma(t) = (2 / pi) * sqrt(1 - t^2).

The double-contour representation of the correlation kernel is controlled
by the finite-N log potential

    fN(z) = (z^2 - 2 u z) / (2 a^2) + (1/N) sum_j log(z - y_j)

(y the spectrum of H, principal branch) and its N -> infinity limit f,
whose saddle points off the real axis organize the asymptotics.  With
R = sqrt(1 + 4 a^2) and cos(theta_c) = u / R the saddles are

    z_c(+/-) = (w_c + 1/w_c) / 2,   w_c = R exp(+/- i theta_c),

and they satisfy z_c(+/-) / (a^2 rho(u)) = omega0 +/- i pi with
omega0 = pi (1 + 2 a^2) cot(theta_c) / (2 a^2).
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, NumericalError, SingularityError
from .ensembles import HermitianMatrix, _HEADER as _MATRIX_HEADER  # noqa: F401

_SPEC_MAGIC = b"SPECTRA1"
_SPEC_HEADER = struct.Struct("<8sQ")

# fixed quadrature rule for the limit potential: t = cos(phi) turns
# integral of log(z - t) sigma(t) dt into a smooth integrand on [0, pi]
_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(64)
_PHI = 0.5 * np.pi * (_GL_NODES + 1.0)
_PHI_W = 0.5 * np.pi * _GL_WEIGHTS
_SIN2 = np.sin(_PHI) ** 2


@dataclass(frozen=True)
class Spectrum:
    """Eigenvalues in ascending order."""

    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 1 or v.size < 1:
            raise ConfigurationError("spectrum must be a nonempty 1-d array")
        if np.any(np.diff(v) < 0):
            raise ConfigurationError("spectrum values must be ascending")
        object.__setattr__(self, "values", v)

    @property
    def n(self) -> int:
        return self.values.size


def hermitian_eigenvalues(h: HermitianMatrix | np.ndarray) -> Spectrum:
    """Eigenvalues of a Hermitian matrix, with trace-identity checks.

    The input must be Hermitian to 1e-12 relative to its largest entry.
    After the solve, sum(lambda) must reproduce the trace and
    sum(lambda^2) the squared Frobenius norm, both to 1e-10 * N * scale.
    """
    a = h.entries if isinstance(h, HermitianMatrix) else np.asarray(h)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ConfigurationError("expected a square matrix")
    scale_in = max(1.0, float(np.abs(a).max()))
    if float(np.abs(a - a.conj().T).max()) > 1e-12 * scale_in:
        raise ConfigurationError("matrix is not Hermitian within 1e-12 relative")
    vals = np.linalg.eigvalsh(a)
    n = a.shape[0]
    scale = max(1.0, float(np.abs(vals).max()))
    trace = float(np.trace(a).real)
    if abs(vals.sum() - trace) > 1e-10 * n * scale:
        raise NumericalError("eigenvalue sum does not reproduce the trace")
    frob2 = float(np.sum(np.abs(a) ** 2))
    if abs(np.sum(vals**2) - frob2) > 1e-10 * n * scale * scale:
        raise NumericalError("eigenvalue squares do not reproduce Tr H^2")
    return Spectrum(values=vals)


def semicircle_rho(u, a: float):
    """Limiting density of M = (W + a V)/sqrt(N); support |u| <= sqrt(1+4a^2)."""
    if a < 0:
        raise ConfigurationError("a must be >= 0")
    edge2 = 1.0 + 4.0 * a * a
    u = np.asarray(u, dtype=float)
    val = 2.0 / (np.pi * edge2) * np.sqrt(np.clip(edge2 - u * u, 0.0, None))
    return val if val.ndim else float(val)


def semicircle_sigma(t):
    """Limiting density of H = W/sqrt(N); support [-1, 1]."""
    t = np.asarray(t, dtype=float)
    val = (2.0 / np.pi) * np.sqrt(np.clip(1.0 - t * t, 0.0, None))
    return val if val.ndim else float(val)


def log_potential_fN(z, u: float, a: float, y: np.ndarray):
    """Finite-N log potential and its first two derivatives.

    Accepts scalar or array z with Im z != 0.  Points closer than 1e-14
    to an eigenvalue are rejected as singular.
    Returns (f, f', f'') with

        f   = (z^2 - 2 u z)/(2 a^2) + mean(log(z - y))
        f'  = (z - u)/a^2 + mean(1/(z - y))
        f'' = 1/a^2 - mean(1/(z - y)^2)
    """
    if a <= 0:
        raise ConfigurationError("a must be > 0")
    y = np.asarray(y, dtype=float)
    z_in = np.asarray(z, dtype=np.complex128)
    if np.any(z_in.imag == 0.0):
        raise ConfigurationError("log potential requires Im z != 0")
    d = z_in[..., None] - y
    if np.any(np.abs(d) < 1e-14):
        raise SingularityError("evaluation point within 1e-14 of an eigenvalue")
    a2 = a * a
    f = (z_in * z_in - 2.0 * u * z_in) / (2.0 * a2) + np.mean(np.log(d), axis=-1)
    d1 = (z_in - u) / a2 + np.mean(1.0 / d, axis=-1)
    d2 = 1.0 / a2 - np.mean(1.0 / (d * d), axis=-1)
    if z_in.ndim == 0:
        return complex(f), complex(d1), complex(d2)
    return f, d1, d2


def _sqrt_z2m1(z):
    # sqrt(z^2 - 1) with branch cut exactly on [-1, 1]; the product of
    # principal square roots is Schwarz symmetric and ~ z at infinity
    return np.sqrt(z - 1.0) * np.sqrt(z + 1.0)


def limit_potential_f(z, u: float, a: float):
    """Limit of the log potential and its derivative.

    The value integrates log(z - t) sigma(t) dt by 64-node Gauss-Legendre
    after t = cos(phi); the derivative uses the closed-form Stieltjes
    transform of the semicircle, 2 (z - sqrt(z^2 - 1)).
    Requires z off the cut [-1, 1].
    """
    if a <= 0:
        raise ConfigurationError("a must be > 0")
    z_in = np.asarray(z, dtype=np.complex128)
    on_cut = (z_in.imag == 0.0) & (np.abs(z_in.real) <= 1.0)
    if np.any(on_cut):
        raise ConfigurationError("limit potential requires z off the cut [-1, 1]")
    a2 = a * a
    quad = (2.0 / np.pi) * np.tensordot(
        np.log(z_in[..., None] - np.cos(_PHI)), _SIN2 * _PHI_W, axes=([-1], [0])
    )
    f = (z_in * z_in - 2.0 * u * z_in) / (2.0 * a2) + quad
    d1 = (z_in - u) / a2 + 2.0 * (z_in - _sqrt_z2m1(z_in))
    if z_in.ndim == 0:
        return complex(f), complex(d1)
    return f, d1


@dataclass(frozen=True)
class SaddleData:
    """Saddle geometry of the limit potential at bulk position u.

    theta_c is the saddle angle, w_c_plus the upper saddle preimage on the
    circle of radius sqrt(1 + 4 a^2), z_c_plus the upper saddle itself,
    omega0 the drift entering the kernel's oscillatory prefactor, rho_u
    the limiting density at u.
    """

    u: float
    a: float
    theta_c: float
    w_c_plus: complex
    z_c_plus: complex
    omega0: float
    rho_u: float

    @property
    def z_c_minus(self) -> complex:
        return self.z_c_plus.conjugate()

    @property
    def w_c_minus(self) -> complex:
        return self.w_c_plus.conjugate()


def saddle_data(u: float, a: float) -> SaddleData:
    """Solve the saddle equation for the limit potential.

    Valid for bulk positions |u| <= sqrt(1/2 + 2 a^2).  The result is
    checked hard: |f'(z_c)| <= 1e-12 and the normalized saddle identity
    z_c/(a^2 rho(u)) = omega0 + i pi to 1e-10.
    """
    if a <= 0:
        raise ConfigurationError("a must be > 0")
    bulk = np.sqrt(0.5 + 2.0 * a * a)
    if abs(u) > bulk:
        raise ConfigurationError(
            f"u={u} outside the admissible bulk window |u| <= {bulk:.6f}"
        )
    r = np.sqrt(1.0 + 4.0 * a * a)
    theta_c = float(np.arccos(u / r))
    w_c = r * np.exp(1j * theta_c)
    z_c = 0.5 * (w_c + 1.0 / w_c)
    rho_u = semicircle_rho(u, a)
    omega0 = float(np.pi * (1.0 + 2.0 * a * a) / (2.0 * a * a) / np.tan(theta_c))
    for zc in (z_c, np.conj(z_c)):
        _, d1 = limit_potential_f(zc, u, a)
        if abs(d1) > 1e-12:
            raise NumericalError(f"saddle residual |f'(z_c)| = {abs(d1):.3e} > 1e-12")
    ident = z_c / (a * a * rho_u)
    if abs(ident - (omega0 + 1j * np.pi)) > 1e-10:
        raise NumericalError("normalized saddle identity violated beyond 1e-10")
    return SaddleData(
        u=u,
        a=a,
        theta_c=theta_c,
        w_c_plus=complex(w_c),
        z_c_plus=complex(z_c),
        omega0=omega0,
        rho_u=float(rho_u),
    )


def write_spectrum_csv(path, spec) -> None:
    """One eigenvalue per line."""
    vals = spec.values if isinstance(spec, Spectrum) else np.asarray(spec)
    np.savetxt(path, vals, fmt="%.17g")


def write_spectrum_binary(path, spec) -> None:
    """Same header convention as matrix export: 16-byte (magic, N), then
    N little-endian doubles."""
    vals = spec.values if isinstance(spec, Spectrum) else np.asarray(spec)
    with open(path, "wb") as f:
        f.write(_SPEC_HEADER.pack(_SPEC_MAGIC, vals.size))
        f.write(vals.astype("<f8").tobytes())


def read_spectrum_binary(path) -> Spectrum:
    with open(path, "rb") as f:
        raw = f.read()
    magic, n = _SPEC_HEADER.unpack_from(raw, 0)
    if magic != _SPEC_MAGIC:
        raise ConfigurationError("bad magic in spectrum file")
    vals = np.frombuffer(raw, dtype="<f8", offset=_SPEC_HEADER.size)
    if vals.size != n:
        raise ConfigurationError("spectrum file payload size mismatch")
    return Spectrum(values=vals.copy())
