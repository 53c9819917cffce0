"""Non-intersecting Brownian paths and the eigenvalue density they induce.

Three routes to the same law:

  * the conditional mid-time density of N non-intersecting Brownian
    bridges, a ratio of heat-kernel determinants;
  * its end-time -> infinity limit q_S, a Vandermonde ratio times a
    Gaussian determinant, which at S = a^2/N is exactly the eigenvalue
    density of diag(y) + (a/sqrt(N)) V with V from the GUE;
  * the eigenvalue SDE d lambda_i = dB_i + sum_{k != i} dt/(lambda_i -
    lambda_k), integrated by Euler-Maruyama with gap-adaptive steps.

Note the heat kernel here is the standard one with the minus sign in the
exponent; the Chapman-Kolmogorov property is enforced by tests.

Normalization: km_conditional_density integrates to 1 over the ordered
sector (that is how its normalizing constant is defined), and q_S is its
pointwise limit, so q_S also carries ordered-sector mass 1 and full-space
mass N! as a symmetric function.  Divide by N! for the symmetrized
single-mass convention.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import sqrt

import numpy as np

from .errors import (
    ConditioningError,
    ConfigurationError,
    NumericalError,
    SingularityError,
    StiffnessError,
)
from .ensembles import RngSeed
from .spectral import Spectrum

MAX_DET_DIM = 6  # Gaussian determinants are hopeless beyond this for small S
_STEP_RULE = 1e-4  # dt must not exceed this times the squared minimal gap


def heat_kernel(t: float, x, y):
    """Brownian transition density (2 pi t)^{-1/2} exp(-(x-y)^2 / (2t))."""
    if t <= 0:
        raise ConfigurationError("heat kernel requires t > 0")
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    val = np.exp(-((x - y) ** 2) / (2.0 * t)) / np.sqrt(2.0 * np.pi * t)
    return val if val.ndim else float(val)


@dataclass(frozen=True)
class PathConfig:
    """Start points y (strictly ascending), end points z (default j - 1),
    and the two leg durations S and T."""

    y: np.ndarray
    S: float
    T: float
    z: np.ndarray = field(default=None)

    def __post_init__(self):
        y = np.asarray(self.y, dtype=float)
        if y.ndim != 1 or y.size < 1:
            raise ConfigurationError("y must be a nonempty vector")
        if np.any(np.diff(y) <= 0):
            raise ConfigurationError("y must be strictly ascending")
        if self.S <= 0 or self.T <= 0:
            raise ConfigurationError("leg durations S, T must be positive")
        z = self.z
        if z is None:
            z = np.arange(y.size, dtype=float)
        z = np.asarray(z, dtype=float)
        if z.shape != y.shape:
            raise ConfigurationError("z must match y in length")
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "z", z)

    @property
    def n(self) -> int:
        return self.y.size


def _log_heat_matrix(t: float, u: np.ndarray, v: np.ndarray) -> np.ndarray:
    d = u[:, None] - v[None, :]
    return -0.5 * np.log(2.0 * np.pi * t) - d * d / (2.0 * t)


def _scaled_slogdet(logmat: np.ndarray) -> tuple[float, float]:
    """Sign and log magnitude of det(exp(logmat)), with per-row log
    scaling so the factored matrix has unit row maxima."""
    r = logmat.max(axis=1)
    sign, ld = np.linalg.slogdet(np.exp(logmat - r[:, None]))
    return float(sign), float(ld + r.sum())


def km_conditional_density(x, cfg: PathConfig) -> float:
    """Mid-time density of N non-intersecting Brownian bridges.

    Ratio det(p_S(y_j, x_k)) det(p_T(x_j, z_k)) / det(p_{S+T}(y_j, z_k)),
    evaluated through row-scaled log-domain determinants.  Normalized to
    unit mass over the ordered sector x_1 < ... < x_N; symmetric in x.
    """
    n = cfg.n
    if n > MAX_DET_DIM:
        raise ConfigurationError(f"conditional density limited to N <= {MAX_DET_DIM}")
    x = np.asarray(x, dtype=float)
    if x.shape != (n,):
        raise ConfigurationError("x must match the path count")
    s_z, l_z = _scaled_slogdet(_log_heat_matrix(cfg.S + cfg.T, cfg.y, cfg.z))
    if s_z <= 0.0 or not np.isfinite(l_z):
        raise ConditioningError(
            "normalizing constant of the non-intersection event is not positive"
        )
    s_a, l_a = _scaled_slogdet(_log_heat_matrix(cfg.S, cfg.y, x))
    s_b, l_b = _scaled_slogdet(_log_heat_matrix(cfg.T, x, cfg.z))
    sign = s_a * s_b * s_z
    if sign == 0.0:
        return 0.0
    val = sign * np.exp(l_a + l_b - l_z)
    if val < 0.0:
        if val < -1e-10:
            raise NumericalError(f"conditional density came out negative: {val:.3e}")
        return 0.0
    return float(val)


def _signed_log_vandermonde(x: np.ndarray) -> tuple[float, float]:
    """Sign and log magnitude of prod_{i<j} (x_i - x_j)."""
    iu, ju = np.triu_indices(x.size, k=1)
    d = x[iu] - x[ju]
    if np.any(d == 0.0):
        return 0.0, -np.inf
    return float(np.prod(np.sign(d))), float(np.sum(np.log(np.abs(d))))


def km_limit_density_qS(x, y, S: float) -> float:
    """Long-bridge limit of the conditional density:

        q_S(x; y) = (2 pi S)^{-N/2} (Delta(x)/Delta(y))
                    det(exp(-(x_j - y_k)^2 / (2S)))

    with Delta the Vandermonde product over i < j.  Symmetric in x with
    ordered-sector mass 1.  Nonnegativity is asserted, never patched up
    by absolute values."""
    if S <= 0:
        raise ConfigurationError("S must be positive")
    y = y.values if isinstance(y, Spectrum) else np.asarray(y, dtype=float)
    if np.any(np.diff(y) < 0):
        raise ConfigurationError("y must be ascending")
    if np.any(np.diff(y) == 0):
        raise SingularityError("repeated y entries make the density singular")
    x = np.asarray(x, dtype=float)
    if x.shape != y.shape:
        raise ConfigurationError("x must match y in length")
    n = y.size
    sx, lx = _signed_log_vandermonde(x)
    if sx == 0.0:
        return 0.0  # coincident x: the Vandermonde kills the density
    sy, ly = _signed_log_vandermonde(y)
    d = x[:, None] - y[None, :]
    sd, ld = _scaled_slogdet(-d * d / (2.0 * S))
    if sd == 0.0:
        return 0.0
    log_total = -0.5 * n * np.log(2.0 * np.pi * S) + lx - ly + ld
    val = sx * sy * sd * np.exp(log_total)
    if val < 0.0:
        if val < -1e-10:
            raise NumericalError(f"limit density came out negative: {val:.3e}")
        return 0.0
    return float(val)


def eigen_density_rhoN(x, y, a: float, n: int) -> float:
    """Eigenvalue density of diag(y) + (a/sqrt(N)) V, V from the GUE:
    identical to the limit density at S = a^2/N."""
    if a <= 0:
        raise ConfigurationError("a must be positive")
    yv = y.values if isinstance(y, Spectrum) else np.asarray(y, dtype=float)
    if yv.size != n:
        raise ConfigurationError("declared N does not match the length of y")
    return km_limit_density_qS(x, yv, a * a / n)


def _drift(lam: np.ndarray) -> np.ndarray:
    # pairwise repulsion sum_{k != i} 1/(lam_i - lam_k), vectorized over
    # leading path axes
    d = lam[..., :, None] - lam[..., None, :]
    idx = np.arange(lam.shape[-1])
    d[..., idx, idx] = np.inf
    return (1.0 / d).sum(axis=-1)


def _advance_single(
    lam: np.ndarray,
    duration: float,
    dt0: float,
    rng: np.random.Generator,
    max_halvings: int = 48,
) -> np.ndarray:
    t = 0.0
    step = dt0
    halvings = 0
    clean = 0
    while t < duration - 1e-15 * max(duration, 1.0):
        step = min(step, duration - t)
        prop = lam + step * _drift(lam) + sqrt(step) * rng.standard_normal(lam.size)
        if np.all(np.diff(prop) > 0.0):
            lam = prop
            t += step
            clean += 1
            if clean >= 8 and step < dt0:
                step = min(2.0 * step, dt0)
                clean = 0
        else:
            halvings += 1
            if halvings > max_halvings:
                raise StiffnessError(
                    "eigenvalue SDE rejected the step beyond the retry budget"
                )
            step *= 0.5
            clean = 0
    return lam


def dyson_evolve(y, t_final: float, dt: float, seed: RngSeed) -> np.ndarray:
    """One path of the eigenvalue SDE, Euler-Maruyama with adaptive
    halving near collisions; the output is strictly ascending.

    The base step must satisfy dt <= 1e-4 * (min gap)^2 at the start."""
    y = y.values if isinstance(y, Spectrum) else np.asarray(y, dtype=float)
    if np.any(np.diff(y) <= 0):
        raise ConfigurationError("start configuration must be strictly ascending")
    if t_final <= 0 or dt <= 0:
        raise ConfigurationError("t_final and dt must be positive")
    if y.size > 1:
        gap = float(np.min(np.diff(y)))
        if dt > _STEP_RULE * gap * gap:
            raise ConfigurationError(
                f"dt={dt} exceeds the stability rule {_STEP_RULE} * (min gap)^2 = "
                f"{_STEP_RULE * gap * gap:.3e}"
            )
    if not isinstance(seed, RngSeed):
        seed = RngSeed(int(seed), 0)
    rng = seed.generator()
    if y.size == 1:
        return y + sqrt(t_final) * rng.standard_normal(1)
    steps = int(np.ceil(t_final / dt))
    h = t_final / steps
    lam = y.copy()
    for _ in range(steps):
        lam = _advance_single(lam, h, h, rng)
    return lam


def dyson_ensemble(
    y, t_final: float, dt: float, seed: RngSeed, n_paths: int
) -> np.ndarray:
    """Terminal configurations of n_paths independent SDE paths.

    Vectorized across paths with a single stream; paths that reject a
    step fall back to the adaptive single-path integrator in ascending
    path order, so the result is a deterministic function of the seed.
    """
    y = y.values if isinstance(y, Spectrum) else np.asarray(y, dtype=float)
    if np.any(np.diff(y) <= 0):
        raise ConfigurationError("start configuration must be strictly ascending")
    if t_final <= 0 or dt <= 0 or n_paths < 1:
        raise ConfigurationError("t_final, dt, n_paths must be positive")
    gap = float(np.min(np.diff(y))) if y.size > 1 else np.inf
    if y.size > 1 and dt > _STEP_RULE * gap * gap:
        raise ConfigurationError(
            f"dt={dt} exceeds the stability rule {_STEP_RULE} * (min gap)^2"
        )
    if not isinstance(seed, RngSeed):
        seed = RngSeed(int(seed), 0)
    rng = seed.generator()
    steps = int(np.ceil(t_final / dt))
    h = t_final / steps
    lam = np.tile(y, (n_paths, 1))
    n = y.size
    for _ in range(steps):
        noise = rng.standard_normal((n_paths, n))
        prop = lam + h * _drift(lam) + sqrt(h) * noise
        ok = np.all(np.diff(prop, axis=1) > 0.0, axis=1)
        bad = np.nonzero(~ok)[0]
        prop[bad] = lam[bad]
        lam = prop
        for i in bad:
            lam[i] = _advance_single(lam[i], h, h / 2.0, rng)
    return lam
