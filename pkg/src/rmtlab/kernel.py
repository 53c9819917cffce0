"""Correlation kernels: the double-contour deformed kernel and its limits.

The central object is the rescaled two-point kernel of the deformed
ensemble at bulk position u, evaluated at separation tau measured in units
of the mean spacing 1/(N rho(u)):

    kappa(tau) = N / (2 pi i)^2 * oint_gamma dz int_Gamma dw
                 h(z, w; tau) g(z, w) exp(N [fN(w) - fN(z)])

with fN the finite-N log potential (see spectral), gamma a positively
oriented rectangle enclosing the spectrum, Gamma an upward vertical line
through the saddle abscissa,

    g(z, w) = fN'(z)/z + (fN'(z) - fN'(w)) / (z - w),

whose coincident limit is fN'(z)/z + fN''(z), and the pairing factor

    h(z, w; tau) = exp(omega0 tau) / tau
                   * (exp(-tau w / c) - exp(-tau (w - z) / c)),

where c = a^2 rho(u) and omega0 is the saddle drift.  h(z, w; 0) = -z/c.
kappa includes the oscillatory and Gaussian conjugation factors, so it is
real, kappa(0) is close to 1, and kappa -> sin(pi tau)/(pi tau) in the
bulk as N grows.

Numerics: quadrature is composite Gauss-Legendre (24 nodes per panel)
with panel doubling until two refinements agree, all exponentials are
stabilized in the log domain, and contour truncation accounts for the
growth of h in Re z up to the declared tau budget.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from functools import lru_cache
from math import factorial

import numpy as np
from scipy import integrate

from .errors import (
    AccuracyError,
    ConditioningError,
    ConfigurationError,
    NumericalError,
)
from .spectral import SaddleData, Spectrum, log_potential_fN, saddle_data, semicircle_rho

log = logging.getLogger(__name__)

NODES_PER_PANEL = 24
MAX_NODES = 2**14
# endpoint integrand must sit below 1e-18 of the contour peak
_DECAY_LOG = 41.5
_COINCIDENCE_EPS = 1e-4  # switch to the removable-singularity series below this
_SERIES_TAU = 1e-4


@lru_cache(maxsize=8)
def _gl_rule(n: int):
    x, w = np.polynomial.legendre.leggauss(n)
    return x, w


def _panel_nodes(z0: complex, z1: complex, panels: int, per_panel: int = NODES_PER_PANEL):
    """Composite Gauss-Legendre nodes and weights on the segment [z0, z1]."""
    x, w = _gl_rule(per_panel)
    edges = z0 + (z1 - z0) * np.arange(panels + 1) / panels
    mid = 0.5 * (edges[:-1] + edges[1:])
    half = 0.5 * (edges[1:] - edges[:-1])
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights


@dataclass(frozen=True)
class ContourQuadrature:
    """A quadrature rule along a contour: nodes, complex weights (including
    the direction element dz), and geometry metadata."""

    nodes: np.ndarray
    weights: np.ndarray
    closed: bool
    label: str
    geometry: dict = field(default_factory=dict)

    @property
    def node_count(self) -> int:
        return self.nodes.size

    def residue_probe(self, pole: complex) -> complex:
        """Quadrature value of the integral of dz/(z - pole); equals
        2 pi i for a closed positively oriented contour around the pole."""
        return complex(np.sum(self.weights / (self.nodes - pole)))


def _envelope_gamma(x, omega_line, u, a, n, y, tau_budget, c):
    """Log magnitude bound of the z integrand along Im z = omega_line,
    including the worst-case pairing-factor growth exp(|tau| |Re z - u|/c)."""
    z = np.asarray(x, dtype=float) + 1j * omega_line
    f, _, _ = log_potential_fN(z, u, a, y)
    return -n * np.real(f) + tau_budget * np.abs(np.asarray(x) - u) / c


def build_gamma(
    u: float,
    a: float,
    y,
    panels: int,
    tau_budget: float = 8.0,
    pad: float = 0.25,
) -> ContourQuadrature:
    """Closed rectangular contour around the spectrum for the z integral.

    Horizontal sides run at Im z = +/- max(|Im z_c|, 0.05).  The
    horizontal extent encloses every eigenvalue with a safety pad and is
    extended until the integrand envelope at the corners is 1e-18 of its
    peak, including the exponential growth of the pairing factor for
    |tau| <= tau_budget.  Orientation is counterclockwise.
    """
    y = y.values if isinstance(y, Spectrum) else np.asarray(y, dtype=float)
    n = y.size
    sd = saddle_data(u, a)
    omega_line = max(abs(sd.z_c_plus.imag), 0.05)
    pad = max(pad, 0.2)
    c = a * a * sd.rho_u
    half = a * np.sqrt(2.0 * _DECAY_LOG / n)
    xl = min(y.min() - pad, u - half)
    xr = max(y.max() + pad, u + half)
    for _ in range(60):
        probe = np.linspace(xl, xr, 257)
        env = _envelope_gamma(probe, omega_line, u, a, n, y, tau_budget, c)
        peak = env.max()
        bad_l = env[0] > peak - _DECAY_LOG
        bad_r = env[-1] > peak - _DECAY_LOG
        if not (bad_l or bad_r):
            break
        step = 0.4 * a + 0.1 * (xr - xl)
        if bad_l:
            xl -= step
        if bad_r:
            xr += step
    else:
        raise AccuracyError(
            "rectangle contour failed to reach integrand decay",
            {"xl": xl, "xr": xr, "omega_line": omega_line},
        )
    p_h = max(int(panels), 1)
    p_v = max(1, round(p_h * 2.0 * omega_line / (xr - xl)))
    corners = [
        xl - 1j * omega_line,
        xr - 1j * omega_line,
        xr + 1j * omega_line,
        xl + 1j * omega_line,
    ]
    seg_panels = [p_h, p_v, p_h, p_v]
    nodes, weights = [], []
    for i in range(4):
        nd, wt = _panel_nodes(corners[i], corners[(i + 1) % 4], seg_panels[i])
        nodes.append(nd)
        weights.append(wt)
    return ContourQuadrature(
        nodes=np.concatenate(nodes),
        weights=np.concatenate(weights),
        closed=True,
        label="gamma",
        geometry={
            "xl": xl,
            "xr": xr,
            "omega_line": omega_line,
            "panels_horizontal": p_h,
            "panels_vertical": p_v,
        },
    )


def build_Gamma(
    u: float,
    a: float,
    y,
    panels: int,
    pad: float = 0.3,
    x0: float | None = None,
) -> ContourQuadrature:
    """Upward vertical line Re w = x0 for the w integral.

    x0 defaults to the saddle abscissa Re z_c (the imaginary axis at
    u = 0).  The truncation half-height T starts from the Gaussian decay
    radius and is extended until the integrand envelope exp(N Re fN) at
    the endpoints is 1e-18 of its peak along the line.
    """
    y = y.values if isinstance(y, Spectrum) else np.asarray(y, dtype=float)
    n = y.size
    sd = saddle_data(u, a)
    if x0 is None:
        x0 = sd.z_c_plus.real
    t_half = abs(sd.z_c_plus.imag) + a * np.sqrt(2.0 * _DECAY_LOG / n) + pad
    for _ in range(60):
        probe_t = np.linspace(-t_half, t_half, 256)  # even count avoids Im w = 0
        f, _, _ = log_potential_fN(x0 + 1j * probe_t, u, a, y)
        env = n * np.real(f)
        if max(env[0], env[-1]) <= env.max() - _DECAY_LOG:
            break
        t_half *= 1.3
    else:
        raise AccuracyError(
            "vertical contour failed to reach integrand decay",
            {"x0": x0, "t_half": t_half},
        )
    nodes, weights = _panel_nodes(x0 - 1j * t_half, x0 + 1j * t_half, max(int(panels), 1))
    return ContourQuadrature(
        nodes=nodes,
        weights=weights,
        closed=False,
        label="Gamma",
        geometry={"x0": x0, "t_half": t_half, "panels": max(int(panels), 1)},
    )


class KernelContext:
    """Everything needed to evaluate the rescaled kernel on one spectrum.

    Holds the bulk position u, deformation a, the spectrum y of the
    undeformed rescaled matrix, the saddle data, and cached per-level
    contour quadratures with stabilized integrand factors.  Refinement
    level L uses base_panels * 2^L panels per contour segment.
    """

    def __init__(
        self,
        u: float,
        a: float,
        y,
        base_panels: int | None = None,
        tau_budget: float = 8.0,
        target_rtol: float = 1e-8,
        accept_rtol: float = 1e-5,
        max_nodes: int = MAX_NODES,
        gamma_x0: float | None = None,
    ):
        if a <= 0.0:
            raise ConfigurationError(
                "kernel evaluation requires a > 0: the deformation sets the scale"
            )
        y = y.values if isinstance(y, Spectrum) else np.asarray(y, dtype=float)
        if y.ndim != 1 or y.size < 1:
            raise ConfigurationError("spectrum must be a nonempty 1-d array")
        self.u = float(u)
        self.a = float(a)
        self.y = np.sort(y)
        self.n = y.size
        self.saddle: SaddleData = saddle_data(u, a)
        self.rho_u = self.saddle.rho_u
        self.c = a * a * self.rho_u  # local spacing scale a^2 rho(u)
        self.tau_budget = float(tau_budget)
        self.target_rtol = target_rtol
        self.accept_rtol = accept_rtol
        self.max_nodes = max_nodes
        self.base_panels = (
            int(base_panels)
            if base_panels is not None
            else max(8, int(np.ceil(0.9 * np.sqrt(self.n))))
        )
        self.gamma_x0 = gamma_x0  # abscissa of the vertical contour
        self._levels: dict[int, dict] = {}
        self.last_diagnostics: dict = {}

    @property
    def omega(self) -> float:
        """Drift per unit tau of the kernel's oscillatory prefactor,
        omega0 / (N rho(u))."""
        return self.saddle.omega0 / (self.n * self.rho_u)

    def level_nodes(self, level: int) -> int:
        p = self.base_panels * 2**level
        return 2 * p * NODES_PER_PANEL  # horizontal sides dominate

    def max_level(self) -> int:
        lv = 0
        while self.level_nodes(lv + 1) <= self.max_nodes:
            lv += 1
        return lv

    def _level(self, level: int) -> dict:
        if level in self._levels:
            return self._levels[level]
        p = self.base_panels * 2**level
        gamma = build_gamma(self.u, self.a, self.y, p, tau_budget=self.tau_budget)
        big_gamma = build_Gamma(self.u, self.a, self.y, p, x0=self.gamma_x0)
        fz, fpz, _ = log_potential_fN(gamma.nodes, self.u, self.a, self.y)
        fw, fpw, _ = log_potential_fN(big_gamma.nodes, self.u, self.a, self.y)
        # log-domain stabilization: pull the common magnitude out of each
        # exponential so node factors stay <= 1, restore it at the end
        mz = float(np.max(-self.n * fz.real))
        mw = float(np.max(self.n * fw.real))
        ez = gamma.weights * np.exp(-self.n * fz - mz)
        ew = big_gamma.weights * np.exp(self.n * fw - mw)
        data = {
            "gamma": gamma,
            "Gamma": big_gamma,
            "z": gamma.nodes,
            "w": big_gamma.nodes,
            "fpz": fpz,
            "fpw": fpw,
            "ez": ez,
            "ew": ew,
            "log_scale": mz + mw,
        }
        self._levels[level] = data
        return data

    def _h_z_factor(self, taus: np.ndarray, z: np.ndarray) -> np.ndarray:
        """z-dependent half of the pairing factor: -(exp(tau z/c) - 1)/tau,
        with the coincident limit -z/c and a series branch for small tau."""
        out = np.empty((taus.size, z.size), dtype=np.complex128)
        zc = z / self.c
        for i, tau in enumerate(taus):
            if tau == 0.0:
                out[i] = -zc
            elif abs(tau) < _SERIES_TAU:
                x = tau * zc
                out[i] = -zc * (1.0 + x / 2.0 + x * x / 6.0 + x * x * x / 24.0)
            else:
                half = 0.5 * tau * zc
                out[i] = -2.0 * np.exp(half) * np.sinh(half) / tau
        return out

    def _eval_grid(self, level: int, taus: np.ndarray) -> np.ndarray:
        lv = self._level(level)
        z, w = lv["z"], lv["w"]
        fpz, fpw = lv["fpz"], lv["fpw"]
        ez, ew = lv["ez"], lv["ew"]
        hz = self._h_z_factor(taus, z) * ez[None, :]
        hw = np.exp(-np.outer(taus, w) / self.c) * ew[None, :]
        vals = np.zeros(taus.size, dtype=np.complex128)
        block = max(1, int(2**21 // max(z.size, 1)))
        fz_over_z = fpz / z
        for lo in range(0, w.size, block):
            hi = min(lo + block, w.size)
            dz = z[:, None] - w[None, lo:hi]
            g = fz_over_z[:, None] + (fpz[:, None] - fpw[None, lo:hi]) / dz
            close = np.abs(dz) < _COINCIDENCE_EPS
            if np.any(close):
                zi, wj = np.nonzero(close)
                mid = 0.5 * (z[zi] + w[lo + wj])
                _, _, f2 = log_potential_fN(mid, self.u, self.a, self.y)
                g[zi, wj] = fz_over_z[zi] + f2
            tmp = hz @ g  # (n_tau, block)
            vals += np.einsum("tb,tb->t", tmp, hw[:, lo:hi])
        pref = np.exp(self.saddle.omega0 * taus + lv["log_scale"])
        return vals * pref * self.n / (2j * np.pi) ** 2

    def scan(self, taus) -> np.ndarray:
        """Rescaled kernel on a grid of tau values, with panel doubling
        until two successive refinements agree to target_rtol.  At the
        node cap, disagreement beyond accept_rtol raises AccuracyError."""
        taus = np.atleast_1d(np.asarray(taus, dtype=float))
        if np.any(np.abs(taus) > self.tau_budget):
            raise ConfigurationError(
                f"|tau| exceeds the context budget {self.tau_budget}; "
                "rebuild the context with a larger tau_budget"
            )
        top = self.max_level()
        prev = self._eval_grid(0, taus)
        level = 0
        diff = np.inf
        cur = prev
        while level < top:
            level += 1
            cur = self._eval_grid(level, taus)
            scale = max(1.0, float(np.abs(cur).max()))
            diff = float(np.abs(cur - prev).max())
            if diff <= self.target_rtol * scale:
                break
            prev = cur
        scale = max(1.0, float(np.abs(cur).max()))
        self.last_diagnostics = {
            "levels_used": level + 1,
            "gamma_nodes": self._level(level)["gamma"].node_count,
            "Gamma_nodes": self._level(level)["Gamma"].node_count,
            "refinement_gap": diff,
            "imag_residual": float(np.abs(cur.imag).max()),
            "base_panels": self.base_panels,
        }
        if diff > self.accept_rtol * scale:
            raise AccuracyError(
                "kernel quadrature did not self-converge at the node cap",
                self.last_diagnostics,
            )
        if float(np.abs(cur.imag).max()) > 1e-6 * scale:
            raise AccuracyError(
                "kernel imaginary residual exceeds 1e-6 of magnitude",
                self.last_diagnostics,
            )
        return cur.real if cur.size > 1 else cur.real

    def h_g_at(self, z, w, tau: float):
        """Pairing factor h and difference-quotient factor g at points
        (z, w), broadcasting; shares the branch logic of the scan path."""
        z_in = np.asarray(z, dtype=np.complex128)
        w_in = np.asarray(w, dtype=np.complex128)
        zb, wb = np.broadcast_arrays(z_in, w_in)
        shape = zb.shape
        zf, wf = zb.ravel(), wb.ravel()
        hz = self._h_z_factor(np.array([float(tau)]), zf)[0]
        h = np.exp(self.saddle.omega0 * tau) * hz * np.exp(-tau * wf / self.c)
        _, fpz, _ = log_potential_fN(zf, self.u, self.a, self.y)
        _, fpw, _ = log_potential_fN(wf, self.u, self.a, self.y)
        dz = zf - wf
        g = np.empty_like(zf)
        far = np.abs(dz) >= _COINCIDENCE_EPS
        g[far] = fpz[far] / zf[far] + (fpz[far] - fpw[far]) / dz[far]
        if np.any(~far):
            mid = 0.5 * (zf[~far] + wf[~far])
            _, _, f2 = log_potential_fN(mid, self.u, self.a, self.y)
            g[~far] = fpz[~far] / zf[~far] + f2
        if shape == ():
            return complex(h[0]), complex(g[0])
        return h.reshape(shape), g.reshape(shape)


def eval_h_gN(ctx: KernelContext, z, w, tau: float):
    """Evaluate the pairing factor h(z, w; tau) and the kernel factor
    g(z, w) = fN'(z)/z + (fN'(z) - fN'(w))/(z - w) on the context's
    spectrum.  Points within 1e-14 of an eigenvalue are rejected; pairs
    with |z - w| < 1e-4 take the removable-singularity branch."""
    return ctx.h_g_at(z, w, tau)


def kernel_scan(ctx: KernelContext, taus) -> np.ndarray:
    """Rescaled kernel kappa(tau) on a tau grid (vectorized scan)."""
    return ctx.scan(taus)


def deformed_kernel(ctx: KernelContext, tau: float) -> float:
    """Rescaled kernel at a single separation tau."""
    return float(ctx.scan([tau])[0])


def sine_kernel(tau):
    """sin(pi tau)/(pi tau) with a series branch below |tau| = 1e-4."""
    t = np.asarray(tau, dtype=float)
    out = np.empty_like(t)
    small = np.abs(t) < _SERIES_TAU
    x = np.pi * t[small]
    out[small] = 1.0 - x * x / 6.0 + x**4 / 120.0
    big = ~small
    out[big] = np.sin(np.pi * t[big]) / (np.pi * t[big])
    return out if out.ndim else float(out)


class GueKernel:
    """Finite-N reproducing kernel of the Gaussian unitary ensemble with
    eigenvalue weight exp(-N x^2 / (2 a^2)).

    Built from the orthonormal weighted polynomial functions phi_k via
    the three-term recurrence; the two-point value uses the
    Christoffel-Darboux ratio with a coincidence branch on the diagonal.
    The diagonal integrates to N exactly (orthonormality).
    """

    def __init__(self, n: int, a: float = 1.0):
        if n < 1:
            raise ConfigurationError("kernel order must be >= 1")
        if a <= 0:
            raise ConfigurationError("scale a must be > 0")
        self.n = int(n)
        self.a = float(a)

    def _phi_top(self, x: np.ndarray):
        """phi_{n}, phi_{n-1}, phi_{n-2} at unit scale (a = 1)."""
        n = self.n
        prev = np.zeros_like(x)  # phi_{-1}
        cur = (n / (2.0 * np.pi)) ** 0.25 * np.exp(-n * x * x / 4.0)  # phi_0
        older = prev
        for k in range(n):
            older = prev
            nxt = (x * cur - np.sqrt(k / n) * prev) / np.sqrt((k + 1) / n)
            prev, cur = cur, nxt
        # now cur = phi_n, prev = phi_{n-1}, older = phi_{n-2}
        return cur, prev, older

    def _diag_unit(self, x: np.ndarray) -> np.ndarray:
        n = self.n
        pn, pn1, pn2 = self._phi_top(x)
        return n * pn1 * pn1 - np.sqrt(n * (n - 1.0)) * pn2 * pn

    def diagonal(self, x):
        x = np.asarray(x, dtype=float)
        val = self._diag_unit(x / self.a) / self.a
        return val if val.ndim else float(val)

    def __call__(self, x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        xb, yb = np.broadcast_arrays(x / self.a, y / self.a)
        xf, yf = xb.ravel(), yb.ravel()
        out = np.empty_like(xf)
        close = np.abs(xf - yf) < 1e-6
        if np.any(close):
            out[close] = self._diag_unit(0.5 * (xf[close] + yf[close]))
        far = ~close
        if np.any(far):
            pnx, pn1x, _ = self._phi_top(xf[far])
            pny, pn1y, _ = self._phi_top(yf[far])
            out[far] = (pnx * pn1y - pn1x * pny) / (xf[far] - yf[far])
        out = out / self.a
        if xb.shape == ():
            return float(out[0])
        return out.reshape(xb.shape)

    def trace(self) -> float:
        """Integral of the diagonal over the real line; equals N."""
        span = 2.0 * self.a + 12.0 * self.a / np.sqrt(self.n)
        val, _ = integrate.quad(
            lambda s: self.diagonal(s),
            -span,
            span,
            limit=800,
            epsabs=1e-12,
            epsrel=1e-12,
            points=[-2.0 * self.a, 0.0, 2.0 * self.a],
        )
        return float(val)

    def rescaled_bulk(self, taus) -> np.ndarray:
        """Kernel at the bulk center in mean-spacing units,
        K(0, tau/(N rho0)) / (N rho0) with rho0 = 1/(pi a)."""
        taus = np.atleast_1d(np.asarray(taus, dtype=float))
        dens = self.n / (np.pi * self.a)
        return self(np.zeros_like(taus), taus / dens) / dens


def gue_kernel(n: int, a: float = 1.0) -> GueKernel:
    return GueKernel(n, a)


def correlation_det(kernel, points) -> float:
    """Determinant det[K(x_i, x_j)] of the kernel on a point set, m <= 12.

    kernel is any callable K(x, y) accepting array arguments.  A result
    below -1e-10 indicates a broken kernel and raises."""
    pts = np.atleast_1d(np.asarray(points, dtype=float))
    m = pts.size
    if m > 12:
        raise ConfigurationError("correlation determinants limited to m <= 12 points")
    mat = np.asarray(kernel(pts[:, None], pts[None, :]), dtype=float).reshape(m, m)
    det = float(np.linalg.det(mat))
    if det < -1e-10:
        raise NumericalError(f"correlation determinant {det:.3e} below -1e-10")
    return det


class BiorthogonalKernel:
    """Projection kernel sum_jk psi_k(x) [A^{-1}]_{kj} phi_j(y) built from
    two function families and a discrete quadrature measure."""

    def __init__(self, phi, psi, nodes, weights):
        self.phi = list(phi)
        self.psi = list(psi)
        self.nodes = np.asarray(nodes, dtype=float)
        self.weights = np.asarray(weights, dtype=float)
        if len(self.phi) != len(self.psi):
            raise ConfigurationError("families must have equal length")
        n = len(self.phi)
        pv = np.array([f(self.nodes) for f in self.phi])
        qv = np.array([f(self.nodes) for f in self.psi])
        self.overlap = (pv * self.weights) @ qv.T  # A_jk = int phi_j psi_k dmu
        self.cond = float(np.linalg.cond(self.overlap))
        if not np.isfinite(self.cond) or self.cond > 1e14:
            raise ConditioningError(
                f"biorthogonal overlap matrix is numerically singular "
                f"(condition number {self.cond:.3e})"
            )
        self._inv = np.linalg.solve(self.overlap, np.eye(n))

    def __call__(self, x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        px = np.stack([f(np.atleast_1d(x)) for f in self.psi])  # psi at x
        qy = np.stack([f(np.atleast_1d(y)) for f in self.phi])  # phi at y
        val = np.einsum("ka,kj,jb->ab", px, self._inv, qy)
        if x.ndim == 0 and y.ndim == 0:
            return float(val[0, 0])
        if x.ndim == 0:
            return val[0]
        if y.ndim == 0:
            return val[:, 0]
        return val

    def trace(self) -> float:
        """Integral of the diagonal against the measure; equals the family
        size by the biorthogonal projection property."""
        diag = np.array(
            [self(t, t) for t in self.nodes]
        )
        return float(np.sum(diag * self.weights))


def biorthogonal_kernel(phi, psi, nodes, weights) -> BiorthogonalKernel:
    return BiorthogonalKernel(phi, psi, nodes, weights)


def _unit_gl(npts: int):
    x, w = _gl_rule(npts)
    return 0.5 * (x + 1.0), 0.5 * w


def fredholm_ratio_check(n_dim: int, g, quad_points: int = 48) -> dict:
    """Verify that the N-fold deformed integral over a biorthogonal
    ensemble equals a finite-rank determinant.

    With monomial families phi_j = psi_j = x^j on [0, 1] and

        Z[f] = (1/N!) int det[phi_j(x_k)] det[psi_j(x_k)] prod f(x_l) dx,

    the ratio Z[1+g]/Z[1] must equal det(I + A^{-1} B) where
    A_jk = int phi_j psi_k and B_jk = int phi_j psi_k g.  The left side
    is brute-force tensor quadrature; the right side is an N x N
    determinant.  Also checks the one-point function, N times the
    marginal of the normalized density, against the kernel diagonal.
    """
    if n_dim not in (2, 3):
        raise ConfigurationError("brute-force ratio check supports N in {2, 3}")
    t, wt = _unit_gl(quad_points)
    fams = [np.vectorize(lambda s, j=j: s**j, otypes=[float]) for j in range(n_dim)]
    p = np.array([t**j for j in range(n_dim)])  # (n, q)

    def z_bruteforce(f) -> float:
        fvals = np.asarray(f(t), dtype=float)
        idx = np.indices((quad_points,) * n_dim).reshape(n_dim, -1).T
        mats = np.transpose(p[:, idx], (1, 2, 0))
        dets = np.linalg.det(mats)
        fprod = np.prod(fvals[idx], axis=1)
        wprod = np.prod(wt[idx], axis=1)
        return float(np.sum(dets * dets * fprod * wprod)) / factorial(n_dim)

    z_plain = z_bruteforce(lambda s: np.ones_like(s))
    z_def = z_bruteforce(lambda s: 1.0 + np.asarray(g(s), dtype=float))
    lhs = z_def / z_plain

    gv = np.asarray(g(t), dtype=float)
    a_mat = (p * wt) @ p.T
    b_mat = (p * (wt * gv)) @ p.T
    rhs = float(np.linalg.det(np.eye(n_dim) + np.linalg.solve(a_mat, b_mat)))

    kern = biorthogonal_kernel(fams, fams, t, wt)
    probes = np.array([0.15, 0.4, 0.5, 0.7, 0.9])
    r1_gap = 0.0
    idx = np.indices((quad_points,) * (n_dim - 1)).reshape(n_dim - 1, -1).T
    for t0 in probes:
        col0 = np.array([t0**j for j in range(n_dim)])
        mats = np.empty((idx.shape[0], n_dim, n_dim))
        mats[:, 0, :] = col0
        mats[:, 1:, :] = np.transpose(p[:, idx], (1, 2, 0))
        dets = np.linalg.det(mats)
        wprod = np.prod(wt[idx], axis=1)
        marginal = float(np.sum(dets * dets * wprod))
        r1 = n_dim * marginal / (factorial(n_dim) * z_plain)
        r1_gap = max(r1_gap, abs(r1 - kern(t0, t0)))
    return {
        "n": n_dim,
        "lhs": lhs,
        "rhs": rhs,
        "gap": abs(lhs - rhs),
        "r1_max_gap": r1_gap,
        "overlap_cond": kern.cond,
    }
