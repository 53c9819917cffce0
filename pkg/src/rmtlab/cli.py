"""Command-line driver for the experiment suite.

Every run resolves its parameters (config file, then flags on top), hashes
the resolved set, executes, and writes an artifact bundle into the output
directory: canonical CSV data, a JSON summary carrying metadata only, and
an SVG figure rendered from the same arrays that went into the CSV.  The
JSON summary embeds the config hash, master seed, and package version, and
contains everything needed to replay the run byte for byte.

Exit codes: 0 success, 2 configuration or schema violation (message on
stderr), 3 numerical or accuracy failure (JSON diagnostics on stderr).
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .errors import (AccuracyError, ConfigurationError, NumericalError,
                     RmtError)

OUT_DIR_ENV = "RMTLAB_OUT_DIR"

_LAW_CHOICES = ("bernoulli", "uniform", "gaussian", "two_point", "gue")


# ---------------------------------------------------------------------------
# parameter schema


def _cast_int(raw, lo=None, hi=None):
    try:
        v = int(str(raw), 10)
    except ValueError:
        raise ConfigurationError(f"expected an integer, got {raw!r}")
    if lo is not None and v < lo:
        raise ConfigurationError(f"value {v} below minimum {lo}")
    if hi is not None and v > hi:
        raise ConfigurationError(f"value {v} above maximum {hi}")
    return v


def _cast_float(raw, lo=None, strict_lo=None):
    try:
        v = float(raw)
    except (TypeError, ValueError):
        raise ConfigurationError(f"expected a number, got {raw!r}")
    if not np.isfinite(v):
        raise ConfigurationError(f"value {v!r} is not finite")
    if lo is not None and v < lo:
        raise ConfigurationError(f"value {v} below minimum {lo}")
    if strict_lo is not None and v <= strict_lo:
        raise ConfigurationError(f"value {v} must exceed {strict_lo}")
    return v


def _cast_bool(raw):
    s = str(raw).strip().lower()
    if s in ("1", "true", "yes", "on"):
        return True
    if s in ("0", "false", "no", "off"):
        return False
    raise ConfigurationError(f"expected a boolean, got {raw!r}")


def _cast_law(raw):
    s = str(raw).strip().lower()
    if s not in _LAW_CHOICES:
        raise ConfigurationError(
            f"unknown entry law {raw!r}; choose from {', '.join(_LAW_CHOICES)}")
    return s


def _cast_floats(raw):
    """Comma-separated list, lo:hi:step range syntax, or a JSON list."""
    if isinstance(raw, (list, tuple)):
        vals = [_cast_float(v) for v in raw]
        if not vals:
            raise ConfigurationError("empty number list")
        return vals
    s = str(raw).strip()
    if ":" in s and "," not in s:
        parts = s.split(":")
        if len(parts) != 3:
            raise ConfigurationError(f"range syntax is lo:hi:step, got {raw!r}")
        lo, hi, step = (_cast_float(p) for p in parts)
        if step <= 0 or hi < lo:
            raise ConfigurationError(f"empty range {raw!r}")
        n = int(np.floor((hi - lo) / step + 1e-9)) + 1
        return [lo + k * step for k in range(n)]
    try:
        vals = [float(tok) for tok in s.split(",") if tok.strip()]
    except ValueError:
        raise ConfigurationError(f"expected comma-separated numbers, got {raw!r}")
    if not vals:
        raise ConfigurationError("empty number list")
    return vals


# (caster, default) per key, per command.  None default means required... all
# keys here carry usable defaults so bare invocations run out of the box.
_COMMON = {
    "seed": (lambda r: _cast_int(r, lo=0), 20260301),
}

_SCHEMAS = {
    "sample": {
        **_COMMON,
        "law.kind": (_cast_law, "bernoulli"),
        "law.skew": (lambda r: _cast_float(r, strict_lo=0.0), 0.25),
        "N": (lambda r: _cast_int(r, lo=1), 200),
        "a": (lambda r: _cast_float(r, lo=0.0), 1.0),
        "stream": (lambda r: _cast_int(r, lo=0), 0),
        "deformed": (_cast_bool, False),
        "csv": (_cast_bool, False),
    },
    "spectrum": {
        **_COMMON,
        "law.kind": (_cast_law, "bernoulli"),
        "law.skew": (lambda r: _cast_float(r, strict_lo=0.0), 0.25),
        "N": (lambda r: _cast_int(r, lo=2), 1000),
        "a": (lambda r: _cast_float(r, strict_lo=0.0), 1.0),
        "trials": (lambda r: _cast_int(r, lo=1), 50),
        "bins": (lambda r: _cast_int(r, lo=4), 40),
    },
    "kernel-scan": {
        **_COMMON,
        "law.kind": (_cast_law, "bernoulli"),
        "law.skew": (lambda r: _cast_float(r, strict_lo=0.0), 0.25),
        "N": (lambda r: _cast_int(r, lo=4), 200),
        "a": (lambda r: _cast_float(r, strict_lo=0.0), 1.0),
        "u": (_cast_float, 0.0),
        "tau.max": (lambda r: _cast_float(r, strict_lo=0.0), 4.0),
        "tau.step": (lambda r: _cast_float(r, strict_lo=0.0), 0.25),
        "panels": (lambda r: _cast_int(r, lo=0), 0),  # 0 = automatic
    },
    "spacing-mc": {
        **_COMMON,
        "law.kind": (_cast_law, "bernoulli"),
        "law.skew": (lambda r: _cast_float(r, strict_lo=0.0), 0.25),
        "N": (lambda r: _cast_int(r, lo=4), 500),
        "a": (lambda r: _cast_float(r, strict_lo=0.0), 1.0),
        "u": (_cast_float, 0.0),
        "trials": (lambda r: _cast_int(r, lo=100), 2000),
        "t_n": (lambda r: _cast_int(r, lo=0), 0),  # 0 = ceil(sqrt(N))
        "s.grid": (_cast_floats, [0.25 * k for k in range(1, 17)]),
    },
    "fredholm": {
        "s.max": (lambda r: _cast_float(r, strict_lo=0.0), 4.0),
        "s.step": (lambda r: _cast_float(r, strict_lo=0.0), 0.05),
        "nodes": (lambda r: _cast_int(r, lo=4), 64),
    },
    "km-check": {
        "y": (_cast_floats, [-1.0, 1.0]),
        "S": (lambda r: _cast_float(r, strict_lo=0.0), 1.0),
        "T.grid": (_cast_floats, [10.0**k for k in range(1, 7)]),
        "span": (lambda r: _cast_float(r, strict_lo=0.0), 3.0),
        "grid.points": (lambda r: _cast_int(r, lo=2), 20),
    },
    "dyson": {
        **_COMMON,
        "y": (_cast_floats, [-1.0, 1.0]),
        "t": (lambda r: _cast_float(r, strict_lo=0.0), 0.5),
        "dt": (lambda r: _cast_float(r, lo=0.0), 0.0),  # 0 = automatic
        "paths": (lambda r: _cast_int(r, lo=1), 10000),
    },
    "prop11-check": {
        **_COMMON,
        "y": (_cast_floats, [-1.0, 1.0]),
        "a": (lambda r: _cast_float(r, strict_lo=0.0), 1.0),
        "samples": (lambda r: _cast_int(r, lo=1000), 100000),
    },
    "prop22-check": {
        "quad.points": (lambda r: _cast_int(r, lo=8), 48),
    },
}


@dataclass
class ExperimentConfig:
    """Resolved, validated parameter set for one run."""

    command: str
    params: dict = field(default_factory=dict)
    out_dir: Path = Path(".")

    def __post_init__(self):
        schema = _SCHEMAS.get(self.command)
        if schema is None:
            raise ConfigurationError(f"unknown command {self.command!r}")
        clean = {}
        for key, raw in self.params.items():
            if key not in schema:
                raise ConfigurationError(
                    f"unknown key {key!r} for command {self.command!r}; "
                    f"valid keys: {', '.join(sorted(schema))}")
            clean[key] = schema[key][0](raw)
        for key, (_, default) in schema.items():
            clean.setdefault(key, default)
        object.__setattr__(self, "params", clean)
        object.__setattr__(self, "out_dir", Path(self.out_dir))

    def sha256(self) -> str:
        blob = json.dumps({"command": self.command, "params": self.params},
                          sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()


# ---------------------------------------------------------------------------
# output helpers


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return repr(float(v))


def _write_csv(path: Path, header, rows) -> None:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    path.write_text("\n".join(lines) + "\n")


def _write_summary(cfg: ExperimentConfig, results: dict, outputs: list) -> Path:
    summary = {
        "command": cfg.command,
        "version": __version__,
        "config_sha256": cfg.sha256(),
        "seed": cfg.params.get("seed"),
        "params": cfg.params,
        "outputs": [str(p.name) for p in outputs],
        "results": results,
    }
    path = cfg.out_dir / f"{cfg.command}.json"
    path.write_text(json.dumps(summary, sort_keys=True, indent=2) + "\n")
    return path


def _law_spec(params):
    """None encodes the reference ensemble with no independent-entry part."""
    from .ensembles import WignerSpec

    kind = params["law.kind"]
    if kind == "gue":
        return None
    if kind == "two_point":
        return WignerSpec.from_kind(kind, skew_weight=params["law.skew"])
    return WignerSpec.from_kind(kind)


# ---------------------------------------------------------------------------
# subcommand handlers; each returns (results dict, list of output paths)


def _run_sample(cfg):
    from .ensembles import (RngSeed, assemble_deformed, sample_gue,
                            sample_wigner, write_matrix_binary,
                            write_matrix_csv)
    from .plots import matrix_heatmap

    p = cfg.params
    seed = RngSeed(p["seed"], p["stream"])
    spec = _law_spec(p)
    if spec is None:
        v = sample_gue(p["N"], seed.shifted(1))
        mat = type(v)(n=v.n, entries=v.entries * (p["a"] / np.sqrt(p["N"])),
                      seed=seed) if p["deformed"] else v
    else:
        w = sample_wigner(spec, p["N"], seed)
        mat = assemble_deformed(w, p["a"], seed.shifted(1)) if p["deformed"] else w
    outputs = []
    bin_path = cfg.out_dir / "sample.bin"
    write_matrix_binary(bin_path, mat)
    outputs.append(bin_path)
    if p["csv"] and p["N"] <= 64:
        csv_path = cfg.out_dir / "sample.csv"
        write_matrix_csv(csv_path, mat)
        outputs.append(csv_path)
    svg = cfg.out_dir / "sample.svg"
    matrix_heatmap(svg, mat.entries, title=f"entry magnitudes, N={p['N']}")
    outputs.append(svg)
    results = {
        "N": p["N"],
        "hermitian": bool(mat.is_hermitian_exact()),
        "frobenius": float(np.linalg.norm(mat.entries)),
    }
    return results, outputs


def _run_spectrum(cfg):
    from .ensembles import RngSeed, assemble_deformed, sample_gue, sample_wigner
    from .plots import histogram_overlay
    from .spacing import bulk_density
    from .spectral import hermitian_eigenvalues, write_spectrum_csv

    p = cfg.params
    spec = _law_spec(p)
    n, a = p["N"], p["a"]
    pooled = []
    for t in range(p["trials"]):
        if spec is None:
            v = sample_gue(n, RngSeed(p["seed"], 2 * t + 1))
            m = type(v)(n=n, entries=v.entries * (a / np.sqrt(n)), seed=v.seed)
        else:
            w = sample_wigner(spec, n, RngSeed(p["seed"], 2 * t))
            m = assemble_deformed(w, a, RngSeed(p["seed"], 2 * t + 1))
        pooled.append(hermitian_eigenvalues(m).values)
    vals = np.concatenate(pooled)

    edge = np.sqrt(1.0 + 4.0 * a * a) if spec is not None else 2.0 * a
    edges = np.linspace(-edge, edge, p["bins"] + 1)
    hist, _ = np.histogram(vals, bins=edges, density=True)
    mids = 0.5 * (edges[1:] + edges[:-1])
    dens = bulk_density(spec, a, mids)
    sup_err = float(np.max(np.abs(hist - dens)))

    outputs = []
    csv_path = cfg.out_dir / "spectrum.csv"
    write_spectrum_csv(csv_path, np.sort(vals))
    outputs.append(csv_path)
    svg = cfg.out_dir / "spectrum.svg"
    xs = np.linspace(-edge, edge, 400)
    histogram_overlay(svg, vals, p["bins"], -edge, edge, overlay_x=xs,
                      overlay_y=bulk_density(spec, a, xs),
                      overlay_label="limiting density",
                      title=f"pooled spectrum, N={n}, {p['trials']} trials",
                      xlabel="eigenvalue")
    outputs.append(svg)
    results = {"sup_bin_error": sup_err, "eigenvalue_count": int(vals.size),
               "bins": p["bins"]}
    return results, outputs


def _run_kernel_scan(cfg):
    from .ensembles import RngSeed, sample_wigner
    from .kernel import KernelContext, sine_kernel
    from .plots import curve_overlay
    from .spectral import hermitian_eigenvalues

    p = cfg.params
    spec = _law_spec(p)
    if spec is None:
        raise ConfigurationError("kernel-scan needs an independent-entry law")
    n, a, u = p["N"], p["a"], p["u"]
    w = sample_wigner(spec, n, RngSeed(p["seed"], 0))
    h = type(w)(n=n, entries=w.entries / np.sqrt(n), seed=w.seed)
    y = hermitian_eigenvalues(h).values

    step, tmax = p["tau.step"], p["tau.max"]
    k = int(np.floor(tmax / step + 1e-9))
    taus = np.array([j * step for j in range(-k, k + 1)])
    ctx = KernelContext(u, a, y, base_panels=p["panels"] or None)
    kv = ctx.scan(taus)
    sv = sine_kernel(taus)
    err = np.abs(kv - sv)

    outputs = []
    csv_path = cfg.out_dir / "kernel-scan.csv"
    rows = [(t, x, s, e, n, a, u, p["seed"])
            for t, x, s, e in zip(taus, kv, sv, err)]
    _write_csv(csv_path, ["tau", "kernel_value", "sine_value", "abs_error",
                          "N", "a", "u", "seed"], rows)
    outputs.append(csv_path)
    svg = cfg.out_dir / "kernel-scan.svg"
    curve_overlay(svg, taus,
                  [("rescaled kernel", kv, "marker"),
                   ("sine kernel", sv, "line")],
                  title=f"bulk kernel vs sine kernel, N={n}, u={u}, a={a}",
                  xlabel="tau", ylabel="kernel")
    outputs.append(svg)
    results = {"sup_abs_error": float(err.max()), "points": int(taus.size),
               "quadrature": ctx.last_diagnostics}
    return results, outputs


def _run_spacing_mc(cfg):
    from .plots import errorbar_overlay

    from .spacing import mc_expected_spacing

    p = cfg.params
    spec = _law_spec(p)
    out = mc_expected_spacing(spec, p["a"], p["N"], p["trials"],
                              np.asarray(p["s.grid"], dtype=float), p["u"],
                              p["seed"], t_n=p["t_n"] or None)
    outputs = []
    csv_path = cfg.out_dir / "spacing-mc.csv"
    rows = list(zip(out["s"], out["mc_mean"], out["mc_se"], out["gaudin_cdf"],
                    out["gap"]))
    _write_csv(csv_path, ["s", "mc_mean", "mc_se", "gaudin_cdf", "gap"], rows)
    outputs.append(csv_path)
    svg = cfg.out_dir / "spacing-mc.svg"
    errorbar_overlay(svg, out["s"], out["mc_mean"], 2.0 * out["mc_se"],
                     out["s"], out["gaudin_cdf"],
                     title=(f"windowed spacing CDF, N={p['N']}, "
                            f"{p['trials']} trials"),
                     xlabel="s", ylabel="expected spacing statistic")
    outputs.append(svg)
    results = {
        "max_abs_gap": float(np.max(np.abs(out["gap"]))),
        "t_n": int(out["t_n"]),
        "rho_u": float(out["rho_u"]),
        "trials": int(out["trials"]),
    }
    return results, outputs


def _run_fredholm(cfg):
    from .fredholm import gap_probability_H, gaudin_density, spacing_cdf
    from .plots import curve_overlay

    p = cfg.params
    step, smax = p["s.step"], p["s.max"]
    k = int(np.floor(smax / step + 1e-9))
    svals = np.array([j * step for j in range(k + 1)])
    H = np.array([gap_probability_H(s) for s in svals])
    cdf = np.array([spacing_cdf(s) for s in svals])
    dens = np.array([gaudin_density(s) for s in svals])
    hprime = cdf - 1.0

    outputs = []
    csv_path = cfg.out_dir / "fredholm.csv"
    rows = list(zip(svals, H, hprime, dens, cdf))
    _write_csv(csv_path, ["s", "H", "Hprime", "p", "cdf"], rows)
    outputs.append(csv_path)
    svg = cfg.out_dir / "fredholm.svg"
    curve_overlay(svg, svals,
                  [("gap probability H", H, "line"),
                   ("spacing density p", dens, "line"),
                   ("spacing CDF", cdf, "line")],
                  title="sine-process gap functional and spacing law",
                  xlabel="s")
    outputs.append(svg)
    results = {"s_max": smax, "H_at_smax": float(H[-1]),
               "density_mass_on_grid": float(np.trapezoid(dens, svals))}
    return results, outputs


def _run_km_check(cfg):
    from .paths import PathConfig, km_conditional_density, km_limit_density_qS
    from .plots import curve_overlay

    p = cfg.params
    y = np.asarray(p["y"], dtype=float)
    n = y.size
    if n > 2:
        # grid is a full n-dimensional product; keep it at pairs
        raise ConfigurationError("km-check grids are built for 2 paths")
    span, gp = p["span"], p["grid.points"]
    axis = np.linspace(-span, span, gp)
    grid = [np.array([x1, x2]) for x1 in axis for x2 in axis if x1 < x2]
    q_lim = np.array([km_limit_density_qS(x, y, p["S"]) for x in grid])

    rows = []
    sups = []
    for T in p["T.grid"]:
        cfg_T = PathConfig(y=y, S=p["S"], T=float(T))
        q_T = np.array([km_conditional_density(x, cfg_T) for x in grid])
        sup = float(np.max(np.abs(q_T - q_lim)))
        rows.append((float(T), sup))
        sups.append(sup)

    outputs = []
    csv_path = cfg.out_dir / "km-check.csv"
    _write_csv(csv_path, ["T", "sup_pointwise_gap"], rows)
    outputs.append(csv_path)
    svg = cfg.out_dir / "km-check.svg"
    curve_overlay(svg, [r[0] for r in rows],
                  [("sup pointwise gap", np.array(sups), "marker")],
                  title="endpoint-release convergence of the bridge density",
                  xlabel="T", ylabel="sup gap", logx=True, logy=True)
    outputs.append(svg)
    results = {"monotone_decreasing": bool(np.all(np.diff(sups) < 0)),
               "final_gap": sups[-1], "grid_points": len(grid)}
    return results, outputs


def _run_dyson(cfg):
    from .paths import dyson_ensemble, eigen_density_rhoN
    from .plots import histogram_overlay

    p = cfg.params
    y = np.asarray(p["y"], dtype=float)
    n = y.size
    dt = p["dt"]
    if dt <= 0:
        gaps = np.diff(np.sort(y))
        gmin = float(gaps.min()) if gaps.size else 1.0
        dt = 0.99e-4 * gmin * gmin
    term = dyson_ensemble(y, p["t"], dt, p["seed"], p["paths"])

    outputs = []
    csv_path = cfg.out_dir / "dyson.csv"
    header = ["path"] + [f"lambda_{j + 1}" for j in range(n)]
    rows = [(i, *term[i]) for i in range(term.shape[0])]
    _write_csv(csv_path, header, rows)
    outputs.append(csv_path)

    svg = cfg.out_dir / "dyson.svg"
    pooled = term.ravel()
    lo, hi = float(pooled.min()), float(pooled.max())
    pad = 0.05 * (hi - lo)
    overlay_x = overlay_y = None
    label = ""
    if n == 2:
        # pooled one-point marginal of the interacting density at time t
        xs = np.linspace(lo - pad, hi + pad, 200)
        other = np.linspace(lo - pad - 4, hi + pad + 4, 400)
        dens = np.empty_like(xs)
        for i, xv in enumerate(xs):
            vals = [eigen_density_rhoN(np.array([min(xv, o), max(xv, o)]),
                                       np.sort(y), np.sqrt(p["t"] * n), n)
                    for o in other]
            # pooled histogram mixes both coordinates, halve the sector mass
            dens[i] = 0.5 * np.trapezoid(vals, other)
        overlay_x, overlay_y, label = xs, dens, "interacting-density marginal"
    histogram_overlay(svg, pooled, 60, lo - pad, hi + pad, overlay_x=overlay_x,
                      overlay_y=overlay_y, overlay_label=label,
                      title=f"terminal values, {p['paths']} paths, t={p['t']}",
                      xlabel="coordinate")
    outputs.append(svg)
    results = {"paths": int(term.shape[0]), "dt": float(dt),
               "terminal_mean": float(term.mean())}
    return results, outputs


def _run_prop11(cfg):
    from .ensembles import RngSeed, sample_gue
    from .paths import eigen_density_rhoN
    from .plots import curve_overlay

    p = cfg.params
    y = np.sort(np.asarray(p["y"], dtype=float))
    if y.size != 2:
        raise ConfigurationError("the sampling cross-check is built for N=2")
    a, m = p["a"], p["samples"]
    scale = a / np.sqrt(2.0)

    # eigenvalues of diag(y) + scale * V for 2x2 Hermitian V, closed form
    rng = RngSeed(p["seed"], 0).generator()
    re = rng.normal(0.0, np.sqrt(0.5), size=m)
    im = rng.normal(0.0, np.sqrt(0.5), size=m)
    d = rng.normal(0.0, 1.0, size=(m, 2))
    a11 = y[0] + scale * d[:, 0]
    a22 = y[1] + scale * d[:, 1]
    off2 = (scale * scale) * (re * re + im * im)
    tr, disc = a11 + a22, np.sqrt((a11 - a22) ** 2 + 4.0 * off2)
    lam_min, lam_max = 0.5 * (tr - disc), 0.5 * (tr + disc)

    # exact marginals by integrating the two-point density over one
    # coordinate; closed form for the pair density keeps this vectorized
    def pair_density(x1, x2):
        s_var = a * a / 2.0
        pref = (x2 - x1) / (y[1] - y[0]) / (2.0 * np.pi * s_var)
        e_dir = np.exp(-((x1 - y[0]) ** 2 + (x2 - y[1]) ** 2) / (2 * s_var))
        e_sw = np.exp(-((x1 - y[1]) ** 2 + (x2 - y[0]) ** 2) / (2 * s_var))
        return pref * (e_dir - e_sw)

    probe = np.array([y[0] - 0.3 * a, y[1] + 0.7 * a])
    ref = eigen_density_rhoN(probe, y, a, 2)
    if abs(pair_density(probe[0], probe[1]) - ref) > 1e-10 * max(ref, 1e-12):
        raise NumericalError("closed-form pair density disagrees with module")

    span = float(np.max(np.abs(y)) + 5.0 * a)
    ts = np.linspace(-span, span, 401)
    wgrid = np.linspace(-span - 3 * a, span + 3 * a, 1601)
    q_tw = pair_density(ts[:, None], wgrid[None, :])
    mask_up = wgrid[None, :] > ts[:, None]
    f_min = np.trapezoid(np.where(mask_up, q_tw, 0.0), wgrid, axis=1)
    q_wt = pair_density(wgrid[None, :], ts[:, None])
    f_max = np.trapezoid(np.where(~mask_up, q_wt, 0.0), wgrid, axis=1)
    dt_grid = ts[1] - ts[0]
    cdf_min_exact = np.concatenate(
        [[0.0], np.cumsum(0.5 * (f_min[1:] + f_min[:-1]) * dt_grid)])
    cdf_max_exact = np.concatenate(
        [[0.0], np.cumsum(0.5 * (f_max[1:] + f_max[:-1]) * dt_grid)])
    cdf_min_emp = np.searchsorted(np.sort(lam_min), ts, side="right") / m
    cdf_max_emp = np.searchsorted(np.sort(lam_max), ts, side="right") / m
    ks_min = float(np.max(np.abs(cdf_min_emp - cdf_min_exact)))
    ks_max = float(np.max(np.abs(cdf_max_emp - cdf_max_exact)))

    outputs = []
    csv_path = cfg.out_dir / "prop11-check.csv"
    rows = list(zip(ts, cdf_min_emp, cdf_min_exact, cdf_max_emp, cdf_max_exact))
    _write_csv(csv_path, ["t", "cdf_min_emp", "cdf_min_exact", "cdf_max_emp",
                          "cdf_max_exact"], rows)
    outputs.append(csv_path)
    svg = cfg.out_dir / "prop11-check.svg"
    curve_overlay(svg, ts,
                  [("lower eigenvalue, sampled", cdf_min_emp, "marker"),
                   ("lower eigenvalue, density", cdf_min_exact, "line"),
                   ("upper eigenvalue, sampled", cdf_max_emp, "marker"),
                   ("upper eigenvalue, density", cdf_max_exact, "line")],
                  title="sampled eigenvalue CDFs vs the closed-form density",
                  xlabel="t", ylabel="CDF")
    outputs.append(svg)
    results = {"ks_min": ks_min, "ks_max": ks_max, "samples": m}
    return results, outputs


def _run_prop22(cfg):
    from .kernel import fredholm_ratio_check
    from .plots import curve_overlay

    qp = cfg.params["quad.points"]
    tests = [
        ("half_shift", lambda t: 0.5 * np.ones_like(t)),
        ("linear_bump", lambda t: 0.3 * t),
        ("cosine", lambda t: 0.25 * np.cos(3.0 * t)),
    ]
    rows = []
    gaps = []
    for n_dim in (2, 3):
        for name, g in tests:
            out = fredholm_ratio_check(n_dim, g, quad_points=qp)
            rows.append((n_dim, name, out["lhs"], out["rhs"], out["gap"],
                         out["r1_max_gap"]))
            gaps.append(out["gap"])

    outputs = []
    csv_path = cfg.out_dir / "prop22-check.csv"
    lines = [",".join(["n", "g_label", "lhs", "rhs", "gap", "r1_max_gap"])]
    for n_dim, name, lhs, rhs, gap, r1 in rows:
        lines.append(",".join([str(n_dim), name, _fmt(lhs), _fmt(rhs),
                               _fmt(gap), _fmt(r1)]))
    csv_path.write_text("\n".join(lines) + "\n")
    outputs.append(csv_path)
    svg = cfg.out_dir / "prop22-check.svg"
    curve_overlay(svg, np.arange(len(rows)),
                  [("brute force vs finite-rank gap",
                    np.maximum(np.array(gaps), 1e-18), "marker")],
                  title="determinant-ratio identity across test perturbations",
                  xlabel="case index", ylabel="abs gap", logy=True)
    outputs.append(svg)
    results = {"max_gap": float(max(gaps)), "cases": len(rows)}
    return results, outputs


_HANDLERS = {
    "sample": _run_sample,
    "spectrum": _run_spectrum,
    "kernel-scan": _run_kernel_scan,
    "spacing-mc": _run_spacing_mc,
    "fredholm": _run_fredholm,
    "km-check": _run_km_check,
    "dyson": _run_dyson,
    "prop11-check": _run_prop11,
    "prop22-check": _run_prop22,
}


def run(cfg: ExperimentConfig) -> dict:
    """Execute one configured experiment and write its artifact bundle."""
    cfg.out_dir.mkdir(parents=True, exist_ok=True)
    results, outputs = _HANDLERS[cfg.command](cfg)
    summary_path = _write_summary(cfg, results, outputs)
    summary = json.loads(summary_path.read_text())
    summary["summary_path"] = str(summary_path)
    return summary


# ---------------------------------------------------------------------------
# argument parsing


def _parse_config_file(path: str) -> dict:
    p = Path(path)
    if not p.is_file():
        raise ConfigurationError(f"config file not found: {path}")
    out = {}
    for lineno, line in enumerate(p.read_text().splitlines(), start=1):
        s = line.strip()
        if not s or s.startswith("#"):
            continue
        if "=" not in s:
            raise ConfigurationError(
                f"{path}:{lineno}: expected key=value, got {s!r}")
        key, _, val = s.partition("=")
        out[key.strip()] = val.strip()
    return out


_DESCRIPTIONS = {
    "sample": "draw one matrix from an independent-entry ensemble",
    "spectrum": "pool eigenvalue spectra and compare to the limiting density",
    "kernel-scan": "evaluate the rescaled bulk kernel against the sine kernel",
    "spacing-mc": "Monte Carlo windowed spacing CDF vs the sine-process law",
    "fredholm": "tabulate the gap functional and spacing density",
    "km-check": "bridge density convergence as the far endpoint is released",
    "dyson": "integrate the interacting eigenvalue diffusion",
    "prop11-check": "sampled rank-full deformation vs the closed-form density",
    "prop22-check": "determinant-ratio identity for finite-rank perturbations",
}

# dedicated flags per subcommand: flag -> (schema key, is_switch)
_FLAGS = {
    "sample": {"--law": ("law.kind", False), "--skew": ("law.skew", False),
               "--N": ("N", False), "--a": ("a", False),
               "--seed": ("seed", False), "--stream": ("stream", False),
               "--deformed": ("deformed", True), "--csv": ("csv", True)},
    "spectrum": {"--law": ("law.kind", False), "--skew": ("law.skew", False),
                 "--N": ("N", False), "--a": ("a", False),
                 "--trials": ("trials", False), "--seed": ("seed", False),
                 "--bins": ("bins", False)},
    "kernel-scan": {"--law": ("law.kind", False), "--skew": ("law.skew", False),
                    "--N": ("N", False), "--a": ("a", False),
                    "--u": ("u", False), "--seed": ("seed", False),
                    "--tau-max": ("tau.max", False),
                    "--tau-step": ("tau.step", False),
                    "--panels": ("panels", False)},
    "spacing-mc": {"--law": ("law.kind", False), "--skew": ("law.skew", False),
                   "--N": ("N", False), "--a": ("a", False),
                   "--u": ("u", False), "--trials": ("trials", False),
                   "--t-n": ("t_n", False), "--seed": ("seed", False),
                   "--s-grid": ("s.grid", False)},
    "fredholm": {"--smax": ("s.max", False), "--step": ("s.step", False),
                 "--nodes": ("nodes", False)},
    "km-check": {"--y": ("y", False), "--S": ("S", False),
                 "--T-grid": ("T.grid", False), "--span": ("span", False),
                 "--grid-points": ("grid.points", False)},
    "dyson": {"--y": ("y", False), "--t": ("t", False), "--dt": ("dt", False),
              "--paths": ("paths", False), "--seed": ("seed", False)},
    "prop11-check": {"--y": ("y", False), "--a": ("a", False),
                     "--samples": ("samples", False),
                     "--seed": ("seed", False)},
    "prop22-check": {"--quad-points": ("quad.points", False)},
}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="rmtlab",
        description="numerical laboratory for deformed-ensemble spectral laws")
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)
    for name in _HANDLERS:
        sp = sub.add_parser(name, help=_DESCRIPTIONS[name])
        for flag, (key, is_switch) in _FLAGS[name].items():
            dest = "key_" + key
            if is_switch:
                sp.add_argument(flag, dest=dest, action="store_const",
                                const="true", default=None,
                                help=f"set {key}=true")
            else:
                sp.add_argument(flag, dest=dest, metavar="VAL", default=None,
                                help=f"set config key {key}")
        sp.add_argument("--config", help="key=value config file")
        sp.add_argument("--set", action="append", default=[], metavar="KEY=VAL",
                        help="override one config key (repeatable)")
        sp.add_argument("--out-dir",
                        help=f"output directory (default: ${OUT_DIR_ENV} or .)")
        sp.add_argument("--threads", type=int,
                        help="cap BLAS/LAPACK thread pools")
        sp.add_argument("--replay", metavar="SUMMARY_JSON",
                        help="re-run from a previous JSON summary")
    return ap


def _limit_threads(k: int) -> None:
    if k < 1:
        raise ConfigurationError("--threads must be at least 1")
    try:
        import threadpoolctl

        threadpoolctl.threadpool_limits(limits=k)
    except ImportError:
        # best effort: affects libraries that re-read env at pool spin-up
        for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS",
                    "MKL_NUM_THREADS"):
            os.environ[var] = str(k)


def _resolve(args) -> ExperimentConfig:
    params = {}
    if args.replay:
        rp = Path(args.replay)
        if not rp.is_file():
            raise ConfigurationError(f"summary file not found: {args.replay}")
        try:
            summary = json.loads(rp.read_text())
        except json.JSONDecodeError as exc:
            raise ConfigurationError(f"summary is not valid JSON: {exc}")
        if summary.get("command") != args.command:
            raise ConfigurationError(
                f"summary records command {summary.get('command')!r}, "
                f"not {args.command!r}")
        params.update(summary.get("params", {}))
    if args.config:
        params.update(_parse_config_file(args.config))
    for item in args.set:
        if "=" not in item:
            raise ConfigurationError(f"--set expects KEY=VAL, got {item!r}")
        key, _, val = item.partition("=")
        params[key.strip()] = val.strip()
    for key, _ in _FLAGS[args.command].values():
        val = getattr(args, "key_" + key)
        if val is not None:
            params[key] = val
    out_dir = args.out_dir or os.environ.get(OUT_DIR_ENV) or "."
    return ExperimentConfig(command=args.command, params=params,
                            out_dir=Path(out_dir))


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.threads is not None:
            _limit_threads(args.threads)
        cfg = _resolve(args)
        summary = run(cfg)
    except ConfigurationError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except AccuracyError as exc:
        print(json.dumps({"error": str(exc), "diagnostics": exc.diagnostics},
                         sort_keys=True), file=sys.stderr)
        return 3
    except (NumericalError, RmtError) as exc:
        print(json.dumps({"error": str(exc),
                          "type": type(exc).__name__}, sort_keys=True),
              file=sys.stderr)
        return 3
    print(json.dumps({"command": summary["command"],
                      "config_sha256": summary["config_sha256"],
                      "results": summary["results"],
                      "outputs": summary["outputs"]},
                     sort_keys=True, indent=2))
    return 0


if __name__ == "__main__":
    sys.exit(main())
