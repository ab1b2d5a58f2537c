"""Entropy curves over prediction-error parameters, and a Monte Carlo cross-check.

``sweep_p`` varies the switch-error probability with exact prediction
otherwise; ``sweep_sigma`` varies Gaussian prediction noise for a set of fixed
switch probabilities. Both evaluate the ideal quantities exactly on the
uniform 8-bit (more generally {0..N}) source.
"""
from __future__ import annotations

import csv
import io
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from condcoding import kernels
from condcoding.channels import (
    GaussianSpec,
    QuantizerSpec,
    SwitchSpec,
    mixture_channel,
    uniform_quantizer,
)
from condcoding.identities import TOL, conditional_mi_direct
from condcoding.prob import (
    DeterministicMap,
    InvalidArgumentError,
    Joint2,
    Pmf,
    apply_map_to_col,
    conditional_entropy_row_given_col,
    entropy,
    joint_from_channel,
    marginal_row,
    mutual_information,
    pmf_uniform,
    residual_joint,
)


def frange(start: float, stop: float, step: float) -> tuple:
    """Inclusive arithmetic grid, snapped to 12 decimals."""
    if not step > 0:
        raise InvalidArgumentError(f"grid step must be > 0, got {step}")
    if stop < start:
        raise InvalidArgumentError(f"grid stop {stop} below start {start}")
    n = int(math.floor((stop - start) / step + 1e-9))
    return tuple(round(start + k * step, 12) for k in range(n + 1))


DEFAULT_P_GRID = frange(0.0, 1.0, 0.01)
DEFAULT_SIGMA_GRID = frange(0.0, 20.0, 0.5)
DEFAULT_SIGMA_P_VALUES = (0.0, 0.1, 0.2, 0.4)


@dataclass(frozen=True)
class SweepConfig:
    variable: str = "p"
    grid: tuple = DEFAULT_P_GRID
    N: int = 255
    w: int = 0
    sigma_p: float = 0.0
    p_values: tuple = DEFAULT_SIGMA_P_VALUES
    bottlenecks: tuple = (7, 6)
    boundary_mode: str = "clip"

    def __post_init__(self):
        object.__setattr__(self, "grid", tuple(float(g) for g in self.grid))
        object.__setattr__(self, "p_values", tuple(float(p) for p in self.p_values))
        object.__setattr__(self, "bottlenecks", tuple(int(b) for b in self.bottlenecks))
        if self.variable not in ("p", "sigma_p"):
            raise InvalidArgumentError(f"unknown sweep variable {self.variable!r}")
        if not self.grid:
            raise InvalidArgumentError("sweep grid is empty")
        if any(b <= a for a, b in zip(self.grid, self.grid[1:])):
            raise InvalidArgumentError("sweep grid must be strictly increasing")
        if self.variable == "p":
            if self.grid[0] < 0.0 or self.grid[-1] > 1.0:
                raise InvalidArgumentError("p grid must lie in [0, 1]")
            if self.sigma_p != 0.0:
                raise InvalidArgumentError("p sweep runs with sigma_p fixed at 0")
        else:
            if self.grid[0] < 0 or not all(math.isfinite(g) for g in self.grid):
                raise InvalidArgumentError("sigma_p grid must be finite and >= 0")
            if not self.p_values:
                raise InvalidArgumentError("sigma_p sweep needs at least one p value")
            for p in self.p_values:
                SwitchSpec(self.N, p, 0)
        SwitchSpec(self.N, 0.0, self.w)
        GaussianSpec(self.N, 0.0, self.boundary_mode)
        if self.bottlenecks:
            bits = math.log2(self.N + 1)
            if bits != int(bits):
                raise InvalidArgumentError(
                    f"bottlenecks need N + 1 to be a power of two, got N={self.N}"
                )
            for b in self.bottlenecks:
                QuantizerSpec(b, int(bits))


@dataclass
class CurveTable:
    variable: str
    columns: tuple
    rows: list = field(default_factory=list)

    def column(self, name: str) -> np.ndarray:
        k = self.columns.index(name)
        return np.array([row[k] for row in self.rows])

    def select(self, **fixed) -> "CurveTable":
        """Rows whose named columns equal the given values."""
        idx = [(self.columns.index(k), v) for k, v in fixed.items()]
        rows = [r for r in self.rows if all(r[k] == v for k, v in idx)]
        return CurveTable(self.variable, self.columns, rows)


def bottleneck_column(b: int) -> str:
    return f"h_cond_{b}"


def evaluate_point(N: int, p: float, sigma_p: float, w: int = 0, bottlenecks=(),
                   boundary_mode: str = "clip") -> dict:
    """Exact H(r), H(x|x_p) and H(x|f_b(x_p)) for one model instance.

    Both identities are re-checked on the way; a residual above 1e-9 raises
    ``ArithmeticError``.
    """
    channel = mixture_channel(SwitchSpec(N, p, w), GaussianSpec(N, sigma_p, boundary_mode))
    j = joint_from_channel(pmf_uniform(N + 1), channel)
    rj = residual_joint(j)
    h_r = entropy(marginal_row(rj))
    h_c = conditional_entropy_row_given_col(j)
    mi = mutual_information(rj)
    if abs(h_r - h_c - mi) > TOL:
        raise ArithmeticError(f"residual identity off by {abs(h_r - h_c - mi):.3g} at p={p}, sigma={sigma_p}")
    out = {"h_residual": h_r, "h_cond": h_c}
    in_bits = int(round(math.log2(N + 1)))
    for b in bottlenecks:
        f = uniform_quantizer(QuantizerSpec(b, in_bits))
        h_ct = conditional_entropy_row_given_col(apply_map_to_col(j, f))
        cmi = conditional_mi_direct(j, f)
        if abs(h_r - (h_ct - cmi + mi)) > TOL:
            raise ArithmeticError(f"bottleneck identity violated at p={p}, sigma={sigma_p}, b={b}")
        out[bottleneck_column(b)] = h_ct
    return out


def _run(points, fn, workers):
    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            return list(ex.map(fn, points))
    return [fn(pt) for pt in points]


def sweep_p(config: SweepConfig, workers: int | None = None) -> CurveTable:
    if config.variable != "p":
        raise InvalidArgumentError("sweep_p needs a config with variable='p'")
    quantities = ("h_residual", "h_cond") + tuple(map(bottleneck_column, config.bottlenecks))

    def point(p):
        vals = evaluate_point(config.N, p, 0.0, config.w, config.bottlenecks, config.boundary_mode)
        return (p,) + tuple(vals[q] for q in quantities)

    return CurveTable("p", ("p",) + quantities, _run(config.grid, point, workers))


def sweep_sigma(config: SweepConfig, workers: int | None = None) -> CurveTable:
    """Long-format table: one row per (p, sigma_p), grouped by p."""
    if config.variable != "sigma_p":
        raise InvalidArgumentError("sweep_sigma needs a config with variable='sigma_p'")
    quantities = ("h_residual", "h_cond") + tuple(map(bottleneck_column, config.bottlenecks))
    points = [(p, s) for p in config.p_values for s in config.grid]

    def point(ps):
        p, s = ps
        vals = evaluate_point(config.N, p, s, config.w, config.bottlenecks, config.boundary_mode)
        return (p, s) + tuple(vals[q] for q in quantities)

    return CurveTable("sigma_p", ("p", "sigma_p") + quantities, _run(points, point, workers))


def _format(v: float) -> str:
    s = f"{v:.9f}"
    return "0.000000000" if s == "-0.000000000" else s


def write_csv(table: CurveTable, destination) -> None:
    """Write ``table`` as comma-separated text with LF line endings.

    ``destination`` is a path, ``"-"`` for standard output, or a text stream.
    """
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(table.columns)
    for row in table.rows:
        writer.writerow([_format(v) for v in row])
    text = buf.getvalue()
    if destination == "-":
        sys.stdout.write(text)
        sys.stdout.flush()
    elif hasattr(destination, "write"):
        destination.write(text)
    else:
        path = os.fspath(destination)
        try:
            with open(path, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(text)
        except OSError as exc:
            raise OSError(exc.errno, f"cannot write CSV to {path}: {exc.strerror}", path) from exc


# Monte Carlo ---------------------------------------------------------------

@dataclass(frozen=True)
class McEstimate:
    samples: int
    seed: int
    estimates: dict
    exact: dict
    deviations: dict

    def max_deviation(self) -> float:
        return max(self.deviations.values())


def sample_pairs(j: Joint2, samples: int, seed: int):
    """Draw i.i.d. (x, x_p) symbol pairs from a joint.

    Inverse-CDF lookup over the row-major flattened joint, driven by numpy's
    PCG64 bit generator (``numpy.random.default_rng(seed)``), whose stream is
    fixed across platforms and numpy versions.
    """
    if samples < 1:
        raise InvalidArgumentError("samples must be >= 1")
    flat = j.probs.ravel()
    cdf = np.cumsum(flat)
    u = np.random.default_rng(seed).random(samples) * cdf[-1]
    idx = np.searchsorted(cdf, u, side="right")
    last = int(np.flatnonzero(flat)[-1])
    np.minimum(idx, last, out=idx)
    ncol = j.shape[1]
    return idx // ncol + j.row_offset, idx % ncol + j.col_offset


def plugin_entropy(counts) -> float:
    counts = np.asarray(counts, dtype=np.float64).ravel()
    return max(kernels.entropy_bits(counts / counts.sum()), 0.0)


def _plugin_cond_entropy(a, b, na, nb):
    """Plug-in H(a | b) from index arrays."""
    c = kernels.count_pairs(a, b, na, nb)
    return max(plugin_entropy(c) - plugin_entropy(c.sum(axis=0)), 0.0)


def monte_carlo_check(prior: Pmf, channel, f: DeterministicMap | None = None,
                      samples: int = 1_000_000, seed: int = 0) -> McEstimate:
    """Plug-in (maximum-likelihood, no bias correction) estimates vs exact values."""
    j = joint_from_channel(prior, channel)
    x, xp = sample_pairs(j, samples, seed)
    nx, nxp = j.shape
    xi = x - j.row_offset
    xpi = xp - j.col_offset
    r_min = j.row_offset - (j.col_offset + nxp - 1)
    r_counts = np.bincount(x - xp - r_min, minlength=nx + nxp - 1)

    est = {
        "h_residual": plugin_entropy(r_counts),
        "h_cond": _plugin_cond_entropy(xi, xpi, nx, nxp),
    }
    rj = residual_joint(j)
    exact = {
        "h_residual": entropy(marginal_row(rj)),
        "h_cond": conditional_entropy_row_given_col(j),
    }
    if f is not None:
        ti = f.table[xpi] - f.codomain.offset
        est["h_cond_tilde"] = _plugin_cond_entropy(xi, ti, nx, f.codomain.size)
        exact["h_cond_tilde"] = conditional_entropy_row_given_col(apply_map_to_col(j, f))
    dev = {k: abs(est[k] - exact[k]) for k in est}
    return McEstimate(samples, seed, est, exact, dev)
