"""Pathwise variation functionals in time and space.

Series are :class:`~semidiag.paths.SamplePath` objects, read as values on
a uniform grid of positions (times, or start points of a flow). A partition
is an increasing array of grid positions; a ladder is a sequence of
partitions with strictly decreasing mesh.
"""
from __future__ import annotations

import io
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import InvalidArgument
from .flow import FlowField
from .localtime import running_level_functionals
from .paths import SamplePath


@dataclass(frozen=True)
class PartitionLadder:
    """Partitions of a common interval, ordered by strictly decreasing mesh."""

    partitions: tuple

    def __post_init__(self):
        parts = tuple(np.asarray(p, dtype=float) for p in self.partitions)
        if not parts:
            raise InvalidArgument("ladder needs at least one partition")
        ends = {(p[0], p[-1]) for p in parts}
        if len(ends) != 1:
            raise InvalidArgument("all partitions must share their endpoints")
        meshes = [float(np.max(np.diff(p))) for p in parts]
        if any(m2 >= m1 for m1, m2 in zip(meshes, meshes[1:])):
            raise InvalidArgument("meshes must be strictly decreasing")
        object.__setattr__(self, "partitions", parts)

    @classmethod
    def dyadic(cls, start: float, end: float, levels: Sequence[int]) -> "PartitionLadder":
        """Partitions into ``2**k`` equal cells for each ``k`` in ``levels``."""
        return cls(tuple(np.linspace(start, end, 2**k + 1) for k in levels))

    @classmethod
    def from_steps(cls, series: SamplePath, steps: Sequence[int]) -> "PartitionLadder":
        """Every ``m``-th grid position of ``series``, one rung per ``m``."""
        parts = []
        for m in steps:
            if int(m) < 1 or series.n_steps % int(m):
                raise InvalidArgument(f"step {m} does not divide {series.n_steps}")
            parts.append(series.times[:: int(m)])
        return cls(tuple(parts))

    @property
    def meshes(self) -> np.ndarray:
        return np.array([np.max(np.diff(p)) for p in self.partitions])

    def __len__(self):
        return len(self.partitions)

    def __iter__(self):
        return iter(self.partitions)


@dataclass(frozen=True)
class VariationReport:
    """Per-rung values (and optional formula side) with a trend verdict."""

    meshes: np.ndarray
    values: np.ndarray
    formula: np.ndarray | None = None
    verdict: str = "flat"

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("rung,mesh,value" + (",formula" if self.formula is not None else "") + "\n")
        for i, (m, v) in enumerate(zip(self.meshes, self.values)):
            row = f"{i},{m:.17g},{v:.17g}"
            if self.formula is not None:
                row += f",{self.formula[i]:.17g}"
            buf.write(row + "\n")
        buf.write(f"# verdict {self.verdict}\n")
        return buf.getvalue()


def _indices(series: SamplePath, partition) -> np.ndarray:
    pts = np.asarray(partition, dtype=float)
    if pts.ndim != 1 or pts.size < 2:
        raise InvalidArgument("partition needs at least two points")
    k = np.rint((pts - series.t0) / series.dt).astype(np.int64)
    bad = (k < 0) | (k > series.n_steps) | (np.abs(series.t0 + k * series.dt - pts) > 1e-9 * series.dt)
    if np.any(bad):
        raise InvalidArgument(f"partition point {pts[np.argmax(bad)]!r} is not a grid position")
    if np.any(np.diff(k) <= 0):
        raise InvalidArgument("partition must be strictly increasing")
    return k


def increments_along(series: SamplePath, partition) -> np.ndarray:
    return np.diff(series.values[_indices(series, partition)])


def quadratic_variation(series: SamplePath, partition) -> float:
    """``sum (Y_{t_{i+1}} - Y_{t_i})**2`` along the partition."""
    d = increments_along(series, partition)
    return float(np.dot(d, d))


def p_variation_sum(series: SamplePath, p: float, partition) -> float:
    """``sum |Y_{t_{i+1}} - Y_{t_i}|**p`` along the partition (``p >= 1``)."""
    if not p >= 1:
        raise InvalidArgument(f"p must be >= 1, got {p!r}")
    d = np.abs(increments_along(series, partition))
    return float(np.sum(d**p))


def total_variation(series: SamplePath) -> float:
    """Sum of absolute increments on the full grid of ``series``.

    This is a lower estimate of the true total variation, at resolution
    ``series.dt``.
    """
    return float(np.abs(np.diff(series.values)).sum())


def trend_verdict(values, grow: float = 1.0, shrink: float = 1.0) -> str:
    """``increasing`` if every rung-to-rung ratio is ``>= grow`` (and above 1),
    ``decreasing`` if every ratio is ``<= shrink`` (and the last rung is below
    the first), else ``flat``."""
    v = np.asarray(values, dtype=float)
    if v.size < 2:
        return "flat"
    with np.errstate(divide="ignore", invalid="ignore"):
        r = np.where(v[:-1] > 0, v[1:] / v[:-1], np.where(v[1:] > 0, np.inf, 1.0))
    if np.all(r >= grow) and np.all(r > 1.0):
        return "increasing"
    if np.all(r <= shrink) and v[-1] < v[0]:
        return "decreasing"
    return "flat"


def growth_ratios(values) -> np.ndarray:
    """Rung-to-rung ratios, with ``0/0`` read as 1 (no growth)."""
    v = np.asarray(values, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(v[:-1] > 0, v[1:] / v[:-1], np.where(v[1:] > 0, np.inf, 1.0))


def ladder_report(series: SamplePath, p: float, ladder: PartitionLadder,
                  grow: float = 1.0, shrink: float = 1.0) -> VariationReport:
    vals = np.array([p_variation_sum(series, p, part) for part in ladder])
    return VariationReport(ladder.meshes, vals, None, trend_verdict(vals, grow, shrink))


def space_series(field: FlowField, table: str, t: float | None = None) -> SamplePath:
    """``x -> table[t](x)`` as a series over a uniform x-grid."""
    x = field.x_grid
    dx = np.diff(x)
    if x.size < 2 or np.any(np.abs(dx - dx[0]) > 1e-9 * abs(dx[0])):
        raise InvalidArgument("space series need a uniform x-grid")
    i = field.D.shape[0] - 1 if t is None else field.slice_at(t)
    tab = getattr(field, table)
    if tab is None:
        raise InvalidArgument(f"field has no {table} table")
    return SamplePath(x[0], (x[-1] - x[0]) / (x.size - 1), tab[i])


def _cell_formula(field: FlowField, series: SamplePath, partition) -> tuple[np.ndarray, np.ndarray]:
    if field.sweep is None:
        raise InvalidArgument("field carries no swept-jump table")
    k = _indices(series, partition)
    return k, np.add.reduceat(field.sweep[: k[-1]], k[:-1])


def space_qv_Z(field: FlowField, a: float, b: float, partition=None) -> tuple[float, float]:
    """Empirical QV of ``x -> Z_T(x)`` on ``[a, b]`` and the swept-jump formula.

    The formula side is ``int_0^T sum_z (Delta sigma'(z))**2 1{D_s(a) <= z < D_s(b)} ds``
    accumulated during simulation (trapezoid in time). ``T`` is the last
    recorded time. With ``partition=None`` every grid point in ``[a, b]``
    is used.
    """
    Z = space_series(field, "Z")
    if partition is None:
        partition = Z.times[(Z.times >= a - 1e-12) & (Z.times <= b + 1e-12)]
    k, cells = _cell_formula(field, Z, partition)
    if not (np.isclose(Z.times[k[0]], a) and np.isclose(Z.times[k[-1]], b)):
        raise InvalidArgument("partition must run from a to b")
    return quadratic_variation(Z, partition), float(cells.sum())


def space_qv_formula(field: FlowField, a: float, b: float) -> float:
    """Formula side of :func:`space_qv_Z` alone; additive over adjacent intervals."""
    return space_qv_Z(field, a, b)[1]


def space_qv_Dprime(field: FlowField, a: float, b: float, ladder: PartitionLadder,
                    coefficient: float = 1.0) -> VariationReport:
    """QV of ``x -> D'_T(x)`` against ``coefficient * int (D'_T)**2 <Z_T>(dx)``.

    ``<Z_T>(dx)`` is the swept-jump measure of each partition cell and
    ``D'`` is taken at the left end of the cell. The chain rule for
    ``D' = exp(Z - <Z>/2)`` gives ``coefficient = 1``; other values are
    accepted to compare alternative normalizations.
    """
    Dp = space_series(field, "Dprime")
    emp, form = [], []
    for part in ladder:
        k, cells = _cell_formula(field, Dp, part)
        emp.append(quadratic_variation(Dp, part))
        form.append(float(coefficient * np.sum(Dp.values[k[:-1]] ** 2 * cells)))
    emp = np.asarray(emp)
    return VariationReport(ladder.meshes, emp, np.asarray(form), trend_verdict(emp))


def space_qv_chain_check(series: SamplePath, h: Callable, hprime: Callable,
                         ladder: PartitionLadder) -> VariationReport:
    """QV of ``h(X)`` against ``sum h'(X_left)**2 (Delta X)**2`` per rung."""
    hx = SamplePath(series.t0, series.dt, np.asarray(h(series.values), dtype=float))
    emp, form = [], []
    for part in ladder:
        k = _indices(series, part)
        d = np.diff(series.values[k])
        emp.append(quadratic_variation(hx, part))
        form.append(float(np.sum(np.asarray(hprime(series.values[k[:-1]])) ** 2 * d * d)))
    emp = np.asarray(emp)
    return VariationReport(ladder.meshes, emp, np.asarray(form), trend_verdict(emp))


def rogers_process(path: SamplePath) -> SamplePath:
    """``X_t = A(t, B_t) - int_0^t L_s^{B_s} dB_s`` on the grid of ``path``.

    ``A(t, x)`` is the exact occupation time below ``x`` of the linearly
    interpolated path and ``L_s^{B_s}`` the Tanaka local time at the
    running level; the stochastic integral uses left points.
    """
    A, L = running_level_functionals(path)
    dB = np.diff(path.values)
    integral = np.concatenate(([0.0], np.cumsum(L[:-1] * dB)))
    return SamplePath(path.t0, path.dt, A - integral)


def rogers_pvariation(paths: Sequence[SamplePath], p_list: Sequence[float], ladder: PartitionLadder,
                      grow: float = 1.2, shrink: float = 1.0) -> dict:
    """Per ``p``, the list of per-path ladder reports for the Rogers process."""
    xs = [rogers_process(path) for path in paths]
    return {float(p): [ladder_report(x, p, ladder, grow, shrink) for x in xs] for p in p_list}


@dataclass(frozen=True)
class MeshProbe:
    meshes: np.ndarray
    hypothesis: np.ndarray
    conclusion: np.ndarray


def mesh_condition_probe(phi: Callable, driver: SamplePath, steps: Sequence[int]) -> MeshProbe:
    """Hypothesis and conclusion sides of the small-mesh condition per rung.

    For a partition ``pi`` with cells ``[t_i, t_{i+1})`` and ``pi(u) = t_i``
    on the cell, returns ``int phi(u, pi(u))**2 du`` (left Riemann sum on
    the driver grid) and ``sum_i (int_{t_i}^{t_{i+1}} phi(u, t_i) dB_u)**2``
    (left-point Ito sums). ``phi`` takes arrays ``(u, anchor)``.
    """
    u = driver.times[:-1]
    dB = driver.increments()
    n = driver.n_steps
    hyp, con, meshes = [], [], []
    for m in steps:
        m = int(m)
        if m < 1 or n % m:
            raise InvalidArgument(f"step {m} does not divide {n}")
        anchor = driver.times[(np.arange(n) // m) * m]
        f = np.asarray(phi(u, anchor), dtype=float) * np.ones(n)
        hyp.append(float(np.sum(f * f) * driver.dt))
        cell = np.add.reduceat(f * dB, np.arange(0, n, m))
        con.append(float(np.dot(cell, cell)))
        meshes.append(m * driver.dt)
    return MeshProbe(np.asarray(meshes), np.asarray(hyp), np.asarray(con))
