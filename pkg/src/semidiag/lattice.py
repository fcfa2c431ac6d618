"""Embedded random walks, visit counts and level-crossing counts.

Lattice sites are stored as integers ``r`` with ``site = origin + r * delta``
so that counting never depends on floating-point equality of site values.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Callable

import numba
import numpy as np

from .errors import InvalidArgument
from .paths import SamplePath


@dataclass(frozen=True)
class LatticeWalk:
    """The walk ``S_k = path(tau_k)`` snapped to ``origin + delta * Z``.

    ``tau[0]`` is the first time the path meets the lattice; ``tau[k + 1]``
    is the first grid time after ``tau[k]`` at which the path is at
    distance ``>= delta`` from the site ``S_k``.
    """

    delta: float
    origin: float
    tau: np.ndarray
    sites: np.ndarray

    @property
    def n_steps(self) -> int:
        return max(len(self.sites) - 1, 0)

    @property
    def s_values(self) -> np.ndarray:
        return self.origin + self.sites * self.delta

    @property
    def exit_times(self) -> np.ndarray:
        """``tau_1, tau_2, ...`` without the initial lattice contact."""
        return self.tau[1:]

    @property
    def exit_values(self) -> np.ndarray:
        """``S_1, S_2, ...`` as lattice values."""
        return self.s_values[1:]

    def site_value(self, r):
        return self.origin + np.asarray(r) * self.delta


@dataclass(frozen=True)
class VisitCounts:
    """``counts[r]`` = number of walk indices ``k`` with ``tau_k < cutoff`` and ``S_k`` at site ``r``."""

    delta: float
    origin: float
    counts: dict = field(default_factory=dict)

    @property
    def total(self) -> int:
        return sum(self.counts.values())

    def __getitem__(self, r: int) -> int:
        return self.counts.get(int(r), 0)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["site_index", "site", "count"])
        for r in sorted(self.counts):
            w.writerow([r, f"{self.origin + r * self.delta:.17g}", self.counts[r]])
        return buf.getvalue()


@dataclass(frozen=True)
class CrossingCounts:
    """Hit-then-exit cycle counts at level ``x`` with exit distance ``delta``.

    ``ell`` counts cycles whose hit of ``x`` happened by the cutoff and
    ``ell_plus`` those among them that approached ``x`` from above. For the
    bridge-corrected estimator both are conditional expectations (floats).
    """

    x: float
    delta: float
    ell: float
    ell_plus: float

    def to_csv(self) -> str:
        return (
            "site_index,site,count\n"
            f"0,{self.x:.17g},{self.ell}\n"
        )


@numba.njit(cache=True)
def _embed_kernel(v, delta, origin):
    n = v.shape[0]
    tau = np.empty(n, np.int64)
    sites = np.empty(n, np.int64)
    # first lattice contact: exact hit or a change of lattice cell
    start = -1
    r0 = 0
    u0 = (v[0] - origin) / delta
    f0 = math.floor(u0)
    if origin + f0 * delta == v[0]:
        start = 0
        r0 = int(f0)
    else:
        for i in range(1, n):
            fi = math.floor((v[i] - origin) / delta)
            if origin + fi * delta == v[i]:
                start = i
                r0 = int(fi)
                break
            if fi != f0:
                start = i
                # the crossed boundary is the cell edge between the two samples
                r0 = int(max(fi, f0))
                break
    if start < 0:
        return tau[:0], sites[:0]
    m = 0
    tau[0] = start
    sites[0] = r0
    r = r0
    up = origin + (r + 1) * delta
    dn = origin + (r - 1) * delta
    for i in range(start + 1, n):
        x = v[i]
        if x >= up:
            r += 1
        elif x <= dn:
            r -= 1
        else:
            continue
        m += 1
        tau[m] = i
        sites[m] = r
        up = origin + (r + 1) * delta
        dn = origin + (r - 1) * delta
    return tau[: m + 1], sites[: m + 1]


def embed_walk(path: SamplePath, delta: float, origin: float = 0.0) -> LatticeWalk:
    """Embedded random walk of ``path`` on the lattice ``origin + delta * Z``.

    Exits are detected at the first grid sample whose distance from the
    current site is at least ``delta``; the overshoot only decides the
    direction. A path that never meets the lattice gives an empty walk.
    """
    if not delta > 0:
        raise InvalidArgument(f"delta must be positive, got {delta!r}")
    if len(path) < 2:
        raise InvalidArgument("path needs at least two samples")
    idx, sites = _embed_kernel(np.asarray(path.values), float(delta), float(origin))
    tau = path.t0 + idx * path.dt
    return LatticeWalk(float(delta), float(origin), tau, sites.copy())


def visit_counts(walk: LatticeWalk, cutoff: float) -> VisitCounts:
    """Number of visits of the walk to each site strictly before ``cutoff``."""
    mask = walk.tau < cutoff
    r, c = np.unique(walk.sites[mask], return_counts=True)
    return VisitCounts(walk.delta, walk.origin, {int(a): int(b) for a, b in zip(r, c)})


def _lattice_F(F: Callable, walk: LatticeWalk, n: int):
    if not 0 <= n <= walk.n_steps:
        raise InvalidArgument(f"n={n} outside 0..{walk.n_steps}")
    r = walk.sites[:n]
    f0 = np.asarray(F(walk.site_value(r)), dtype=float)
    fp = np.asarray(F(walk.site_value(r + 1)), dtype=float)
    fm = np.asarray(F(walk.site_value(r - 1)), dtype=float)
    return r, f0, fp, fm


def discrete_ito(F: Callable, walk: LatticeWalk, n: int) -> tuple[float, float]:
    """Discrete Ito decomposition of ``F(S_n) - F(S_0)``.

    Returns ``(martingale_part, laplacian_part)`` with::

        martingale_part = sum_{k<n} (F(S_k + d) - F(S_k - d)) / (2d) * (S_{k+1} - S_k)
        laplacian_part  = 1/2 sum_{k<n} (F(S_k + d) + F(S_k - d) - 2 F(S_k))

    ``F`` maps an array of lattice values to an array. Both sums are
    accumulated with :func:`math.fsum`.
    """
    r, f0, fp, fm = _lattice_F(F, walk, n)
    steps = np.diff(walk.sites[: n + 1])
    # (F(S+d) - F(S-d)) / (2d) * (+-d) without the d round trip
    mart = math.fsum(0.5 * (fp - fm) * steps)
    lap = math.fsum(0.5 * (fp + fm - 2.0 * f0))
    return mart, lap


def discrete_ito_tanaka(F: Callable, walk: LatticeWalk, n: int) -> tuple[float, float]:
    """Ito-Tanaka form: the Laplacian sum regrouped by site with visit counts.

    ``local_time_part = 1/2 sum_r (F((r+1)d) + F((r-1)d) - 2F(rd)) * ell(rd, tau_n)``.
    Because the regrouped terms form the same multiset as in
    :func:`discrete_ito` and ``fsum`` is correctly rounded, the two results
    are bitwise equal.
    """
    r, _, _, _ = _lattice_F(F, walk, n)
    mart, _ = discrete_ito(F, walk, n)
    sites, counts = np.unique(r, return_counts=True)
    f0 = np.asarray(F(walk.site_value(sites)), dtype=float)
    fp = np.asarray(F(walk.site_value(sites + 1)), dtype=float)
    fm = np.asarray(F(walk.site_value(sites - 1)), dtype=float)
    per_site = 0.5 * (fp + fm - 2.0 * f0)
    local = math.fsum(np.repeat(per_site, counts))
    return mart, local


@numba.njit(cache=True)
def _crossing_kernel(v, x, delta, kmax):
    # returns (ell, ell_plus)
    ell = 0
    ell_plus = 0
    seeking_hit = True
    above = v[0] > x
    for i in range(kmax + 1):
        d = v[i] - x
        if seeking_hit:
            hit = d == 0.0
            if not hit and i > 0:
                dprev = v[i - 1] - x
                hit = (dprev < 0.0 and d > 0.0) or (dprev > 0.0 and d < 0.0)
            if hit:
                ell += 1
                if above:
                    ell_plus += 1
                seeking_hit = False
            else:
                continue
        # seeking exit (possibly in the same sample as the hit)
        if abs(d) >= delta:
            above = d > 0.0
            seeking_hit = True
    return ell, ell_plus


@numba.njit(cache=True)
def _bridge_crossing_kernel(v, x, delta, kmax, dt):
    # Expected counts given the samples; bridges between samples are
    # Brownian with variance dt. p_hit = P(currently seeking a hit).
    p_hit = 1.0
    ell = 0.0
    ell_plus = 0.0
    d0 = v[0] - x
    if d0 == 0.0:
        ell += 1.0
        p_hit = 0.0
    for i in range(kmax):
        a = v[i] - x
        b = v[i + 1] - x
        if a * b <= 0.0:
            h = 1.0
        else:
            h = math.exp(-2.0 * a * b / dt)
        if abs(b) >= delta:
            e = 1.0
        else:
            pu = math.exp(-2.0 * (delta - a) * (delta - b) / dt) if a < delta else 1.0
            pd = math.exp(-2.0 * (delta + a) * (delta + b) / dt) if a > -delta else 1.0
            e = 1.0 - (1.0 - pu) * (1.0 - pd)
        new_hits = p_hit * h
        ell += new_hits
        if a > 0.0 or (a == 0.0 and b > 0.0):
            ell_plus += new_hits
        exits = (1.0 - p_hit) * e
        # a hit followed by |b| >= delta also exits within the step
        if abs(b) >= delta:
            p_hit = p_hit * (1.0 - h) + exits + new_hits
        else:
            p_hit = p_hit * (1.0 - h) + exits
        if p_hit > 1.0:
            p_hit = 1.0
    return ell, ell_plus


def _cutoff_index(path: SamplePath, cutoff: float) -> int:
    k = int(math.floor((cutoff - path.t0) / path.dt + 1e-9))
    return min(max(k, -1), path.n_steps)


def crossing_counts(path: SamplePath, x: float, delta: float, cutoff: float) -> CrossingCounts:
    """Alternating hit-``x`` / exit-``x +- delta`` cycle counts up to ``cutoff``.

    Hits are detected by a sign change of ``value - x`` between consecutive
    samples or by a sample exactly at ``x``; exits by the first sample at
    distance ``>= delta``. ``ell_plus`` uses the indicator that the sample
    starting the search for ``x`` (the path start, then each exit) lies
    above ``x``.
    """
    if not delta > 0:
        raise InvalidArgument(f"delta must be positive, got {delta!r}")
    k = _cutoff_index(path, cutoff)
    if k < 0:
        return CrossingCounts(float(x), float(delta), 0, 0)
    ell, ell_plus = _crossing_kernel(np.asarray(path.values), float(x), float(delta), k)
    return CrossingCounts(float(x), float(delta), int(ell), int(ell_plus))


def bridge_crossing_counts(
    path: SamplePath, x: float, delta: float, cutoff: float, variance_rate: float = 1.0
) -> CrossingCounts:
    """Expected cycle counts given the samples, with Brownian-bridge interpolation.

    Between samples the path is taken to be a Brownian bridge with
    variance ``variance_rate * dt``; the chance that it touches a level
    not separating its endpoints is ``exp(-2 a b / (variance_rate * dt))``.
    A two-state forward recursion (seeking a hit / seeking an exit) then
    gives ``E[ell | samples]`` and ``E[ell_plus | samples]`` without the
    grid-monitoring bias of :func:`crossing_counts`. Events that would need
    two transitions inside one step are ignored, which is negligible once
    ``delta**2 / dt`` is large.
    """
    if not delta > 0:
        raise InvalidArgument(f"delta must be positive, got {delta!r}")
    k = _cutoff_index(path, cutoff)
    if k < 0:
        return CrossingCounts(float(x), float(delta), 0.0, 0.0)
    ell, ell_plus = _bridge_crossing_kernel(
        np.asarray(path.values), float(x), float(delta), k, path.dt * variance_rate
    )
    return CrossingCounts(float(x), float(delta), float(ell), float(ell_plus))
