"""Local-time estimators, occupation times and local-time profiles.

Three routes to ``L^x_t`` are provided: the Tanaka formula, occupation
densities and crossing counts. All occupation integrals treat the path as
linear between samples, so time-below-level is split exactly inside each
increment.
"""
from __future__ import annotations

import io
import math
import warnings
from dataclasses import dataclass

import numba
import numpy as np

from .errors import InvalidArgument
from .lattice import bridge_crossing_counts, crossing_counts
from .paths import SamplePath

#: ``crossing_local_time`` warns when ``delta**2 / dt`` is below this.
MIN_CROSSING_RESOLUTION = 100.0


@dataclass(frozen=True)
class LocalTimeProfile:
    """Local-time values ``L^y_t`` on a grid of levels."""

    levels: np.ndarray
    values: np.ndarray

    def integral(self) -> float:
        """Trapezoid integral of the profile over its levels."""
        return float(np.trapezoid(self.values, self.levels))

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("level,value\n")
        for y, v in zip(self.levels, self.values):
            buf.write(f"{y:.17g},{v:.17g}\n")
        return buf.getvalue()


@dataclass(frozen=True)
class OccupationField:
    """``A(t_i, x_j) = int_0^{t_i} 1{X_u <= x_j} du`` on time x level grids."""

    times: np.ndarray
    levels: np.ndarray
    table: np.ndarray


def _end_index(path: SamplePath, t) -> int:
    return path.n_steps if t is None else path.index_of(t)


def tanaka_local_time(path: SamplePath, x: float, t: float | None = None) -> float:
    """Tanaka-formula estimate of ``L^x_t``.

    Evaluates ``2 (|X_t - x|_+ - |X_0 - x|_+ - sum 1{X_i > x} (X_{i+1} - X_i))``
    with the left-point indicator. Per increment the summand telescopes to
    ``|X_{i+1} - x|`` on steps that cross ``x`` and to zero otherwise, which
    is the form evaluated here: it is algebraically identical, never
    negative, and exactly zero for paths that stay on one side of ``x``.
    """
    k = _end_index(path, t)
    v = np.asarray(path.values[: k + 1]) - x
    a, b = v[:-1], v[1:]
    up = (a <= 0.0) & (b > 0.0)
    down = (a > 0.0) & (b <= 0.0)
    return 2.0 * float(np.abs(b[up | down]).sum())


@numba.njit(cache=True)
def _tanaka_profile_kernel(v, levels, kmax):
    # levels sorted ascending; step i contributes |v[i+1]-y| to every y crossed
    out = np.zeros(levels.shape[0])
    for i in range(kmax):
        a = v[i]
        b = v[i + 1]
        if b > a:
            # a <= y < b
            j0 = np.searchsorted(levels, a, side="left")
            j1 = np.searchsorted(levels, b, side="left")
            for j in range(j0, j1):
                out[j] += b - levels[j]
        elif b < a:
            # b <= y < a
            j0 = np.searchsorted(levels, b, side="left")
            j1 = np.searchsorted(levels, a, side="left")
            for j in range(j0, j1):
                out[j] += levels[j] - b
    return 2.0 * out


def tanaka_profile(path: SamplePath, levels, t: float | None = None) -> LocalTimeProfile:
    """:func:`tanaka_local_time` evaluated at many levels in one pass."""
    lv = np.asarray(levels, dtype=float)
    order = np.argsort(lv, kind="stable")
    k = _end_index(path, t)
    vals = np.empty_like(lv)
    vals[order] = _tanaka_profile_kernel(np.asarray(path.values), lv[order], k)
    return LocalTimeProfile(lv.copy(), vals)


@numba.njit(cache=True)
def _occupation_kernel(v, edges, kmax, dt, strict):
    # time spent below each (sorted) edge, linear interpolation in each step;
    # strict selects X < e instead of X <= e (only matters on flat steps)
    m = edges.shape[0]
    full = np.zeros(m + 1)
    part = np.zeros(m)
    for i in range(kmax):
        a = v[i]
        b = v[i + 1]
        lo = min(a, b)
        hi = max(a, b)
        if lo == hi:
            if strict:
                j = np.searchsorted(edges, lo, side="right")
            else:
                j = np.searchsorted(edges, lo, side="left")
            full[j] += dt
            continue
        j0 = np.searchsorted(edges, lo, side="right")
        j1 = np.searchsorted(edges, hi, side="left")
        full[j1] += dt
        w = dt / (hi - lo)
        for j in range(j0, j1):
            part[j] += (edges[j] - lo) * w
    return np.cumsum(full)[:m] + part


def _occupation_below_many(path: SamplePath, edges: np.ndarray, k: int, strict: bool) -> np.ndarray:
    order = np.argsort(edges, kind="stable")
    out = np.empty(edges.shape[0])
    out[order] = _occupation_kernel(np.asarray(path.values), edges[order], k, path.dt, strict)
    return out


def occupation_below(path: SamplePath, t: float | None, x) -> float | np.ndarray:
    """``int_{t0}^t 1{X_u <= x} du`` for the linearly interpolated path.

    ``x`` may be a scalar or an array of levels; arrays are handled in one
    pass over the path.
    """
    k = _end_index(path, t)
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    out = _occupation_below_many(path, xs, k, strict=False)
    return float(out[0]) if np.ndim(x) == 0 else out


def occupation_profile(path: SamplePath, t: float | None, levels, bandwidth: float | None = None) -> LocalTimeProfile:
    """Occupation-density profile ``Z_y = |{u <= t : X_u in [y - h/2, y + h/2)}| / h``.

    The default bandwidth is ``2 sqrt(dt)``.
    """
    h = 2.0 * math.sqrt(path.dt) if bandwidth is None else float(bandwidth)
    if not h > 0:
        raise InvalidArgument(f"bandwidth must be positive, got {bandwidth!r}")
    lv = np.asarray(levels, dtype=float)
    k = _end_index(path, t)
    edges = np.concatenate((lv - 0.5 * h, lv + 0.5 * h))
    below = _occupation_below_many(path, edges, k, strict=True)
    n = lv.shape[0]
    return LocalTimeProfile(lv.copy(), (below[n:] - below[:n]) / h)


def crossing_local_time(
    path: SamplePath, x: float, delta: float, t: float | None = None, bridge: bool = False
) -> float:
    """``delta * ell^delta(x, t)`` from the hit/exit cycle counts.

    With ``bridge=True`` the expected count under Brownian-bridge
    interpolation between samples is used (see
    :func:`semidiag.lattice.bridge_crossing_counts`), which removes the
    undercount from excursions that happen between grid points.
    """
    cutoff = path.t_end if t is None else t
    if bridge:
        cc = bridge_crossing_counts(path, x, delta, cutoff)
    else:
        if delta * delta / path.dt < MIN_CROSSING_RESOLUTION:
            warnings.warn(
                f"delta**2/dt = {delta * delta / path.dt:.3g} < {MIN_CROSSING_RESOLUTION:g}; "
                "grid-monitored crossing counts are biased low",
                stacklevel=2,
            )
        cc = crossing_counts(path, x, delta, cutoff)
    return delta * cc.ell


def rogers_F(path: SamplePath, x) -> float | np.ndarray:
    """``F(x, xi) = int_0^s 1{xi_u <= x} du`` over the whole path."""
    return occupation_below(path, None, x)


def occupation_field(path: SamplePath, levels, record_every: int = 1) -> OccupationField:
    """The table ``A(t, x)`` at every ``record_every``-th grid time."""
    lv = np.asarray(levels, dtype=float)
    idx = np.arange(0, path.n_steps + 1, int(record_every))
    table = np.vstack([_occupation_below_many(path, lv, int(k), strict=False) for k in idx])
    return OccupationField(path.t0 + idx * path.dt, lv.copy(), table)


@numba.njit(cache=True)
def _fen_add(tree, i, val):
    n = tree.shape[0]
    i += 1
    while i <= n:
        tree[i - 1] += val
        i += i & (-i)


@numba.njit(cache=True)
def _fen_prefix(tree, i):
    # sum of entries 0..i
    s = 0.0
    i += 1
    while i > 0:
        s += tree[i - 1]
        i -= i & (-i)
    return s


@numba.njit(cache=True)
def _range_add(c0, c1, lo, hi, a0, a1):
    # add a0 + a1*y to positions lo..hi-1 (difference-array style)
    if lo >= hi:
        return
    _fen_add(c0, lo, a0)
    _fen_add(c1, lo, a1)
    if hi < c0.shape[0]:
        _fen_add(c0, hi, -a0)
        _fen_add(c1, hi, -a1)


@numba.njit(cache=True)
def _running_kernel(v, rank, coords, dt):
    # For each k: occupation A(t_k, v[k]) and Tanaka local time L^{v[k]}_{t_k}
    # of the path up to t_k. Contributions of earlier steps are piecewise
    # linear in the level and are kept in Fenwick trees over value ranks.
    n = v.shape[0]
    m = coords.shape[0]
    occ0 = np.zeros(m)
    occ1 = np.zeros(m)
    lt0 = np.zeros(m)
    lt1 = np.zeros(m)
    A = np.zeros(n)
    L = np.zeros(n)
    for k in range(1, n):
        a = v[k - 1]
        b = v[k]
        ra = rank[k - 1]
        rb = rank[k]
        if ra == rb:
            _range_add(occ0, occ1, ra, m, dt, 0.0)
        else:
            rlo = min(ra, rb)
            rhi = max(ra, rb)
            lo = min(a, b)
            hi = max(a, b)
            w = dt / (hi - lo)
            # lo < y < hi: (y - lo) * w ; y >= hi: dt
            _range_add(occ0, occ1, rlo + 1, rhi, -lo * w, w)
            _range_add(occ0, occ1, rhi, m, dt, 0.0)
            if b > a:
                # a <= y < b crossed upward: b - y
                _range_add(lt0, lt1, ra, rb, b, -1.0)
            else:
                # b <= y < a crossed downward: y - b
                _range_add(lt0, lt1, rb, ra, -b, 1.0)
        y = b
        A[k] = _fen_prefix(occ0, rb) + y * _fen_prefix(occ1, rb)
        L[k] = 2.0 * (_fen_prefix(lt0, rb) + y * _fen_prefix(lt1, rb))
    return A, L


def running_level_functionals(path: SamplePath) -> tuple[np.ndarray, np.ndarray]:
    """``A(t_k, X_{t_k})`` and ``L^{X_{t_k}}_{t_k}`` for every grid index ``k``.

    ``A`` is the exact occupation time below the current value under
    linear interpolation and ``L`` is the Tanaka estimate of the local
    time at the current value, both using only the path up to ``t_k``.
    The cost is ``O(n log n)``; the results match
    :func:`occupation_below` and :func:`tanaka_local_time` applied to each
    truncated path.
    """
    v = np.asarray(path.values, dtype=float)
    coords, rank = np.unique(v, return_inverse=True)
    return _running_kernel(v, rank.astype(np.int64), coords, path.dt)
