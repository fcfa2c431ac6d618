"""Stochastic flows ``dD_t(x) = sigma(D_t(x)) dB_t`` driven by one Brownian path.

The flow is simulated by Euler-Maruyama on an x-grid with the same driving
increments for every start point. Alongside ``D`` the simulation carries
``Z_t(x) = int sigma'(D_s(x)) dB_s`` and its bracket, giving the spatial
derivative ``D' = exp(Z - <Z>/2)`` without finite differences.
"""
from __future__ import annotations

import io
import math
from dataclasses import dataclass, field

import numba
import numpy as np

from .errors import FlowOrderViolation, InvalidArgument, QuantileOutOfRange
from .paths import SamplePath, shift_path


@dataclass(frozen=True)
class PiecewiseLinearSigma:
    """Continuous piecewise-linear diffusion coefficient.

    Parameters
    ----------
    breakpoints : sequence of float
        Strictly increasing kink locations.
    slopes : sequence of float
        ``len(breakpoints) + 1`` slopes, left to right.
    anchor : (float, float)
        A point ``(x0, sigma(x0))`` fixing the additive constant.

    Notes
    -----
    ``derivative`` returns the left derivative, so at a breakpoint it is
    the slope of the piece on its left.
    """

    breakpoints: tuple
    slopes: tuple
    anchor: tuple = (0.0, 0.0)
    intercepts: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        bps = tuple(float(b) for b in self.breakpoints)
        sl = tuple(float(s) for s in self.slopes)
        if len(sl) != len(bps) + 1:
            raise InvalidArgument("need exactly one more slope than breakpoints")
        if any(b2 <= b1 for b1, b2 in zip(bps, bps[1:])):
            raise InvalidArgument("breakpoints must be strictly increasing")
        x0, s0 = float(self.anchor[0]), float(self.anchor[1])
        # sigma(y) = intercepts[i] + slopes[i] * y on piece i
        ic = np.empty(len(sl))
        i0 = int(np.searchsorted(bps, x0, side="left"))
        ic[i0] = s0 - sl[i0] * x0
        for i in range(i0 + 1, len(sl)):
            ic[i] = ic[i - 1] + (sl[i - 1] - sl[i]) * bps[i - 1]
        for i in range(i0 - 1, -1, -1):
            ic[i] = ic[i + 1] + (sl[i + 1] - sl[i]) * bps[i]
        ic.setflags(write=False)
        object.__setattr__(self, "breakpoints", bps)
        object.__setattr__(self, "slopes", sl)
        object.__setattr__(self, "anchor", (x0, s0))
        object.__setattr__(self, "intercepts", ic)

    @classmethod
    def canonical(cls) -> "PiecewiseLinearSigma":
        """``sigma(x) = min(x, 1 - x)``."""
        return cls((0.5,), (1.0, -1.0), (0.5, 0.5))

    @classmethod
    def zero(cls) -> "PiecewiseLinearSigma":
        return cls((), (0.0,), (0.0, 0.0))

    @property
    def lipschitz(self) -> float:
        return max(abs(s) for s in self.slopes)

    @property
    def jumps(self) -> np.ndarray:
        """``Delta sigma'(z) = slope_right(z) - slope_left(z)`` per breakpoint."""
        return np.diff(np.asarray(self.slopes))

    def _piece(self, x):
        return np.searchsorted(np.asarray(self.breakpoints), x, side="left")

    def __call__(self, x):
        i = self._piece(x)
        return self.intercepts[i] + np.asarray(self.slopes)[i] * x

    def derivative(self, x):
        return np.asarray(self.slopes)[self._piece(x)]

    def to_text(self) -> str:
        return (
            f"breakpoints = {' '.join(repr(b) for b in self.breakpoints)}\n"
            f"slopes = {' '.join(repr(s) for s in self.slopes)}\n"
            f"anchor = {self.anchor[0]!r} {self.anchor[1]!r}\n"
        )

    @classmethod
    def from_text(cls, text: str) -> "PiecewiseLinearSigma":
        """Parse the ``key = values`` form written by :meth:`to_text`."""
        fields = {}
        for raw in text.splitlines():
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, val = line.partition("=")
            key = key.strip()
            if not sep or key not in ("breakpoints", "slopes", "anchor") or key in fields:
                raise InvalidArgument(f"bad sigma line: {raw!r}")
            fields[key] = [float(v) for v in val.split()]
        if "slopes" not in fields or "anchor" not in fields or len(fields["anchor"]) != 2:
            raise InvalidArgument("sigma needs slopes and a two-value anchor")
        return cls(tuple(fields.get("breakpoints", ())), tuple(fields["slopes"]), tuple(fields["anchor"]))


@dataclass(frozen=True)
class QuantilePath:
    """``q_t = D_t^{-1}(alpha)`` and ``(D_t^{-1})'(alpha)`` on a time grid."""

    alpha: float
    times: np.ndarray
    values: np.ndarray
    inv_derivative: np.ndarray

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("t,q,inv_derivative\n")
        for t, q, d in zip(self.times, self.values, self.inv_derivative):
            buf.write(f"{t:.17g},{q:.17g},{d:.17g}\n")
        return buf.getvalue()


@dataclass(frozen=True)
class FlowField:
    """A simulated flow on ``times x x_grid``.

    Attributes
    ----------
    x_grid : ndarray
        Start points, strictly increasing.
    times : ndarray
        Recorded times (every ``record_every``-th driver step).
    D, Dprime, Z, Zqv : ndarray
        Tables indexed ``[time, x]``; ``Dprime`` and ``Z`` are ``None`` for
        the sign SDE.
    sweep : ndarray or None
        Per x-cell ``int_0^T sum_z (Delta sigma'(z))^2 1{D_s(x_j) <= z < D_s(x_{j+1})} ds``
        (trapezoid in time), so the bracket formula over ``[x_a, x_b]`` is a
        sum of consecutive entries.
    driver : SamplePath
        The driving Brownian path.
    tracks : dict
        Quantile paths computed at every driver step, keyed by alpha.
    """

    x_grid: np.ndarray
    times: np.ndarray
    D: np.ndarray
    Dprime: np.ndarray | None
    Z: np.ndarray | None
    Zqv: np.ndarray | None
    sweep: np.ndarray | None
    driver: SamplePath
    record_every: int = 1
    tracks: dict = field(default_factory=dict)
    sigma: PiecewiseLinearSigma | None = None

    def slice_at(self, t: float) -> int:
        k = self.driver.index_of(t)
        if k % self.record_every and k != self.driver.n_steps:
            raise InvalidArgument(f"time {t!r} was not recorded")
        return int(np.searchsorted(self.times, self.driver.time(k) - 0.5 * self.driver.dt))

    def slice_csv(self, t: float) -> str:
        i = self.slice_at(t)
        buf = io.StringIO()
        buf.write("x,D,Dprime,Z,Zqv\n")
        for j, x in enumerate(self.x_grid):
            cols = [self.D[i, j]]
            for tab in (self.Dprime, self.Z, self.Zqv):
                cols.append(float("nan") if tab is None else tab[i, j])
            buf.write(f"{x:.17g}," + ",".join(f"{c:.17g}" for c in cols) + "\n")
        return buf.getvalue()


@numba.njit(cache=True)
def _sigma_eval(y, bps, slopes, icpt):
    i = np.searchsorted(bps, y, side="left")
    return icpt[i] + slopes[i] * y, slopes[i]


@numba.njit(cache=True)
def _locate(d, a):
    # index j with d[j] <= a < d[j+1], or -1 when a is out of range
    n = d.shape[0]
    if not (d[0] <= a < d[n - 1]) and not (a == d[n - 1] and n > 1):
        return -1
    j = np.searchsorted(d, a, side="right") - 1
    if j >= n - 1:
        j = n - 2
    return j


@numba.njit(cache=True)
def _flow_kernel(x, dB, dt, bps, slopes, icpt, jump2, record_every, alphas, check_order):
    nx = x.shape[0]
    n = dB.shape[0]
    nrec = n // record_every + 1
    if n % record_every:
        nrec += 1
    D = x.copy()
    Z = np.zeros(nx)
    Q = np.zeros(nx)
    recD = np.empty((nrec, nx))
    recZ = np.empty((nrec, nx))
    recQ = np.empty((nrec, nx))
    recD[0] = D
    recZ[0] = Z
    recQ[0] = Q
    sweep = np.zeros(max(nx - 1, 1))
    na = alphas.shape[0]
    qv = np.empty((na, n + 1))
    qd = np.empty((na, n + 1))
    sig = np.empty(nx)
    der = np.empty(nx)
    err_step = -1
    err_j = -1
    r = 1
    for i in range(n + 1):
        # quantiles and swept cells of the current slice
        for a in range(na):
            al = alphas[a]
            j = _locate(D, al)
            if j < 0:
                qv[a, i] = np.nan
                qd[a, i] = np.nan
            else:
                w = (al - D[j]) / (D[j + 1] - D[j])
                qv[a, i] = x[j] + w * (x[j + 1] - x[j])
                dp0 = math.exp(Z[j] - 0.5 * Q[j])
                dp1 = math.exp(Z[j + 1] - 0.5 * Q[j + 1])
                qd[a, i] = 1.0 / (dp0 + w * (dp1 - dp0))
        wt = dt if 0 < i < n else 0.5 * dt
        for b in range(bps.shape[0]):
            j = _locate(D, bps[b])
            if j >= 0 and nx > 1 and bps[b] < D[j + 1]:
                sweep[j] += jump2[b] * wt
        if i == n:
            break
        db = dB[i]
        for j in range(nx):
            s, d1 = _sigma_eval(D[j], bps, slopes, icpt)
            sig[j] = s
            der[j] = d1
        for j in range(nx):
            D[j] += sig[j] * db
            Z[j] += der[j] * db
            Q[j] += der[j] * der[j] * dt
        if check_order:
            for j in range(nx - 1):
                if not D[j] < D[j + 1]:
                    err_step = i + 1
                    err_j = j
                    break
            if err_step >= 0:
                break
        if (i + 1) % record_every == 0 or i + 1 == n:
            recD[r] = D
            recZ[r] = Z
            recQ[r] = Q
            r += 1
    return recD[:r], recZ[:r], recQ[:r], sweep, qv, qd, err_step, err_j


def _check_grid(x_grid) -> np.ndarray:
    x = np.asarray(x_grid, dtype=float)
    if x.ndim != 1 or x.size == 0:
        raise InvalidArgument("x_grid must be a non-empty 1-d sequence")
    if np.any(np.diff(x) <= 0):
        raise InvalidArgument("x_grid must be strictly increasing")
    return x


def _record_times(driver: SamplePath, record_every: int) -> np.ndarray:
    idx = np.arange(0, driver.n_steps + 1, record_every)
    if idx[-1] != driver.n_steps:
        idx = np.append(idx, driver.n_steps)
    return driver.t0 + idx * driver.dt


def simulate_flow(
    sigma: PiecewiseLinearSigma,
    x_grid,
    driver: SamplePath,
    record_every: int = 1,
    track_alphas=(),
    check_order: bool = True,
) -> FlowField:
    """Euler-Maruyama flow with shared increments.

    Parameters
    ----------
    sigma : PiecewiseLinearSigma
    x_grid : array_like
        Strictly increasing start points.
    driver : SamplePath
        Brownian driving path; its steps are the time steps.
    record_every : int
        Keep every ``record_every``-th slice (the last slice is always kept).
    track_alphas : sequence of float
        Levels whose quantile path ``D_t^{-1}(alpha)`` is computed at every
        step, without storing the slices.
    check_order : bool
        Raise :class:`FlowOrderViolation` when a slice stops being strictly
        increasing.
    """
    x = _check_grid(x_grid)
    record_every = int(record_every)
    if record_every < 1:
        raise InvalidArgument("record_every must be >= 1")
    alphas = np.asarray(track_alphas, dtype=float).reshape(-1)
    jump2 = sigma.jumps**2
    D, Z, Q, sweep, qv, qd, es, ej = _flow_kernel(
        x,
        driver.increments(),
        driver.dt,
        np.asarray(sigma.breakpoints, dtype=float),
        np.asarray(sigma.slopes, dtype=float),
        np.asarray(sigma.intercepts, dtype=float),
        np.asarray(jump2, dtype=float),
        record_every,
        alphas,
        check_order,
    )
    if es >= 0:
        raise FlowOrderViolation(int(es), int(ej))
    tracks = {}
    for a, al in enumerate(alphas):
        bad = np.flatnonzero(np.isnan(qv[a]))
        if bad.size:
            continue
        tracks[float(al)] = QuantilePath(float(al), driver.times, qv[a], qd[a])
    return FlowField(
        x, _record_times(driver, record_every), D, np.exp(Z - 0.5 * Q), Z, Q,
        sweep if x.size > 1 else np.zeros(0), driver, record_every, tracks, sigma,
    )


@numba.njit(cache=True)
def _sign_kernel(x, dB, dt, beta, record_every):
    nx = x.shape[0]
    n = dB.shape[0]
    nrec = n // record_every + 1
    if n % record_every:
        nrec += 1
    G = x.copy()
    rec = np.empty((nrec, nx))
    rec[0] = G
    r = 1
    for i in range(n):
        for j in range(nx):
            g = G[j]
            s = 1.0 if g > 0.0 else (-1.0 if g < 0.0 else 0.0)
            G[j] = g + dB[i] + beta * s * dt
        if (i + 1) % record_every == 0 or i + 1 == n:
            rec[r] = G
            r += 1
    return rec[:r]


def simulate_sign_sde(beta: float, x_grid, driver: SamplePath, record_every: int = 1) -> FlowField:
    """Euler scheme for ``dG = dB + beta sign(G) dt`` with ``sign(0) = 0``.

    Order in ``x`` is not checked: for ``beta > 0`` the flow need not keep it.
    """
    x = _check_grid(x_grid)
    G = _sign_kernel(x, driver.increments(), driver.dt, float(beta), int(record_every))
    return FlowField(x, _record_times(driver, record_every), G, None, None, None, None, driver, int(record_every))


@dataclass(frozen=True)
class LampertiMap:
    """``p`` with ``p' = 1/sigma`` on ``(lo, hi)`` where ``sigma > 0``, and ``p(m) = 0``.

    On a piece where ``sigma(y) = c + s y`` the primitive is
    ``log(c + s y) / s`` (or ``y / c`` when ``s = 0``); the pieces are glued
    continuously and shifted so that ``p(m) = 0``.
    """

    sigma: PiecewiseLinearSigma
    lo: float
    hi: float
    m: float

    def _pieces(self):
        inner = [b for b in self.sigma.breakpoints if self.lo < b < self.hi]
        knots = np.array([self.lo] + inner + [self.hi])
        mids = 0.5 * (knots[:-1] + knots[1:])
        idx = self.sigma._piece(mids)
        return knots, self.sigma.intercepts[idx], np.asarray(self.sigma.slopes)[idx]

    @staticmethod
    def _G(c, s, y):
        return y / c if s == 0.0 else np.log(c + s * y) / s

    def _offsets(self):
        knots, c, s = self._pieces()
        off = np.zeros(c.size)
        im = int(np.clip(np.searchsorted(knots, self.m, side="left") - 1, 0, c.size - 1))
        off[im] = -self._G(c[im], s[im], self.m)
        for i in range(im + 1, c.size):
            k = knots[i]
            off[i] = off[i - 1] + self._G(c[i - 1], s[i - 1], k) - self._G(c[i], s[i], k)
        for i in range(im - 1, -1, -1):
            k = knots[i + 1]
            off[i] = off[i + 1] + self._G(c[i + 1], s[i + 1], k) - self._G(c[i], s[i], k)
        return knots, c, s, off

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        if np.any((x <= self.lo) | (x >= self.hi)):
            raise InvalidArgument("argument outside the Lamperti domain")
        knots, c, s, off = self._offsets()
        xx = np.atleast_1d(x)
        piece = np.clip(np.searchsorted(knots, xx, side="left") - 1, 0, c.size - 1)
        out = np.empty_like(xx)
        for i in range(c.size):
            sel = piece == i
            out[sel] = off[i] + self._G(c[i], s[i], xx[sel])
        return float(out[0]) if x.ndim == 0 else out

    def inverse(self, y):
        y = np.asarray(y, dtype=float)
        knots, c, s, off = self._offsets()
        yy = np.atleast_1d(y)
        pk = np.array([off[i] + self._G(c[i], s[i], knots[i + 1]) for i in range(c.size - 1)])
        piece = np.searchsorted(pk, yy, side="left")
        out = np.empty_like(yy)
        for i in range(c.size):
            sel = piece == i
            v = yy[sel] - off[i]
            out[sel] = c[i] * v if s[i] == 0.0 else (np.exp(s[i] * v) - c[i]) / s[i]
        return float(out[0]) if y.ndim == 0 else out


def lamperti_map(sigma: PiecewiseLinearSigma, component=(0.0, 1.0), m: float = 0.5) -> LampertiMap:
    """Closed-form Lamperti transform on ``component`` with ``p(m) = 0``.

    For the canonical coefficient on ``(0, 1)`` this is ``log(2x)`` on
    ``(0, 1/2]`` and ``-log(2(1 - x))`` on ``[1/2, 1)``.
    """
    lo, hi = map(float, component)
    if not lo < m < hi:
        raise InvalidArgument("m must lie inside the component")
    knots = [lo] + [b for b in sigma.breakpoints if lo < b < hi] + [hi]
    probe = []
    for a, b in zip(knots, knots[1:]):
        probe += list(np.linspace(a, b, 9)[1:-1])
    probe += [b for b in sigma.breakpoints if lo < b < hi]
    if np.any(np.asarray(sigma(np.asarray(probe))) <= 0):
        raise InvalidArgument("sigma must be positive inside the component")
    return LampertiMap(sigma, lo, hi, float(m))


def invert_flow(field: FlowField, alpha: float) -> QuantilePath:
    """Quantile path ``q_t = D_t^{-1}(alpha)`` over the recorded slices.

    Uses binary search in each monotone slice and linear interpolation
    between the bracketing nodes; ``(D^{-1})'(alpha)`` is ``1/D'``
    interpolated at the same weight. A track computed during simulation
    at every step is returned instead when one exists for ``alpha``.
    """
    if float(alpha) in field.tracks:
        return field.tracks[float(alpha)]
    if field.Dprime is None:
        raise InvalidArgument("field has no derivative; it is not a flow of dD = sigma(D) dB")
    x = field.x_grid
    q = np.empty(field.times.size)
    inv = np.empty(field.times.size)
    for i, row in enumerate(field.D):
        if not row[0] <= alpha <= row[-1] or row.size < 2:
            raise QuantileOutOfRange(alpha, i)
        j = min(int(np.searchsorted(row, alpha, side="right")) - 1, row.size - 2)
        w = (alpha - row[j]) / (row[j + 1] - row[j])
        q[i] = x[j] + w * (x[j + 1] - x[j])
        dp = field.Dprime[i, j] + w * (field.Dprime[i, j + 1] - field.Dprime[i, j])
        inv[i] = 1.0 / dp
    return QuantilePath(float(alpha), field.times.copy(), q, inv)


@dataclass(frozen=True)
class CompositionReport:
    split_time: float
    max_discrepancy: float
    n_points: int


def compose_flow_check(
    sigma: PiecewiseLinearSigma, x_grid, driver: SamplePath, s: float, record_every: int = 1
) -> CompositionReport:
    """Compare ``D_{s+t}`` with ``D_{s,t}`` composed with ``D_s``.

    ``D_{s,.}`` is simulated on the same x-grid from the shifted driver and
    evaluated at ``D_s(x)`` by linear interpolation; start points whose
    ``D_s(x)`` falls outside the grid are left out. The discrepancy is the
    maximum over recorded times ``t`` and retained ``x``.
    """
    x = _check_grid(x_grid)
    k = driver.index_of(s)
    full = simulate_flow(sigma, x, driver, record_every=1, check_order=True)
    Ds = full.D[k]
    keep = (Ds >= x[0]) & (Ds <= x[-1])
    if k == driver.n_steps:
        return CompositionReport(float(s), 0.0, int(keep.sum()))
    tail = simulate_flow(sigma, x, shift_path(driver, s), record_every=1, check_order=True)
    worst = 0.0
    for i in range(0, tail.D.shape[0], int(record_every)):
        composed = np.interp(Ds[keep], x, tail.D[i])
        worst = max(worst, float(np.max(np.abs(composed - full.D[k + i][keep]), initial=0.0)))
    return CompositionReport(float(s), worst, int(keep.sum()))


def tail_solution(x: float, driver: SamplePath) -> np.ndarray:
    """Closed-form canonical flow for start points outside ``(0, 1)``.

    ``x exp(B_t - t/2)`` for ``x <= 0`` and ``1 - (1 - x) exp(-B_t - t/2)``
    for ``x >= 1``.
    """
    t = driver.times - driver.t0
    b = np.asarray(driver.values) - driver.values[0]
    if x <= 0:
        return x * np.exp(b - 0.5 * t)
    if x >= 1:
        return 1.0 - (1.0 - x) * np.exp(-b - 0.5 * t)
    raise InvalidArgument("closed form only for start points outside (0, 1)")


@dataclass(frozen=True)
class ZeroEnergyReport:
    meshes: np.ndarray
    qv_A: np.ndarray
    qv_q: np.ndarray
    martingale_qv: float


def zero_energy_residual(field: FlowField, alpha: float, steps) -> ZeroEnergyReport:
    """QV of ``A_t = q_t + int (D_s^{-1})'(alpha) sigma(alpha) dB_s`` along a ladder.

    Parameters
    ----------
    field : FlowField
        Simulated with ``record_every=1`` or with ``alpha`` among its
        tracked levels, so that ``q`` is known at every driver step.
    alpha : float
    steps : sequence of int
        Partition spacings in driver steps, one per rung; each must divide
        the number of steps.

    Returns
    -------
    ZeroEnergyReport
        QV sums of ``A`` and of ``q`` per rung, and the bracket
        ``int ((D^{-1})' sigma(alpha))^2 dt`` of the martingale part.
    """
    if float(alpha) not in field.tracks and field.record_every != 1:
        raise InvalidArgument("zero-energy sums need q at every driver step")
    qp = invert_flow(field, alpha)
    return zero_energy_from_track(qp, field.driver, alpha, steps, field.sigma)


def zero_energy_from_track(qp: QuantilePath, driver: SamplePath, alpha: float, steps,
                           sigma: PiecewiseLinearSigma) -> ZeroEnergyReport:
    """:func:`zero_energy_residual` for a per-step quantile path and its driver."""
    return _zero_energy(qp, driver.increments(), driver.dt, sigma, alpha, steps)


def _zero_energy(qp, dB, dt, sigma, alpha, steps):
    if qp.values.size != dB.size + 1:
        raise InvalidArgument("quantile path and driver lengths disagree")
    s_alpha = float(sigma(np.asarray(alpha)))
    mart_inc = qp.inv_derivative[:-1] * s_alpha * dB
    A = qp.values + np.concatenate(([0.0], np.cumsum(mart_inc)))
    n = dB.size
    qa, qq, meshes = [], [], []
    for m in steps:
        m = int(m)
        if m < 1 or n % m:
            raise InvalidArgument(f"step {m} does not divide {n}")
        idx = np.arange(0, n + 1, m)
        qa.append(float(np.sum(np.diff(A[idx]) ** 2)))
        qq.append(float(np.sum(np.diff(qp.values[idx]) ** 2)))
        meshes.append(m * dt)
    mqv = float(np.sum((qp.inv_derivative[:-1] * s_alpha) ** 2) * dt)
    return ZeroEnergyReport(np.asarray(meshes), np.asarray(qa), np.asarray(qq), mqv)
