"""Seedable driving processes on uniform time grids and simple path algebra.

Every random draw goes through :class:`SeedSpec`, which maps a
``(master_seed, stream_index)`` pair to its own Philox (counter-based)
stream, so replicate ``k`` of an experiment is the same regardless of which
worker computes it or in which order.
"""
from __future__ import annotations

import csv
import functools
import io
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import InvalidArgument, ResourceLimit

#: Largest fBm grid accepted by :func:`gen_fbm` (dense Cholesky factor is n x n).
FBM_MAX_STEPS = 2**13

_GRID_RTOL = 1e-9


@dataclass(frozen=True)
class SeedSpec:
    """Identifies one independent random stream.

    Parameters
    ----------
    master_seed : int
        Experiment-wide seed (64-bit).
    stream_index : int
        Replicate id; distinct indices give independent streams.
    """

    master_seed: int
    stream_index: int = 0

    def __post_init__(self):
        if not 0 <= int(self.master_seed) < 2**64:
            raise InvalidArgument("master_seed must fit in 64 unsigned bits")
        if int(self.stream_index) < 0:
            raise InvalidArgument("stream_index must be nonnegative")

    def generator(self, *purpose: int) -> np.random.Generator:
        """Return a fresh Philox generator for this stream.

        ``purpose`` words split the stream further (e.g. driver vs. bridge
        refinement noise) without touching the replicate numbering.
        """
        ss = np.random.SeedSequence([int(self.master_seed), int(self.stream_index), *purpose])
        return np.random.Generator(np.random.Philox(ss))

    def replicate(self, k: int) -> "SeedSpec":
        return SeedSpec(self.master_seed, int(k))


class SamplePath:
    """A real process sampled on ``t0 + k * dt``, ``k = 0..n``.

    Sample times are always derived from the integer index, never
    accumulated, so ``times[k] == t0 + k * dt`` holds exactly.
    """

    __slots__ = ("t0", "dt", "values")

    def __init__(self, t0: float, dt: float, values):
        dt = float(dt)
        if not dt > 0 or not np.isfinite(dt):
            raise InvalidArgument(f"dt must be positive, got {dt!r}")
        vals = np.array(values, dtype=float)
        if vals.ndim != 1 or vals.size == 0:
            raise InvalidArgument("values must be a non-empty 1-d sequence")
        vals.setflags(write=False)
        object.__setattr__(self, "t0", float(t0))
        object.__setattr__(self, "dt", dt)
        object.__setattr__(self, "values", vals)

    def __setattr__(self, name, value):
        raise AttributeError("SamplePath is immutable")

    def __repr__(self):
        return f"SamplePath(t0={self.t0!r}, dt={self.dt!r}, n_steps={self.n_steps})"

    def __len__(self):
        return self.values.size

    @property
    def n_steps(self) -> int:
        return self.values.size - 1

    @property
    def t_end(self) -> float:
        return self.time(self.n_steps)

    @property
    def times(self) -> np.ndarray:
        return self.t0 + np.arange(self.values.size) * self.dt

    def time(self, k: int) -> float:
        return self.t0 + k * self.dt

    def index_of(self, t: float) -> int:
        """Grid index of time ``t``; raises if ``t`` is not a grid time."""
        k = int(round((float(t) - self.t0) / self.dt))
        if k < 0 or k > self.n_steps or abs(self.time(k) - t) > _GRID_RTOL * self.dt:
            raise InvalidArgument(f"time {t!r} is not on the grid of {self!r}")
        return k

    def increments(self) -> np.ndarray:
        return np.diff(self.values)

    def truncate(self, t: float) -> "SamplePath":
        """The path restricted to ``[t0, t]`` (``t`` on grid)."""
        return SamplePath(self.t0, self.dt, self.values[: self.index_of(t) + 1])

    def to_csv(self, target=None) -> str:
        """Serialize as ``k,t,value`` rows; returns the text and optionally writes it."""
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["k", "t", "value"])
        for k, (t, v) in enumerate(zip(self.times, self.values)):
            w.writerow([k, f"{t:.17g}", f"{v:.17g}"])
        text = buf.getvalue()
        if target is not None:
            Path(target).write_text(text)
        return text

    @classmethod
    def from_csv(cls, source) -> "SamplePath":
        text = Path(source).read_text() if not isinstance(source, str) or "\n" not in source else source
        rows = list(csv.DictReader(io.StringIO(text)))
        if len(rows) < 1:
            raise InvalidArgument("empty path CSV")
        t = np.array([float(r["t"]) for r in rows])
        v = np.array([float(r["value"]) for r in rows])
        dt = (t[-1] - t[0]) / (len(t) - 1) if len(t) > 1 else 1.0
        return cls(t[0], dt, v)


def _check_shape(horizon: float, n_steps: int):
    if not horizon > 0:
        raise InvalidArgument(f"horizon must be positive, got {horizon!r}")
    if int(n_steps) != n_steps or n_steps < 1:
        raise InvalidArgument(f"n_steps must be a positive integer, got {n_steps!r}")


def gen_brownian(seed: SeedSpec, horizon: float, n_steps: int) -> SamplePath:
    """Standard Brownian motion on ``[0, horizon]`` with ``n_steps`` steps.

    The path is ``sqrt(dt) * cumsum(z)`` for a standard normal vector ``z``
    drawn from ``seed``, so ``gen_brownian(seed, c*T, n)`` is ``sqrt(c)``
    times ``gen_brownian(seed, T, n)`` up to rounding.
    """
    _check_shape(horizon, n_steps)
    dt = horizon / n_steps
    z = seed.generator(0).standard_normal(int(n_steps))
    values = np.empty(n_steps + 1)
    values[0] = 0.0
    np.cumsum(z, out=values[1:])
    values[1:] *= np.sqrt(dt)
    return SamplePath(0.0, dt, values)


def fbm_covariance(hurst: float, times: np.ndarray) -> np.ndarray:
    """``Cov(B_H(s), B_H(t)) = (s^2H + t^2H - |t - s|^2H) / 2``."""
    s = times[:, None]
    t = times[None, :]
    h2 = 2.0 * hurst
    return 0.5 * (s**h2 + t**h2 - np.abs(t - s) ** h2)


@functools.lru_cache(maxsize=8)
def _fbm_factor(hurst: float, horizon: float, n_steps: int) -> np.ndarray:
    times = horizon * np.arange(1, n_steps + 1) / n_steps
    chol = np.linalg.cholesky(fbm_covariance(hurst, times))
    chol.setflags(write=False)
    return chol


def gen_fbm(seed: SeedSpec, hurst: float, horizon: float, n_steps: int) -> SamplePath:
    """Exact fractional Brownian motion by Cholesky factorization.

    The factor is cached per ``(hurst, horizon, n_steps)``, so drawing many
    replicates costs one factorization plus one triangular product each.
    """
    if not 0.0 < hurst < 1.0:
        raise InvalidArgument(f"hurst must lie in (0, 1), got {hurst!r}")
    _check_shape(horizon, n_steps)
    if n_steps > FBM_MAX_STEPS:
        raise ResourceLimit(f"n_steps={n_steps} exceeds the fBm cap {FBM_MAX_STEPS}")
    chol = _fbm_factor(float(hurst), float(horizon), int(n_steps))
    z = seed.generator(1).standard_normal(int(n_steps))
    values = np.concatenate(([0.0], chol @ z))
    return SamplePath(0.0, horizon / n_steps, values)


def shift_path(path: SamplePath, s: float) -> SamplePath:
    """``u -> B_{s+u} - B_s`` on the remaining grid, starting at time 0."""
    k = path.index_of(s)
    if k == path.n_steps:
        raise InvalidArgument("shift time leaves no remaining increments")
    tail = path.values[k:]
    return SamplePath(0.0, path.dt, tail - tail[0])


def reverse_path(path: SamplePath, s: float) -> SamplePath:
    """Time reversal ``u -> B_{s-u} - B_s`` for ``u`` in ``[0, s - t0]``."""
    k = path.index_of(s)
    head = path.values[: k + 1][::-1]
    return SamplePath(0.0, path.dt, head - head[0])


def refine_brownian(path: SamplePath, factor: int, seed: SeedSpec) -> SamplePath:
    """Insert ``factor - 1`` Brownian-bridge points into every step.

    Coarse samples are copied unchanged; inserted points follow the exact
    conditional (bridge) law given their bracketing samples.
    """
    if int(factor) != factor or factor < 2:
        raise InvalidArgument(f"factor must be an integer >= 2, got {factor!r}")
    m = int(factor)
    n = path.n_steps
    fine_dt = path.dt / m
    z = seed.generator(2).standard_normal((n, m)) * np.sqrt(fine_dt)
    walk = np.cumsum(z, axis=1)
    frac = np.arange(1, m + 1) / m
    bridge = walk - frac[None, :] * walk[:, -1:]
    v = path.values
    interp = v[:-1, None] + frac[None, :] * (v[1:] - v[:-1])[:, None]
    fine = np.empty(n * m + 1)
    fine[0] = v[0]
    body = (interp + bridge).reshape(-1)
    fine[1:] = body
    fine[m::m] = v[1:]
    return SamplePath(path.t0, fine_dt, fine)
