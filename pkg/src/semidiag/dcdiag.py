"""Difference-of-convex diagnostics built on the discrete Laplacian measure.

For a function ``F`` sampled on a uniform grid and a spacing ``delta`` that
is a whole multiple of the grid step, the measure

    mu_delta(H) = sum_{k delta in H} |F(k delta + delta) + F(k delta - delta) - 2 F(k delta)| / delta

stays bounded as ``delta -> 0`` exactly when ``F`` is a difference of two
convex functions on ``H``. This module computes the measure, splits it into
its positive and negative parts, rebuilds the two convex pieces from hat
functions, and classifies the growth of ``mu_delta`` along a ladder.
"""
from __future__ import annotations

import io
from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgument, PreconditionViolation

_LATTICE_RTOL = 1e-9


@dataclass(frozen=True)
class SampledFunction:
    """A function sampled on ``x0 + k * dx``, ``k = 0..n-1``.

    There is no evaluation between samples: every operation works on
    stored values only.
    """

    x0: float
    dx: float
    values: np.ndarray

    def __post_init__(self):
        if not self.dx > 0:
            raise InvalidArgument(f"dx must be positive, got {self.dx!r}")
        vals = np.array(self.values, dtype=float)
        if vals.ndim != 1 or vals.size < 3:
            raise InvalidArgument("need at least three samples")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @classmethod
    def from_callable(cls, func, x0: float, dx: float, n: int) -> "SampledFunction":
        x = x0 + np.arange(n) * dx
        return cls(x0, dx, np.asarray(func(x), dtype=float))

    @property
    def xs(self) -> np.ndarray:
        return self.x0 + np.arange(self.values.size) * self.dx

    def __len__(self):
        return self.values.size

    def index_of(self, x: float) -> int:
        k = int(round((x - self.x0) / self.dx))
        if k < 0 or k >= self.values.size or abs(self.x0 + k * self.dx - x) > _LATTICE_RTOL * self.dx:
            raise InvalidArgument(f"{x!r} is not a sample location")
        return k


@dataclass(frozen=True)
class AtomicMeasure:
    """Finitely many atoms with strictly increasing locations and positive masses."""

    locations: np.ndarray
    masses: np.ndarray

    def __post_init__(self):
        loc = np.asarray(self.locations, dtype=float)
        m = np.asarray(self.masses, dtype=float)
        if loc.shape != m.shape:
            raise InvalidArgument("locations and masses differ in length")
        if np.any(m < 0):
            raise InvalidArgument("masses must be nonnegative")
        if np.any(np.diff(loc) <= 0):
            raise InvalidArgument("locations must be strictly increasing")
        object.__setattr__(self, "locations", loc)
        object.__setattr__(self, "masses", m)

    @property
    def total(self) -> float:
        return float(self.masses.sum())

    def __len__(self):
        return self.locations.size

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("location,mass\n")
        for x, m in zip(self.locations, self.masses):
            buf.write(f"{x:.17g},{m:.17g}\n")
        return buf.getvalue()


@dataclass(frozen=True)
class DcVerdict:
    """Outcome of :func:`dc_test`.

    Attributes
    ----------
    deltas : ndarray
        Ladder actually used, strictly decreasing.
    masses : ndarray
        ``mu_delta(J)`` per ladder entry.
    growth_exponent : float
        Least-squares slope of ``log mu_delta`` against ``log(1/delta)``.
    bounded : str
        ``"bounded"``, ``"diverging"`` or ``"inconclusive"``.
    """

    deltas: np.ndarray
    masses: np.ndarray
    growth_exponent: float
    bounded: str

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("delta,mass\n")
        for d, m in zip(self.deltas, self.masses):
            buf.write(f"{d:.17g},{m:.17g}\n")
        buf.write(f"# verdict {self.bounded} exponent {self.growth_exponent:.6g}\n")
        return buf.getvalue()


def _step(F: SampledFunction, delta: float) -> int:
    m = int(round(delta / F.dx))
    if m < 1 or abs(m * F.dx - delta) > _LATTICE_RTOL * delta:
        raise InvalidArgument(f"delta={delta!r} is not a whole multiple of dx={F.dx!r}")
    return m


def _phase(F: SampledFunction, m: int) -> int:
    # sublattice anchored at 0 when 0 is a sample location, else at x0
    r = -F.x0 / F.dx
    if abs(r - round(r)) <= _LATTICE_RTOL * max(1.0, abs(r)):
        return int(round(r)) % m
    return 0


def _sublattice(F: SampledFunction, delta: float, interval) -> tuple[np.ndarray, int]:
    """Indices of delta-sublattice points in the closed interval, and the step."""
    m = _step(F, delta)
    a, b = map(float, interval)
    if a > b:
        raise InvalidArgument("interval must satisfy a <= b")
    xs = F.xs
    tol = _LATTICE_RTOL * F.dx
    j = np.arange(_phase(F, m), len(F), m)
    j = j[(xs[j] >= a - tol) & (xs[j] <= b + tol)]
    if j.size and (j[0] - m < 0 or j[-1] + m >= len(F)):
        raise InvalidArgument(
            f"interval [{a}, {b}] needs samples one delta beyond its ends"
        )
    return j, m


def discrete_laplacian(F: SampledFunction, k, step: int = 1):
    """``F[k + step] + F[k - step] - 2 F[k]`` from stored samples.

    ``k`` may be an integer or an integer array.
    """
    k = np.asarray(k)
    if step < 1 or np.any(k - step < 0) or np.any(k + step >= len(F)):
        raise InvalidArgument(f"index {k!r} +- {step} outside 0..{len(F) - 1}")
    v = F.values
    out = v[k + step] + v[k - step] - 2.0 * v[k]
    return float(out) if out.ndim == 0 else out


def _signed_density(F: SampledFunction, delta: float, interval):
    j, m = _sublattice(F, delta, interval)
    lap = discrete_laplacian(F, j, m) if j.size else np.zeros(0)
    return j, lap / delta


def mu_delta(F: SampledFunction, delta: float, interval) -> float:
    """``mu_delta([a, b])``: total ``|Delta^delta F| / delta`` over sublattice points in ``[a, b]``."""
    _, dens = _signed_density(F, delta, interval)
    return float(np.abs(dens).sum())


def mu_delta_signed(F: SampledFunction, delta: float, interval) -> tuple[AtomicMeasure, AtomicMeasure]:
    """Positive and negative parts of ``mu_delta`` as atomic measures.

    Only strictly positive masses become atoms, so a convex ``F`` has an
    empty negative part.
    """
    j, dens = _signed_density(F, delta, interval)
    xs = F.xs[j]
    pos = dens > 0
    neg = dens < 0
    return AtomicMeasure(xs[pos], dens[pos]), AtomicMeasure(xs[neg], -dens[neg])


def _hat_sum(xs: np.ndarray, mu: AtomicMeasure) -> np.ndarray:
    # int |x - y|_+ mu(dy), evaluated directly to keep rounding local
    out = np.zeros_like(xs)
    for start in range(0, len(mu), 2048):
        y = mu.locations[start : start + 2048]
        w = mu.masses[start : start + 2048]
        out += np.maximum(xs[:, None] - y[None, :], 0.0) @ w
    return out


def dc_decompose(F: SampledFunction, delta: float, interval) -> tuple[SampledFunction, SampledFunction]:
    """Convex pieces ``f, g`` with ``F - (f - g)`` affine on the sublattice.

    ``f(x) = int |x - y|_+ mu_+(dy)`` and ``g`` likewise with ``mu_-``, both
    sampled on the grid of ``F``. Each hat ``|x - y|_+`` has discrete
    Laplacian ``delta`` at ``y`` and zero at the other sublattice points, so
    ``Delta^delta (f - g) = Delta^delta F`` at every sublattice point of the
    interval.
    """
    plus, minus = mu_delta_signed(F, delta, interval)
    xs = F.xs
    f = SampledFunction(F.x0, F.dx, _hat_sum(xs, plus))
    g = SampledFunction(F.x0, F.dx, _hat_sum(xs, minus))
    return f, g


def dc_test(
    F: SampledFunction,
    interval,
    delta_ladder,
    bounded_exponent: float = 0.1,
    bounded_ratio: float = 3.0,
    diverging_exponent: float = 0.25,
) -> DcVerdict:
    """Classify the growth of ``mu_delta(J)`` along a decreasing ladder.

    The verdict is ``bounded`` when the fitted exponent is below
    ``bounded_exponent`` and ``max/min`` of the masses is below
    ``bounded_ratio``; ``diverging`` when the exponent exceeds
    ``diverging_exponent``; otherwise ``inconclusive``. Ladder entries
    that are not grid multiples or do not fit inside the sampled range
    are skipped.
    """
    deltas, masses = [], []
    for d in delta_ladder:
        try:
            masses.append(mu_delta(F, float(d), interval))
        except InvalidArgument:
            continue
        deltas.append(float(d))
    deltas = np.asarray(deltas)
    masses = np.asarray(masses)
    if deltas.size < 3:
        raise InvalidArgument("dc_test needs at least three usable ladder entries")
    if np.any(np.diff(deltas) >= 0):
        raise InvalidArgument("delta ladder must be strictly decreasing")
    scale = max(float(np.abs(F.values).max()), 1.0)
    if np.all(masses <= 1e-12 * scale / deltas.min()):
        return DcVerdict(deltas, masses, 0.0, "bounded")
    if np.any(masses <= 0):
        return DcVerdict(deltas, masses, float("nan"), "inconclusive")
    slope = float(np.polyfit(np.log(1.0 / deltas), np.log(masses), 1)[0])
    if slope < bounded_exponent and masses.max() / masses.min() < bounded_ratio:
        verdict = "bounded"
    elif slope > diverging_exponent:
        verdict = "diverging"
    else:
        verdict = "inconclusive"
    return DcVerdict(deltas, masses, slope, verdict)


def convex_upper_bound_check(F: SampledFunction, interval, delta: float) -> tuple[float, float]:
    """``mu_delta([a, b])`` and the slope bound ``F'_+(b) - F'_-(a)``.

    The one-sided slopes are the divided differences over one ``delta``
    outside the interval. For sampled convex ``F`` the sum telescopes to
    exactly this bound, so the returned mass never exceeds it beyond
    rounding.
    """
    j, m = _sublattice(F, delta, interval)
    whole, _ = _sublattice(F, delta, (F.xs[m], F.xs[-1 - m]))
    lap = discrete_laplacian(F, whole, m)
    scale = np.abs(F.values).max() + 1.0
    if np.any(lap < -1e-12 * scale):
        raise PreconditionViolation("F is not convex on the sampled range")
    if j.size == 0:
        return 0.0, 0.0
    v = F.values
    slope_b = (v[j[-1] + m] - v[j[-1]]) / delta
    slope_a = (v[j[0]] - v[j[0] - m]) / delta
    bound = float(slope_b - slope_a)
    mass = mu_delta(F, delta, interval)
    if mass > bound + 1e-9 * (1.0 + abs(bound)):
        raise ArithmeticError(f"mass {mass} exceeds slope bound {bound}")
    return mass, bound


def integrate_samples(x0: float, dx: float, values) -> SampledFunction:
    """Running trapezoid integral of samples, i.e. the exact integral of their linear interpolant."""
    v = np.asarray(values, dtype=float)
    F = np.concatenate(([0.0], np.cumsum(0.5 * (v[1:] + v[:-1]) * dx)))
    return SampledFunction(x0, dx, F)
