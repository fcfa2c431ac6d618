import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from semidiag import dcdiag, localtime
from semidiag.paths import SamplePath, SeedSpec, gen_brownian

from conftest import linear_path

HALF_NORMAL_MEAN = math.sqrt(2 / math.pi)


def test_tanaka_zero_far_from_level():
    p = linear_path([1.0, 1.2, 1.1, 1.4], dt=0.1)
    assert localtime.tanaka_local_time(p, 0.0) == 0.0


def test_tanaka_matches_literal_sum(bm):
    x = 0.1
    v = bm.values
    literal = 2 * (max(v[-1] - x, 0) - max(v[0] - x, 0) - np.sum((v[:-1] > x) * np.diff(v)))
    assert localtime.tanaka_local_time(bm, x) == pytest.approx(literal, abs=1e-12)
    prof = localtime.tanaka_profile(bm, [0.3, x, -0.2])
    assert prof.values[1] == pytest.approx(literal, abs=1e-12)


def test_occupation_below_cases():
    line = linear_path([0.0, 1.0], dt=1.0)
    assert localtime.occupation_below(line, 1.0, 0.5) == 0.5
    assert localtime.occupation_below(line, 1.0, 2.0) == 1.0
    assert localtime.occupation_below(line, 1.0, -1.0) == 0.0


def test_constant_path_profile():
    p = SamplePath(0.0, 0.01, np.full(101, 0.3))
    prof = localtime.occupation_profile(p, None, np.arange(-1, 1, 0.1) + 0.05, bandwidth=0.1)
    assert prof.values[13] == pytest.approx(1.0 / 0.1)
    assert np.count_nonzero(prof.values) == 1


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 10**6))
def test_occupation_conservation(seed):
    p = gen_brownian(SeedSpec(seed, 0), 1.0, 500)
    h = 0.05
    lo, hi = p.values.min() - h, p.values.max() + h
    levels = np.arange(lo, hi + h, h)
    prof = localtime.occupation_profile(p, None, levels, bandwidth=h)
    assert abs(prof.values.sum() * h - 1.0) <= 1e-10
    assert np.all(prof.values >= 0)


def test_rogers_F_monotone_and_occupation_identity(bm):
    xs = np.linspace(-2, 2, 401)
    F = localtime.rogers_F(bm, xs)
    assert np.all(np.diff(F) >= 0) and F[0] == 0.0 and F[-1] == pytest.approx(1.0)
    h = 0.01
    levels = np.arange(-0.5, 0.5, h) + h / 2
    prof = localtime.occupation_profile(bm, None, levels, bandwidth=h)
    lhs = localtime.rogers_F(bm, 0.5) - localtime.rogers_F(bm, -0.5)
    assert prof.values.sum() * h == pytest.approx(lhs, abs=1e-12)


def test_occupation_field_monotone(bm):
    fld = localtime.occupation_field(bm, np.linspace(-1, 1, 21), record_every=2000)
    assert np.all(np.diff(fld.table, axis=0) >= -1e-15)
    assert np.all(np.diff(fld.table, axis=1) >= -1e-15)


def test_running_functionals_match_direct():
    p = gen_brownian(SeedSpec(8, 0), 1.0, 300)
    A, L = localtime.running_level_functionals(p)
    for k in (0, 1, 57, 300):
        head = p.truncate(p.time(k))
        assert A[k] == pytest.approx(localtime.occupation_below(head, None, p.values[k]), abs=1e-13)
        assert L[k] == pytest.approx(localtime.tanaka_local_time(head, p.values[k]), abs=1e-13)


def test_crossing_warns_at_low_resolution(bm):
    with pytest.warns(UserWarning):
        localtime.crossing_local_time(bm, 0.0, 0.01)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        localtime.crossing_local_time(bm, 0.0, 0.01, bridge=True)
    with pytest.warns(UserWarning):
        assert localtime.crossing_local_time(linear_path([3.0, 4.0]), 0.0, 0.1) == 0.0


def test_local_time_means():
    reps, n = 2000, 20_000
    tan, occ, brg = [], [], []
    for k in range(reps):
        p = gen_brownian(SeedSpec(31, k), 1.0, n)
        tan.append(localtime.tanaka_local_time(p, 0.0))
        occ.append(localtime.occupation_profile(p, None, [0.0], 0.02).values[0])
        brg.append(localtime.crossing_local_time(p, 0.0, 0.02, bridge=True))
    for est in (tan, occ, brg):
        assert abs(np.mean(est) / HALF_NORMAL_MEAN - 1) < 0.06


def test_crossing_error_shrinks_with_delta():
    gaps = {d: [] for d in (0.1, 0.05, 0.02)}
    for k in range(200):
        p = gen_brownian(SeedSpec(41, k), 1.0, 100_000)
        tan = localtime.tanaka_local_time(p, 0.0)
        for d in gaps:
            gaps[d].append(abs(localtime.crossing_local_time(p, 0.0, d, bridge=True) - tan))
    means = [np.mean(gaps[d]) for d in (0.1, 0.05, 0.02)]
    assert means[0] > means[1] > means[2]


def test_profile_F_diverges():
    p = gen_brownian(SeedSpec(51, 0), 1.0, 100_000)
    dx = 2.0**-9
    xs = -1.0 + dx * np.arange(int(2 / dx) + 1)
    F = dcdiag.SampledFunction(xs[0], dx, localtime.rogers_F(p, xs))
    v = dcdiag.dc_test(F, (-0.25, 0.25 - 2.0**-7), [2.0**-k for k in range(3, 8)])
    assert v.bounded == "diverging"
