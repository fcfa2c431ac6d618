import numpy as np
import pytest
from scipy import stats

from semidiag.errors import InvalidArgument, ResourceLimit
from semidiag.paths import (
    FBM_MAX_STEPS, SamplePath, SeedSpec, gen_brownian, gen_fbm, refine_brownian, reverse_path,
    shift_path,
)


def test_one_step_brownian_has_zero_start():
    p = gen_brownian(SeedSpec(1, 0), 1.0, 1)
    assert p.values.shape == (2,)
    assert p.values[0] == 0.0
    assert p.dt == 1.0


def test_same_seed_is_bit_identical():
    a = gen_brownian(SeedSpec(7, 3), 1.0, 1000)
    b = gen_brownian(SeedSpec(7, 3), 1.0, 1000)
    assert a.values.tobytes() == b.values.tobytes()
    c = gen_brownian(SeedSpec(7, 4), 1.0, 1000)
    assert not np.array_equal(a.values, c.values)


def test_terminal_variance_of_brownian():
    n = 100_000
    ends = np.array([gen_brownian(SeedSpec(11, k), 1.0, 1).values[-1] for k in range(n)])
    # chi-square interval for the sample variance at 99.9%
    lo, hi = stats.chi2.ppf([0.0005, 0.9995], n - 1) / (n - 1)
    assert lo < ends.var(ddof=1) < hi
    assert abs(ends.var(ddof=1) - 1.0) < 0.02


def test_brownian_scaling():
    s = SeedSpec(5, 0)
    a = gen_brownian(s, 1.0, 512)
    b = gen_brownian(s, 4.0, 512)
    np.testing.assert_allclose(b.values, 2.0 * a.values, rtol=1e-12, atol=1e-15)


def test_grid_times_are_exact():
    p = gen_brownian(SeedSpec(1, 1), 0.3, 1000)
    t = p.times
    k = np.arange(t.size)
    assert np.array_equal(t, p.t0 + k * p.dt)
    assert p.time(17) == p.t0 + 17 * p.dt


def test_argument_errors():
    with pytest.raises(InvalidArgument):
        gen_brownian(SeedSpec(1, 0), 0.0, 10)
    with pytest.raises(InvalidArgument):
        gen_brownian(SeedSpec(1, 0), 1.0, 0)
    with pytest.raises(InvalidArgument):
        gen_fbm(SeedSpec(1, 0), 1.0, 1.0, 10)
    with pytest.raises(ResourceLimit):
        gen_fbm(SeedSpec(1, 0), 0.3, 1.0, FBM_MAX_STEPS + 1)


def test_fbm_half_is_brownian_covariance():
    from semidiag.paths import fbm_covariance

    t = np.linspace(0.1, 1.0, 10)
    np.testing.assert_allclose(fbm_covariance(0.5, t), np.minimum.outer(t, t), atol=1e-15)


@pytest.mark.parametrize("hurst", [0.3, 0.7])
def test_fbm_moments(hurst):
    reps = 10_000
    xs = np.array([gen_fbm(SeedSpec(3, k), hurst, 1.0, 8).values[[4, 8]] for k in range(reps)])
    assert abs(xs[:, 1].var() - 1.0) < 0.05
    target = 0.5 * (0.5 ** (2 * hurst) + 1.0 - 0.5 ** (2 * hurst))
    assert abs(np.mean(xs[:, 0] * xs[:, 1]) - target) < 0.05


def test_shift_properties(bm):
    np.testing.assert_array_equal(shift_path(bm, 0.0).values, bm.values)
    flat = SamplePath(0.0, 0.1, np.full(11, 3.0))
    assert np.all(shift_path(flat, 0.5).values == 0.0)
    s, u = 40 * bm.dt, 70 * bm.dt
    twice = shift_path(shift_path(bm, s), u)
    once = shift_path(bm, 110 * bm.dt)
    np.testing.assert_allclose(twice.values, once.values, atol=1e-13)
    with pytest.raises(InvalidArgument):
        shift_path(bm, 0.5 * bm.dt)


def test_reverse_properties(bm):
    s = bm.t_end
    back = reverse_path(reverse_path(bm, s), s)
    np.testing.assert_allclose(np.diff(back.values), np.diff(bm.values), atol=1e-13)
    line = SamplePath(0.0, 0.25, 2.0 * np.arange(5) * 0.25)
    np.testing.assert_allclose(reverse_path(line, 1.0).values, -2.0 * np.arange(5) * 0.25)


def test_reversed_law_matches_brownian():
    ends_rev = np.array([reverse_path(gen_brownian(SeedSpec(9, k), 1.0, 16), 1.0).values[8]
                         for k in range(3000)])
    assert stats.kstest(ends_rev, "norm", args=(0.0, np.sqrt(0.5))).pvalue > 1e-3


def test_refine_keeps_coarse_points(bm):
    coarse = gen_brownian(SeedSpec(2, 0), 1.0, 50)
    fine = refine_brownian(coarse, 4, SeedSpec(2, 0))
    assert fine.n_steps == 200
    np.testing.assert_array_equal(fine.values[::4], coarse.values)


def test_refine_midpoint_is_bridge():
    path = SamplePath(0.0, 1.0, [0.0, 1.2])
    mids = np.array([refine_brownian(path, 2, SeedSpec(4, k)).values[1] for k in range(4000)])
    assert stats.kstest(mids, "norm", args=(0.6, 0.5)).pvalue > 1e-3


def test_refined_quadratic_variation():
    qv = [np.sum(np.diff(refine_brownian(gen_brownian(SeedSpec(6, k), 1.0, 16), 64,
                                         SeedSpec(6, k)).values) ** 2) for k in range(1000)]
    assert abs(np.mean(qv) - 1.0) < 0.05


def test_csv_round_trip(bm):
    text = bm.to_csv()
    assert text.startswith("k,t,value\n")
    back = SamplePath.from_csv(text)
    np.testing.assert_array_equal(back.values, bm.values)
