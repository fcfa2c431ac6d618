import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from semidiag import flow, variation
from semidiag.errors import InvalidArgument
from semidiag.paths import SamplePath, SeedSpec, gen_brownian

CANON = flow.PiecewiseLinearSigma.canonical()


def series(values, dt=1.0):
    return SamplePath(0.0, dt, np.asarray(values, dtype=float))


def test_small_cases():
    s = series([0, 1, 0, 1])
    assert variation.quadratic_variation(s, [0, 1, 2, 3]) == 3.0
    assert variation.quadratic_variation(series([2, 2, 2]), [0, 1, 2]) == 0.0
    assert variation.p_variation_sum(s, 2.0, [0, 1, 2, 3]) == 3.0
    mono = series([0, 0.5, 0.7, 2.0])
    assert variation.p_variation_sum(mono, 1.0, [0, 1, 2, 3]) == pytest.approx(2.0)
    assert variation.total_variation(mono) == pytest.approx(2.0)
    with pytest.raises(InvalidArgument):
        variation.quadratic_variation(s, [0, 1.5, 3])
    with pytest.raises(InvalidArgument):
        variation.p_variation_sum(s, 0.5, [0, 3])


def test_slope_series_total_variation():
    x = np.linspace(0, 1, 1001)
    assert variation.total_variation(series(2 * x, 0.001)) == pytest.approx(2.0)


def test_brownian_quadratic_variation_ladder():
    finest = []
    for k in range(20):
        b = gen_brownian(SeedSpec(60, k), 1.0, 2**14)
        lad = variation.PartitionLadder.dyadic(0, 1, [4, 6, 8, 10])
        finest.append(variation.ladder_report(b, 2.0, lad).values[-1])
    assert abs(np.mean(finest) - 1.0) < 0.05


def test_cubic_variation_vanishes():
    b = gen_brownian(SeedSpec(61, 0), 1.0, 2**14)
    rep = variation.ladder_report(b, 3.0, variation.PartitionLadder.dyadic(0, 1, [4, 7, 10, 13]))
    assert rep.verdict == "decreasing"
    assert rep.to_csv().splitlines()[-1] == "# verdict decreasing"


@settings(max_examples=50, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), p=st.floats(1.0, 3.0), q=st.floats(1.0, 3.0))
def test_p_monotonicity(seed, p, q):
    rng = np.random.default_rng(seed)
    s = series(np.cumsum(rng.uniform(-1, 1, 50)))
    part = np.arange(50)
    lo, hi = sorted((p, q))
    assert variation.p_variation_sum(s, hi, part) <= variation.p_variation_sum(s, lo, part) + 1e-12


@settings(max_examples=50, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_triangle_property(seed):
    rng = np.random.default_rng(seed)
    y, w = rng.standard_normal((2, 40)).cumsum(axis=1)
    part = np.arange(40)
    Q = lambda v: np.sqrt(variation.quadratic_variation(series(v), part))
    assert abs(Q(y) - Q(w)) <= Q(y - w) + 1e-12


def test_trend_verdicts():
    assert variation.trend_verdict([1, 1.3, 1.7], grow=1.2) == "increasing"
    assert variation.trend_verdict([1, 0.5, 0.2]) == "decreasing"
    assert variation.trend_verdict([1, 2, 1]) == "flat"
    np.testing.assert_array_equal(variation.growth_ratios([0, 0, 1]), [1.0, np.inf])


@pytest.fixture(scope="module")
def field():
    d = gen_brownian(SeedSpec(606, 0), 1.0, 20_000)
    return flow.simulate_flow(CANON, np.linspace(0.3, 0.7, 401), d, record_every=20_000)


def test_space_qv_formula_properties(field):
    _, whole = variation.space_qv_Z(field, 0.3, 0.7)
    left = variation.space_qv_formula(field, 0.3, 0.5)
    right = variation.space_qv_formula(field, 0.5, 0.7)
    assert whole >= 0
    assert left + right == pytest.approx(whole, rel=1e-12, abs=1e-15)
    emp, form = variation.space_qv_Z(field, 0.3, 0.7)
    assert abs(emp - form) <= 0.25 * form


def test_space_qv_zero_away_from_kink():
    d = gen_brownian(SeedSpec(606, 1), 0.01, 1000)
    f = flow.simulate_flow(CANON, np.linspace(0.05, 0.1, 51), d, record_every=1000)
    emp, form = variation.space_qv_Z(f, 0.05, 0.1)
    assert form == 0.0 and emp < 1e-20


def test_space_qv_dprime_nonnegative(field):
    Dp = variation.space_series(field, "Dprime")
    rep = variation.space_qv_Dprime(field, 0.3, 0.7, variation.PartitionLadder.from_steps(Dp, [40, 10, 1]))
    assert np.all(rep.values >= 0) and np.all(rep.formula >= 0)


def test_chain_check_trivial_maps():
    b = gen_brownian(SeedSpec(62, 0), 1.0, 4096)
    lad = variation.PartitionLadder.dyadic(0, 1, [6, 9, 12])
    ident = variation.space_qv_chain_check(b, lambda u: u, lambda u: np.ones_like(u), lad)
    np.testing.assert_allclose(ident.values, ident.formula, rtol=1e-12)
    const = variation.space_qv_chain_check(b, lambda u: np.full_like(u, 3.0), np.zeros_like, lad)
    assert np.all(const.values == 0) and np.all(const.formula == 0)
    sq = variation.space_qv_chain_check(b, np.square, lambda u: 2 * u, lad)
    assert sq.values[-1] == pytest.approx(sq.formula[-1], rel=0.1)


def test_rogers_pvariation_p2_decreasing():
    paths = [gen_brownian(SeedSpec(505, k), 1.0, 2**16) for k in range(3)]
    lad = variation.PartitionLadder.dyadic(0, 1, [4, 6, 8, 10])
    out = variation.rogers_pvariation(paths, [2.0], lad)
    assert sum(r.verdict == "decreasing" for r in out[2.0]) >= 2


def test_mesh_probe():
    d = gen_brownian(SeedSpec(63, 0), 1.0, 4096)
    zero = variation.mesh_condition_probe(lambda u, v: 0.0 * u, d, [256, 16])
    assert np.all(zero.hypothesis == 0) and np.all(zero.conclusion == 0)
    probe = variation.mesh_condition_probe(lambda u, v: u - v, d, [1024, 256, 64, 16])
    # left Riemann sum of (u - t_i)^2 over each cell of m steps
    m = np.array([1024, 256, 64, 16])
    exact = (4096 / m) * d.dt**3 * (m - 1) * m * (2 * m - 1) / 6
    np.testing.assert_allclose(probe.hypothesis, exact, rtol=1e-12)
    assert np.all(np.diff(probe.hypothesis) < 0)
