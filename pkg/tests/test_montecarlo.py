import numpy as np

from semidiag.montecarlo import map_replicates, stable_mean, stable_mean_se
from semidiag.paths import gen_brownian


def test_thread_count_does_not_change_results():
    f = lambda s: gen_brownian(s, 1.0, 100).values[-1]
    one = map_replicates(f, 3, 16, threads=1)
    many = map_replicates(f, 3, 16, threads=4)
    assert np.array_equal(one, many)


def test_stable_mean_is_order_independent():
    v = np.array([1e16, 1.0, -1e16, 3.0])
    assert stable_mean(v) == stable_mean(v[::-1]) == 1.0
    m, se = stable_mean_se([1.0, 2.0, 3.0])
    assert m == 2.0 and se > 0
