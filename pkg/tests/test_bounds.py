import csv
import io
import math
from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from dimlab import errors as E
from dimlab.bounds import (aggregation_J, covering_fat_bound, dual_dist_chain, expectation_pac_bound,
                           expectation_regret_bound, fat_pac_bound, gc_expectation_bound,
                           gc_rademacher_bound, grid_csv, littlestone_regret, log_covering_fat_bound,
                           regret_bounds, sigmod_baseline, vc_rademacher)

inv_e = 1 / math.e


def test_fat_pac():
    assert fat_pac_bound(1, inv_e, inv_e) == pytest.approx(2 * math.e ** 2)
    assert fat_pac_bound(2, 0.1, 0.1) > fat_pac_bound(1, 0.1, 0.1)
    assert fat_pac_bound(1, 0.05, 0.1) > fat_pac_bound(1, 0.1, 0.1)
    with pytest.raises(E.BadRange):
        fat_pac_bound(1, 0, 0.5)


def test_expectation_pac():
    assert expectation_pac_bound(1, inv_e, inv_e, kind="concept") == pytest.approx(2 * math.e ** 2)
    for d in (1, 3, 10):
        for eps in (0.05, 0.1, 0.3, 0.5):
            assert expectation_pac_bound(d, eps, 0.1) >= expectation_pac_bound(d, eps, 0.1, kind="concept")
    with pytest.raises(E.BadRange):
        expectation_pac_bound(1, 0.1, 0.1, kind="other")


def test_expectation_pac_beats_baseline_scaling():
    # growth between two small eps at lambda = d* = 3
    e1, e2 = 0.01, 0.001
    ours = math.log(expectation_pac_bound(3, e2, 0.1, kind="concept") / expectation_pac_bound(3, e1, 0.1, kind="concept"))
    base = math.log(sigmod_baseline(3, e2) / sigmod_baseline(3, e1))
    assert ours < base


def test_gc_rademacher():
    eps, conf = gc_rademacher_bound(200, 0, 0.1)
    assert eps == pytest.approx(0.1) and conf == pytest.approx(math.exp(-1))
    assert gc_rademacher_bound(400, 0, 0.1)[1] < conf
    assert gc_rademacher_bound(200, 10, 0.2)[0] - gc_rademacher_bound(200, 10, 0.1)[0] == pytest.approx(0.1)


def test_gc_expectation():
    assert gc_expectation_bound(100, 0.1, 0.01) == pytest.approx(100 + 800 * math.log(100))
    assert gc_expectation_bound(100, 0.1, 0.01) == pytest.approx(3784.1, abs=0.05)
    assert gc_expectation_bound(7, 0.3, 1) == 7
    a, b = gc_expectation_bound(10, 0.2, 0.1), gc_expectation_bound(20, 0.2, 0.1)
    assert b - a == pytest.approx(10)


def test_vc_rademacher():
    assert vc_rademacher(1, 3) == pytest.approx(2 * math.sqrt(3 * math.log(4)))
    assert vc_rademacher(0, 5) == 0
    ratios = [vc_rademacher(2, n) / n for n in (10, 100, 1000, 10000)]
    assert ratios == sorted(ratios, reverse=True)


def test_covering_fat_bound():
    for d in (1, 2, 3):
        vals = [covering_fat_bound(d, 0.5, n) for n in (4, 8, 16)]
        assert all(v >= 2 for v in vals)
        assert vals == sorted(vals)
    assert math.isinf(covering_fat_bound(20, 0.01, 10 ** 6))
    assert log_covering_fat_bound(20, 0.01, 10 ** 6) > 700
    with pytest.raises(E.BadRange):
        covering_fat_bound(1, 0, 4)


def test_regret_bounds_examples():
    lo, _ = regret_bounds({1: 0}, 10)
    assert lo == 0
    lo, hi = regret_bounds({F(1, 2): 1}, 100)
    assert lo == pytest.approx(10 / (4 * math.sqrt(2)))
    assert lo == pytest.approx(1.7678, abs=1e-4)
    assert hi >= lo
    with pytest.raises(E.BadTable):
        regret_bounds({}, 5)


@settings(max_examples=60, deadline=None)
@given(st.dictionaries(st.sampled_from([F(1, 8), F(1, 4), F(1, 2), F(1)]), st.integers(0, 6), min_size=1),
       st.integers(1, 500))
def test_regret_upper_dominates_lower(table, T):
    ks = sorted(table)
    # sequential fat dimension is non-increasing in gamma
    vals = sorted(table.values(), reverse=True)
    table = dict(zip(ks, vals))
    lo, hi = regret_bounds(table, T)
    assert hi >= lo >= 0


def test_expectation_regret():
    assert expectation_regret_bound(3, 1, 7) == 28
    want = 16 + 6 * math.sqrt(8 * math.log(32 * math.e))
    assert expectation_regret_bound(1, 0.5, 8) == pytest.approx(want)
    assert expectation_regret_bound(0, 0.01, 50) == pytest.approx(4 * 0.01 * 50)


def test_littlestone_regret():
    assert littlestone_regret(0, 10) == 0
    assert littlestone_regret(4, 9) == 6
    assert littlestone_regret(5, 9) > littlestone_regret(4, 9) and littlestone_regret(4, 10) > 6


def test_aggregation_J():
    assert aggregation_J(1, 1) == pytest.approx(25 * math.log(90) ** 2)
    assert aggregation_J(1, 1) == pytest.approx(506.2, abs=0.05)
    assert aggregation_J(7, 3, "quadratic") / aggregation_J(7, 3) == pytest.approx(7)
    assert aggregation_J(2, 4) > aggregation_J(2, 3)


def test_dual_dist_chain():
    r = dual_dist_chain(1, 1, 0.5)
    assert r.stages["n_k"] == pytest.approx(4)
    assert dual_dist_chain(1, 1, 0.25).stages["n_k"] == pytest.approx(16)
    for g in (0.05, 0.1, 0.5, 0.9):
        for d in (1, 5):
            assert math.isfinite(dual_dist_chain(d, 2, g).value)
    js = r.to_json()
    assert set(js["stages"]) == {"n_k", "J", "final"}


def test_sigmod_baseline():
    assert sigmod_baseline(1, 0.1) == pytest.approx(100)
    assert sigmod_baseline(0, 0.2) == pytest.approx(5)
    # the chain's final bound grows like eps^-4 ln^2(1/eps), so only
    # lambda >= 4 outgrows it
    for lam in (4, 5):
        g1, g2 = 0.01, 0.001
        base = sigmod_baseline(lam, g2) / sigmod_baseline(lam, g1)
        ours = dual_dist_chain(1, 1, g2).value / dual_dist_chain(1, 1, g1).value
        assert base > ours


def test_grid_csv():
    text = grid_csv(littlestone_regret, {"d": [1, 4], "T": [9, 16]})
    rows = list(csv.reader(io.StringIO(text)))
    assert rows[0] == ["d", "T", "value"]
    assert len(rows) == 5
    assert float(rows[4][2]) == pytest.approx(8)
    text = grid_csv(fat_pac_bound, {"dim": [1], "eps": [0.5, 2], "delta": [0.1]})
    assert "NA" in text
