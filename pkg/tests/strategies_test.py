#
"""
Test GC victim selection strategies
"""
import math

import pytest

from ftlsim.core import INF, ConfigError, UnknownBlockError
from ftlsim.flash import DeviceGeometry, create_device
from ftlsim.gc import (cb_value, cat_value, cat_age_norm, cwa_value,
    fastcb_shift_time, parse_strategy, strategy_label, make_selector,
    STRATEGIES, FastCostBenefitSelector, ApproxCostBenefitSelector)


class Rig(object):
    """One channel device driving a single selector by hand"""
    def __init__(self, strategy, blocks=32, n_p=8):
        geom = DeviceGeometry(1, blocks, n_p, logical_pages=blocks * n_p,
            op_factor=1.0)
        self.dev = create_device(geom)
        self.sel = make_selector(strategy, self.dev, 0)
        self.dev.attach(0, self.sel)
        self.n_p = n_p
        self._lpa = 0

    def fill(self, block_id, now=0):
        self.dev.open_block(block_id)
        for page in range(self.n_p):
            self.dev.write_physical(self.dev.ppa(block_id, page), self._lpa,
                now)
            self._lpa += 1
        return block_id

    def invalidate(self, block_id, count, now):
        for ppa, _ in self.dev.valid_pages(block_id)[:count]:
            self.dev.invalidate(ppa, now)

    def set_valid(self, block_id, valid, now):
        self.invalidate(block_id, self.dev.blocks[block_id].valid_count - valid,
            now)

    def select(self, now):
        return self.sel.select_victim(now)


#-- scores ---------------------------------------------------------------

def test_cb_value_threshold_example():
    value = cb_value(115, 256, 24469)
    assert value > 15000
    assert abs(round(value) - 15001) <= 1
    assert cb_value(115, 256, 24468) < 15000


def test_cb_value():
    assert cb_value(1, 4, 10) == 15.0
    assert cb_value(256, 256, 1000) == 0.0
    assert cb_value(0, 4, 0) == INF


def test_cat_value():
    assert cat_age_norm(9) == 4
    assert cat_age_norm(0) == 1
    assert cat_value(1, 4, 9, 1) == 6.0
    assert cat_value(4, 4, 9, 0) == 0.0
    assert cat_value(0, 4, 9, 3) == INF


def test_cwa_value():
    assert cwa_value(2, 1 + 3, 10) == 16
    assert cwa_value(0, 0, 99) == 0
    assert cwa_value(1, 7, 7) == 0


#-- greedy, fifo, age threshold --------------------------------------------

@pytest.mark.parametrize('strategy', ['greedy', 'const-greedy'])
def test_greedy_min_valid(strategy):
    rig = Rig(strategy, n_p=10)
    for b, v in ((1, 5), (2, 2), (3, 9)):
        rig.fill(b)
        rig.set_valid(b, v, now=1)
    assert rig.select(2) == 2
    assert rig.sel.scan_cost_last_selection == 1


@pytest.mark.parametrize('strategy', ['greedy', 'const-greedy'])
def test_greedy_ties_and_free_blocks(strategy):
    rig = Rig(strategy, n_p=4)
    for b in (1, 2):
        rig.fill(b)
        rig.set_valid(b, 3, now=1)
    assert rig.select(2) == 1

    rig = Rig(strategy, n_p=4)
    rig.fill(1)
    rig.set_valid(1, 0, now=1)
    rig.fill(2)
    rig.set_valid(2, 1, now=1)
    assert rig.select(2) == 1


@pytest.mark.parametrize('strategy', ['greedy', 'const-greedy', 'fifo', 'cb',
    'fastcb', 'approxcb:qabs=2'])
def test_empty_selector_returns_none(strategy):
    rig = Rig(strategy)
    assert rig.select(0) is None
    assert rig.sel.scan_cost_last_selection == 0


def test_const_greedy_bucket_order_follows_block_id():
    rig = Rig('const-greedy', n_p=4)
    for b in (7, 3, 9, 5):
        rig.fill(b)
    for b in (9, 3, 7, 5):
        rig.set_valid(b, 2, now=1)
    rig.sel.on_block_erased(3)
    assert [rig.select(2) for _ in range(4)] == [5, 7, 9, None]
    assert len(rig.sel) == 0


def test_greedy_unknown_block():
    rig = Rig('greedy')
    with pytest.raises(UnknownBlockError):
        rig.sel.on_page_invalidated(5, 1)


def test_fifo_order():
    rig = Rig('fifo')
    rig.fill(3, now=1)
    rig.fill(1, now=2)
    rig.set_valid(1, 0, now=3)
    assert rig.select(4) == 3
    rig.sel.on_block_erased(3)
    assert rig.select(4) == 1
    assert rig.select(4) is None


def test_age_threshold_filters_young_blocks():
    rig = Rig('age-threshold:tau=50', n_p=10)
    rig.fill(1, now=0)
    rig.set_valid(1, 9, now=1)
    rig.fill(2, now=95)
    rig.set_valid(2, 1, now=96)
    assert rig.select(100) == 1
    assert rig.sel.scan_cost_last_selection == 2


def test_age_threshold_fallback():
    rig = Rig('age-threshold:tau=1000', n_p=10)
    rig.fill(1, now=0)
    rig.set_valid(1, 9, now=1)
    rig.fill(2, now=5)
    rig.set_valid(2, 1, now=6)
    assert rig.select(100) == 2


def test_age_threshold_zero_is_greedy():
    a = Rig('age-threshold:tau=0', n_p=10)
    g = Rig('greedy', n_p=10)
    for rig in (a, g):
        for b, v in ((0, 7), (1, 3), (2, 3), (3, 8)):
            rig.fill(b, now=0)
            rig.set_valid(b, v, now=1)
    assert [a.select(10) for _ in range(4)] == [g.select(10) for _ in range(4)]


def test_age_threshold_zero_admits_fresh_blocks():
    a = Rig('age-threshold:tau=0', n_p=8)
    g = Rig('greedy', n_p=8)
    for rig in (a, g):
        rig.fill(0, now=5)
        rig.fill(1, now=1)
    assert g.select(5) == 0
    assert a.select(5) == 0


def test_age_threshold_boundary_is_inclusive():
    rig = Rig('age-threshold:tau=10', n_p=8)
    rig.fill(0, now=0)
    rig.fill(1, now=10)
    rig.set_valid(1, 2, now=11)
    rig.set_valid(0, 6, now=12)
    assert rig.select(20) == 1


#-- full scan maximizers ---------------------------------------------------

def test_cb_linear_scan():
    rig = Rig('cb', n_p=4)
    rig.fill(0)
    rig.set_valid(0, 1, now=0)
    rig.fill(1)
    rig.set_valid(1, 3, now=0)
    # 15 vs 5/3 at age 10
    assert rig.select(10) == 0
    assert rig.sel.scan_cost_last_selection == 2


def test_cb_ties_and_free_blocks():
    rig = Rig('cb', n_p=4)
    for b in (4, 2, 7):
        rig.fill(b)
        rig.set_valid(b, 2, now=0)
    assert rig.select(10) == 2
    rig.set_valid(7, 0, now=10)
    assert rig.select(10) == 7


def test_cat_prefers_less_worn_blocks():
    rig = Rig('cat', n_p=4)
    for b in (0, 1):
        rig.fill(b, now=0)
        rig.set_valid(b, 1, now=1)
    rig.dev.blocks[0].erase_count = 3
    assert rig.select(9) == 1


def test_fegc_sums_invalid_ages():
    rig = Rig('fegc', n_p=4)
    rig.fill(0, now=0)
    rig.invalidate(0, 2, now=1)
    rig.fill(1, now=0)
    rig.invalidate(1, 3, now=8)
    # (10-1)*2 = 18 vs (10-8)*3 = 6
    assert rig.select(10) == 0


def test_scores_scale_free():
    """Dropping the constant 1/2 of the CB value keeps every argmax"""
    values = [(cb_value(v, 16, age), b) for b, (v, age) in
        enumerate([(3, 10), (5, 40), (1, 2), (8, 100), (2, 9)])]
    doubled = [(2.0 * s, b) for s, b in values]
    assert max(values)[1] == max(doubled)[1]


#-- fast cost-benefit ------------------------------------------------------

def test_fastcb_shift_time_example():
    assert fastcb_shift_time(115, 256, 0, 15000.0) == 24469
    assert fastcb_shift_time(115, 256, 100, 15000.0) == 24569
    assert fastcb_shift_time(256, 256, 0, 15000.0) == INF
    assert fastcb_shift_time(0, 256, 33, 15000.0) == 33
    assert fastcb_shift_time(0, 256, 33, INF) == 33
    assert fastcb_shift_time(10, 256, 33, 0.0) == 33


def test_fastcb_shift_time_is_least():
    for valid in (1, 5, 37, 100, 255):
        for t_cb in (0.5, 3.0, 97.25, 15000.0, 1e6 / 3):
            t = fastcb_shift_time(valid, 256, 0, t_cb)
            assert cb_value(valid, 256, t) >= t_cb
            assert t == 0 or cb_value(valid, 256, t - 1) < t_cb


def test_fastcb_single_block():
    rig = Rig('fastcb')
    rig.fill(4)
    assert rig.select(1) == 4
    assert len(rig.sel) == 0


def overflow_rig():
    """30 blocks at utilization 1/2, block i last invalidated at i + 1"""
    rig = Rig('fastcb:t0=20,c0=5', blocks=32, n_p=8)
    for b in range(30):
        rig.fill(b, now=0)
    for b in range(30):
        rig.set_valid(b, 4, now=b + 1)
    return rig


def test_fastcb_overflow_then_empty_rebuild():
    rig = overflow_rig()
    sel = rig.sel
    assert rig.select(100) == 0
    assert sel.rebuild_overflow == 1
    assert sel.scan_cost_last_selection == 30
    assert sel.t_cb == (100 - 5) / 2.0
    assert sel.class0 == {1, 2, 3, 4}

    for b in (1, 2, 3, 4):
        assert rig.select(100) == b
        assert sel.scan_cost_last_selection <= 4
    assert sel.rebuild_empty == 0

    assert rig.select(100) == 5
    assert sel.rebuild_empty == 1
    assert sel.scan_cost_last_selection == 25
    assert len(sel.class0) == 4


def test_fastcb_lazy_promotion():
    rig = overflow_rig()
    sel = rig.sel
    for _ in range(5):
        rig.select(100)
    # block 5 reaches t_cb = 47.5 at time 101
    assert sel.class1_key(5) is not None
    assert rig.select(101) == 5
    assert sel.rebuild_empty == 0


def test_fastcb_invalidation_moves_to_class1():
    rig = overflow_rig()
    sel = rig.sel
    rig.select(100)
    assert 2 in sel.class0
    rig.invalidate(2, 1, now=100)
    assert 2 not in sel.class0
    assert 2 in sel.class1


def test_fastcb_class1_key_changes():
    rig = Rig('fastcb', n_p=8)
    rig.sel.t_cb = 10.0
    rig.fill(0, now=0)
    rig.invalidate(0, 1, now=5)
    k1 = rig.sel.class1_key(0)
    rig.invalidate(0, 1, now=6)
    k2 = rig.sel.class1_key(0)
    assert k1 != k2
    assert k2 // rig.sel.time_factor == fastcb_shift_time(6, 8, 6, 10.0)


def test_fastcb_key_collisions():
    rig = Rig('fastcb', n_p=8)
    sel = rig.sel
    sel.t_cb = 10.0
    for b in (0, 1, 2):
        rig.fill(b, now=0)
        rig.invalidate(b, 2, now=5)
    keys = [sel.class1_key(b) for b in (0, 1, 2)]
    assert keys[1] == keys[0] + 1
    assert keys[2] == keys[0] + 2
    assert len(set(k // sel.time_factor for k in keys)) == 1


def test_fastcb_collision_overflow():
    rig = Rig('fastcb:time_factor=2', n_p=8)
    rig.sel.t_cb = 10.0
    for b in (0, 1):
        rig.fill(b, now=0)
        rig.invalidate(b, 2, now=5)
    rig.fill(2, now=0)
    with pytest.raises(ConfigError):
        rig.invalidate(2, 2, now=5)


def test_fastcb_full_block_never_due():
    rig = Rig('fastcb:t0=2,c0=1', n_p=4)
    for b in range(4):
        rig.fill(b, now=0)
        rig.set_valid(b, 2, now=b)
    rig.fill(5, now=0)
    order = [rig.select(50) for _ in range(5)]
    # the fully valid block scores 0 and comes last
    assert order == [0, 1, 2, 3, 5]


def test_fastcb_bad_params():
    rig = Rig('greedy')
    with pytest.raises(ConfigError):
        FastCostBenefitSelector(rig.dev, 0, t0=5, c0=10)
    with pytest.raises(ConfigError):
        FastCostBenefitSelector(rig.dev, 0, nope=1)


#-- approximative cost-benefit ---------------------------------------------

def ten_blocks(strategy):
    rig = Rig(strategy, blocks=16, n_p=8)
    for b in range(10):
        rig.fill(b, now=0)
        rig.set_valid(b, 4, now=b + 1)
    return rig


def test_approxcb_cache_scan():
    rig = ten_blocks('approxcb:qabs=3')
    sel = rig.sel
    assert rig.select(50) == 0
    assert sel.scan_cost_last_selection == 10
    assert sel.refills == 1
    assert sel.cache == {1, 2}
    # blocks outside the cache are ignored until the next refill
    rig.set_valid(9, 0, now=50)
    assert rig.select(50) == 1
    assert sel.scan_cost_last_selection == 2
    assert rig.select(50) == 2
    assert sel.scan_cost_last_selection == 1
    assert rig.select(50) == 9
    assert sel.refills == 2
    assert sel.refill_scan == 17
    assert sel.cache_scan == 3


def test_approxcb_cached_block_freed():
    rig = ten_blocks('approxcb:qabs=3')
    rig.select(50)
    rig.set_valid(2, 0, now=50)
    assert rig.select(50) == 2


def test_approxcb_cache_size_from_percent():
    rig = ten_blocks('approxcb:q=25%')
    assert rig.sel.cache_size() == 2
    rig = ten_blocks('approxcb:q=0.1%')
    assert rig.sel.cache_size() == 1


def test_approxcb_requires_size():
    rig = Rig('greedy')
    with pytest.raises(ConfigError):
        ApproxCostBenefitSelector(rig.dev, 0)
    with pytest.raises(ConfigError):
        ApproxCostBenefitSelector(rig.dev, 0, q=0.0)


#-- strategy specs ---------------------------------------------------------

def test_parse_strategy():
    assert parse_strategy('fastcb') == ('fastcb', {})
    assert parse_strategy('approxcb:q=1%') == ('approxcb', {'q': 1.0})
    assert parse_strategy('approxcb:qabs=1') == ('approxcb', {'qabs': 1})
    assert parse_strategy(' FastCB:t0=50, c0=10 ') == ('fastcb',
        {'t0': 50, 'c0': 10})
    assert strategy_label('approxcb:q=25') == 'approxcb:q=25.0%'
    assert sorted(STRATEGIES) == ['age-threshold', 'approxcb', 'cat', 'cb',
        'const-greedy', 'fastcb', 'fegc', 'fifo', 'greedy']


@pytest.mark.parametrize('text', ['lru', 'approxcb', 'age-threshold',
    'cb:q=1', 'fastcb:t0=x', 'fastcb:t0'])
def test_parse_strategy_errors(text):
    with pytest.raises(ConfigError):
        parse_strategy(text)
