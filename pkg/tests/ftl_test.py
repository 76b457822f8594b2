#
"""
Test the page-mapped FTL
"""
import numpy as np
import pytest

from ftlsim import gc
from ftlsim.core import ConfigError, DeviceWedged, FtlSimError
from ftlsim.flash import DeviceGeometry, BlockState
from ftlsim.ftl import FtlConfig, Ftl, simulate
from ftlsim.gc import VictimSelector
from ftlsim.workload import (WriteRequest, HotnessMap, UniformSpec,
    UniformWorkload, parse_workload_spec)

GEOM = DeviceGeometry(1, 32, 8, logical_pages=100)


def make_ftl(geometry=GEOM, hotness=None, **kwargs):
    kwargs.setdefault('hotness_levels', 1)
    kwargs.setdefault('warm_up', False)
    return Ftl(FtlConfig(geometry=geometry, **kwargs), hotness)


def total_inv(ftl):
    return sum(m.inv_count for m in ftl.device.blocks)


def test_config_defaults_and_errors():
    cfg = FtlConfig(geometry=GEOM)
    assert cfg.gc_low_watermark == 4
    assert cfg.strategy == 'greedy'
    with pytest.raises(ConfigError):
        FtlConfig(geometry=GEOM, colour='blue')
    with pytest.raises(ConfigError):
        FtlConfig(geometry=GEOM, validate=1)
    with pytest.raises(ConfigError):
        FtlConfig(geometry=GEOM, gc_low_watermark=3)
    with pytest.raises(ConfigError):
        FtlConfig(geometry=GEOM, strategy='lru')
    with pytest.raises(ConfigError):
        FtlConfig(geometry=DeviceGeometry(1, 6, 8, logical_pages=40))
    with pytest.raises(ConfigError):
        FtlConfig(geometry=None)


def test_config_rejects_thin_channel_spare():
    with pytest.raises(ConfigError) as e:
        FtlConfig(geometry=DeviceGeometry(4, 64, 16, op_factor=1.07))
    assert "67 spare pages per channel" in str(e.value)
    assert "128 needed" in str(e.value)
    FtlConfig(geometry=DeviceGeometry(4, 64, 16, op_factor=1.25))
    # fewer hotness levels shrink the reserve
    FtlConfig(geometry=DeviceGeometry(4, 64, 16, op_factor=1.07),
        hotness_levels=1)


def test_first_write_and_overwrite():
    ftl = make_ftl()
    ftl.host_write(7)
    assert total_inv(ftl) == 0
    assert ftl.device.programs == 1
    ftl.host_write(7)
    assert total_inv(ftl) == 1
    assert ftl.device.programs == 2
    assert ftl.clock.now == 2


def test_lpa_out_of_range():
    ftl = make_ftl()
    with pytest.raises(FtlSimError):
        ftl.host_write(100)


def test_one_block_per_n_p_writes():
    ftl = make_ftl()
    for lpa in range(8):
        ftl.host_write(lpa)
    states = ftl.device.count_states()
    assert states[BlockState.USED] == 1
    assert states[BlockState.ACTIVE] == 0
    ftl.host_write(8)
    assert ftl.device.count_states()[BlockState.ACTIVE] == 1


def test_round_robin_channels():
    geom = DeviceGeometry(2, 16, 8, logical_pages=100)
    ftl = make_ftl(geom)
    for lpa in range(4):
        ftl.host_write(lpa)
    channels = [ftl.device.decode(ftl.device.mapping.lookup(lpa))[0]
        for lpa in range(4)]
    assert channels == [0, 1, 0, 1]


def test_gc_cycle_free_victim():
    ftl = make_ftl()
    for lpa in range(8):
        ftl.host_write(lpa)
    for lpa in range(8):
        ftl.host_write(lpa)
    victim = ftl.device.blocks[0]
    assert victim.valid_count == 0
    ftl.gc_cycle(0)
    rec = ftl.recorder
    assert rec.gc_copy_writes == 0
    assert rec.gc_count == 1
    assert victim.state is BlockState.CLEAN
    assert victim.erase_count == 1


def test_gc_cycle_copies_valid_pages():
    ftl = make_ftl(trace_victims=True)
    for lpa in range(16):
        ftl.host_write(lpa)
    for lpa in (0, 1, 2, 8):
        ftl.host_write(lpa)
    # block 0 holds 5 valid pages, block 1 holds 7
    ftl.gc_cycle(0)
    rec = ftl.recorder
    assert rec.victims[0].block_id == 0
    assert rec.victims[0].valid_count == 5
    assert rec.gc_copy_writes == 5
    for lpa in range(16):
        assert ftl.device.mapping.lookup(lpa) is not None
    assert ftl.clock.now == 20
    ftl.check_conservation()


def test_copies_keep_hotness():
    levels = np.array([i % 3 for i in range(300)], dtype=np.int64)
    hotness = HotnessMap(levels, np.ones(300, dtype=np.int64), 3)
    geom = DeviceGeometry(1, 64, 8, logical_pages=300)
    ftl = make_ftl(geom, hotness, hotness_levels=3, strategy='cb', debug=True)
    rng = np.random.default_rng(3)
    for lpa in rng.integers(0, 300, size=3000).tolist():
        ftl.host_write(lpa)
    assert ftl.recorder.gc_copy_writes > 0
    for meta in ftl.device.blocks:
        for _, lpa in ftl.device.valid_pages(meta.block_id):
            assert hotness[lpa] == meta.hotness


def test_warm_up_counts():
    ftl = make_ftl(warm_up=True)
    scalars = ftl.warm_up()
    assert scalars['host_page_writes'] == 300
    assert ftl.clock.now == 300
    assert ftl.recorder.host_page_writes == 0
    assert len(ftl.device.mapping) == 100


def test_warm_up_deterministic():
    a = make_ftl(rng_seed=11)
    b = make_ftl(rng_seed=11)
    a.warm_up()
    b.warm_up()
    assert a.device.mapping.forward == b.device.mapping.forward
    assert [m.erase_count for m in a.device.blocks] == \
        [m.erase_count for m in b.device.blocks]


def test_no_warm_up_starts_empty():
    ftl = make_ftl()
    report = ftl.run([])
    assert len(ftl.device.mapping) == 0
    assert report.host_page_writes == 0
    assert report.wa_final == 1.0
    assert report.wa_defined is False


def test_request_split_and_drop():
    ftl = make_ftl()
    reqs = [
        WriteRequest(0, 4096, 10240),
        WriteRequest(1, 4096 * 200, 4096),
        WriteRequest(2, 4096 * 99, 8192),
    ]
    report = ftl.run(reqs)
    assert report.host_page_writes == 4
    assert report.dropped_requests == 1
    assert report.dropped_pages == 2
    for lpa in (1, 2, 3, 99):
        assert ftl.device.mapping.lookup(lpa) is not None


def test_progress_and_conservation():
    geom = DeviceGeometry(2, 32, 8, logical_pages=300)
    cfg = FtlConfig(geometry=geom, strategy='fastcb', hotness_levels=3,
        rng_seed=5)
    wl = UniformWorkload(UniformSpec(3000, 1), 300, seed=5)
    ftl = Ftl(cfg)
    report = ftl.run(wl, window=100)
    for ch in range(2):
        assert len(ftl.clean[ch]) >= cfg.gc_low_watermark - 1
    assert ftl.device.programs == ftl.host_writes_total + ftl.gc_copies_total
    assert report.wa_final >= 1.0
    assert report.warmup['host_page_writes'] == 900
    assert report.host_page_writes == 3000


class NeverSelector(VictimSelector):
    name = 'never'

    def on_block_full(self, block_id, now):
        pass

    def on_page_invalidated(self, block_id, now):
        pass

    def on_block_erased(self, block_id):
        pass

    def select_victim(self, now):
        return self._finish(None, 0)

    def __len__(self):
        return 0


def test_device_wedged(monkeypatch):
    monkeypatch.setitem(gc.STRATEGIES, 'never', NeverSelector)
    ftl = make_ftl(strategy='never')
    with pytest.raises(DeviceWedged):
        for lpa in list(range(100)) * 3:
            ftl.host_write(lpa)


def test_simulate_deterministic():
    geom = DeviceGeometry(1, 64, 8, logical_pages=320)
    cfg = FtlConfig(geometry=geom, strategy='cb', rng_seed=2)
    def run():
        wl = parse_workload_spec("hotspot:writes=4x,regions=0.2/0.8+0.8/0.2",
            320, seed=2)
        return simulate(cfg, wl)
    a, b = run(), run()
    assert a.summary() == b.summary()
    assert a.wa_series == b.wa_series
    assert a.window == 12
    assert len(a.wa_series) == 106
    assert a.tail_window == (8, a.tail_window[1])
