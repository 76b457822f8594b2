# -*- coding: utf-8 -*-
#
# Copyright 2017 University of Nevada, Reno
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
#
"""
ftlsim.ftl

Page-mapped flash translation layer

Host page writes are spread over the channels round-robin (per page) and
appended to the channel's active block of the page's hotness level. When a
channel's clean pool drops below the low watermark, GC cycles run on that
channel: the selector names a victim, its valid pages are relocated to the
active blocks of their hotness levels and the victim is erased.

USE:
>>> cfg = FtlConfig(geometry=DeviceGeometry(1, 256, 32), strategy='fastcb')
>>> report = simulate(cfg, workload)

"""
import logging
import time
from collections import deque

import numpy as np

from ftlsim.core import (Dict, Clock, ConfigError, DeviceWedged,
    FlashStateError, FtlSimError)
from ftlsim.flash import DeviceGeometry, BlockState, create_device
from ftlsim.gc import TimedSelector, block_cb, make_selector, strategy_label
from ftlsim.metrics import Recorder, SimReport, VictimRecord
from ftlsim.workload import HotnessMap, precharacterize, request_pages

logger = logging.getLogger(__name__)

# SeedSequence key separating the warm-up stream from workload streams
WARMUP_STREAM = 0x5741524d
WARMUP_CHUNK = 1 << 16

PROFILE_KEYS = ('select_seconds', 'event_seconds', 'rebuild_seconds')


class FtlConfig(object):
    """
    Settings of one simulation

    Attributes are class defaults, keyword arguments override them and
    unknown keywords raise ConfigError.

    Attributes
    ----------
    geometry : DeviceGeometry
    strategy : str strategy spec, e.g. 'fastcb' or 'approxcb:q=1%'
    hotness_levels : int number of hotness streams per channel
    quantiles : sequence of level shares or None for the defaults
    gc_low_watermark : int clean blocks per channel, default levels + 1
    warm_up : bool sequential fill plus 2x random writes before replay
    rng_seed : int seed of the warm-up stream
    window : int host writes per WA window, None for 1/100 of the workload
    debug : bool check device invariants after every host write
    trace_victims : bool keep a VictimRecord per GC cycle
    bench : bool time selection and event handling
    """
    geometry = None
    strategy = 'greedy'
    hotness_levels = 3
    quantiles = None
    gc_low_watermark = None
    warm_up = True
    rng_seed = 0
    window = None
    debug = False
    trace_victims = False
    bench = False

    def __init__(self, **kwargs):
        for key in kwargs:
            if key.startswith('_') or not hasattr(self, key) or callable(
                    getattr(self, key)):
                raise ConfigError("unknown FTL setting {0!r}".format(key))
            setattr(self, key, kwargs[key])
        if self.gc_low_watermark is None:
            self.gc_low_watermark = self.hotness_levels + 1
        self.validate()

    def validate(self):
        if not isinstance(self.geometry, DeviceGeometry):
            raise ConfigError("geometry must be a DeviceGeometry")
        self.geometry.validate()
        strategy_label(self.strategy)
        if self.hotness_levels < 1:
            raise ConfigError("hotness_levels must be >= 1")
        if self.quantiles is not None and len(self.quantiles) != \
                self.hotness_levels:
            raise ConfigError("need one quantile per hotness level")
        if self.gc_low_watermark < self.hotness_levels + 1:
            raise ConfigError("gc_low_watermark must be >= hotness_levels + 1"
                " ({0} < {1})".format(self.gc_low_watermark,
                    self.hotness_levels + 1))
        g = self.geometry
        reserve = self.gc_low_watermark + self.hotness_levels + 1
        if g.blocks_per_channel < reserve:
            raise ConfigError("{0} blocks per channel cannot hold the clean "
                "reserve and active blocks ({1} needed)".format(
                    g.blocks_per_channel, reserve))
        # every channel carries its round-robin share of the logical space
        share = -(-g.logical_pages // g.channels)
        spare = g.blocks_per_channel * g.pages_per_block - share
        if spare < reserve * g.pages_per_block:
            raise ConfigError("{0} spare pages per channel cannot cover the "
                "clean reserve and active blocks ({1} needed), lower the "
                "logical capacity or add blocks".format(
                    spare, reserve * g.pages_per_block))
        if self.window is not None and self.window < 1:
            raise ConfigError("window must be >= 1")
        return self

    def as_dict(self):
        names = ('strategy', 'hotness_levels', 'quantiles', 'gc_low_watermark',
            'warm_up', 'rng_seed', 'window', 'debug', 'trace_victims', 'bench')
        d = Dict([('geometry', Dict(self.geometry._asdict()))])
        d.update((n, getattr(self, n)) for n in names)
        return d


class Ftl(object):
    """
    Page-mapped FTL over a simulated device

    Attributes
    ----------
    config : FtlConfig
    device : Device
    clock : Clock of host page writes, spans warm-up and replay
    hotness : HotnessMap
    selectors : list of per-channel victim selectors
    clean : list of per-channel deques of clean block ids
    active : list of per-channel lists, active block id per hotness level
    recorder : Recorder of the current span
    host_writes_total : int lifetime host page writes
    gc_copies_total : int lifetime GC copies
    """
    def __init__(self, config, hotness=None):
        self.config = config
        g = self.geometry = config.geometry
        self.device = create_device(g, debug=config.debug)
        self.blocks = self.device.blocks
        self.n_p = g.pages_per_block
        self.clock = Clock()
        if hotness is None:
            hotness = HotnessMap.uniform(g.logical_pages, config.hotness_levels)
        if len(hotness) != g.logical_pages or \
                hotness.nlevels != config.hotness_levels:
            raise ConfigError("hotness map does not match the configuration")
        self.hotness = hotness
        self.selectors = []
        for ch in range(g.channels):
            sel = make_selector(config.strategy, self.device, ch)
            if config.bench:
                sel = TimedSelector(sel)
            self.device.attach(ch, sel)
            self.selectors.append(sel)
        self.clean = [deque(self.device.channel_blocks(ch))
            for ch in range(g.channels)]
        self.active = [[None] * config.hotness_levels
            for _ in range(g.channels)]
        self._rr = 0
        self.recorder = Recorder(g.total_blocks)
        self.host_writes_total = 0
        self.gc_copies_total = 0

    # -- write path ------------------------------------------------------------

    def _open(self, channel, level):
        clean = self.clean[channel]
        if not clean:
            raise DeviceWedged("channel {0}: no clean block to open".format(
                channel))
        block_id = clean.popleft()
        self.device.open_block(block_id, level)
        self.active[channel][level] = block_id
        return block_id

    def _append(self, channel, level, lpa, now):
        """Program lpa on the channel's active block of a hotness level"""
        block_id = self.active[channel][level]
        if block_id is None:
            block_id = self._open(channel, level)
        meta = self.blocks[block_id]
        self.device.write_physical(self.device.ppa(block_id, meta.write_ptr),
            lpa, now)
        if meta.state is BlockState.USED:
            self.active[channel][level] = None

    def _ensure_clean(self, channel):
        clean = self.clean[channel]
        limit = self.geometry.blocks_per_channel
        cycles = 0
        while len(clean) < self.config.gc_low_watermark:
            if cycles >= limit:
                raise DeviceWedged("channel {0}: {1} GC cycles without "
                    "reaching {2} clean blocks".format(channel, cycles,
                        self.config.gc_low_watermark))
            self.gc_cycle(channel)
            cycles += 1

    def host_write(self, lpa):
        """Write one logical page"""
        if not 0 <= lpa < self.geometry.logical_pages:
            raise FtlSimError("lpa {0} outside the logical space".format(lpa))
        now = self.clock.tick()
        self.recorder.record_host_write()
        self.host_writes_total += 1
        channel = self._rr
        self._rr = (channel + 1) % self.geometry.channels
        old = self.device.mapping.forward[lpa]
        if old is not None:
            self.device.invalidate(old, now)
        self._ensure_clean(channel)
        self._append(channel, self.hotness[lpa], lpa, now)
        if self.config.debug:
            self.device.check_invariants()

    def gc_cycle(self, channel):
        """Free one block of a channel"""
        now = self.clock.now
        sel = self.selectors[channel]
        rec = self.recorder
        registered = len(sel)
        rebuilds = _rebuilds(sel)
        victim = sel.select_victim(now)
        if victim is None:
            raise DeviceWedged("channel {0}: no victim with {1} clean "
                "blocks".format(channel, len(self.clean[channel])))
        meta = self.blocks[victim]
        if meta.channel != channel:
            raise FtlSimError("victim {0} of channel {1} lives on channel "
                "{2}".format(victim, channel, meta.channel))
        scan = sel.scan_cost_last_selection
        rec.record_selection(scan)
        if rec.victims is not None:
            vr = VictimRecord(channel, victim, meta.valid_count,
                block_cb(meta, self.n_p, now), scan, registered,
                _rebuilds(sel) != rebuilds)
            rec.record_victim(vr)
            logger.debug("gc %s", vr)

        self.device.begin_collection(victim)
        for ppa, lpa in self.device.valid_pages(victim):
            self.device.invalidate(ppa, now)
            self._append(channel, self.hotness[lpa], lpa, now)
            rec.record_gc_copy()
            self.gc_copies_total += 1
        self.device.erase(victim)
        self.clean[channel].append(victim)
        rec.record_erase(victim)

    # -- phases ----------------------------------------------------------------

    def warm_up(self):
        """
        Sequential fill of the logical space, then 2x random overwrites

        Counted in a separate recorder, returns its scalars.
        """
        logical_pages = self.geometry.logical_pages
        measured = self.recorder
        shadow = self.recorder = Recorder(self.geometry.total_blocks)
        try:
            for lpa in range(logical_pages):
                self.host_write(lpa)
            rng = np.random.default_rng([self.config.rng_seed, WARMUP_STREAM])
            left = 2 * logical_pages
            while left:
                n = min(WARMUP_CHUNK, left)
                for lpa in rng.integers(0, logical_pages, size=n).tolist():
                    self.host_write(lpa)
                left -= n
        finally:
            self.recorder = measured
        logger.info("warm-up done: %d host writes, %d copies",
            shadow.host_page_writes, shadow.gc_copy_writes)
        return shadow.scalars()

    def counters(self):
        """Strategy counters summed over the channels"""
        total = Dict()
        for sel in self.selectors:
            for key, value in sel.counters().items():
                total[key] = total.get(key, 0) + value
        return total

    def profile(self):
        """
        Bench mode seconds summed over channels

        rebuild_seconds is the share of select_seconds spent in fastcb
        threshold rebuilds.
        """
        d = Dict((key, 0.0) for key in PROFILE_KEYS)
        for sel in self.selectors:
            for key in PROFILE_KEYS:
                d[key] += getattr(sel, key, 0.0)
        return d

    def check_conservation(self):
        """Physical programs must equal host writes plus GC copies"""
        expected = self.host_writes_total + self.gc_copies_total
        programmed = sum(meta.programmed for meta in self.blocks)
        if self.device.programs != expected or programmed != expected:
            raise FlashStateError("write conservation broken: {0} programs, "
                "{1} block programs, {2} host + {3} copies".format(
                    self.device.programs, programmed, self.host_writes_total,
                    self.gc_copies_total))

    def replay(self, workload):
        """Split requests into page writes and write the in-range ones"""
        page_size = self.geometry.page_size
        logical_pages = self.geometry.logical_pages
        rec = self.recorder
        for req in workload:
            pages = request_pages(req, page_size)
            dropped = 0
            for lpa in pages:
                if lpa >= logical_pages:
                    dropped += 1
                    continue
                self.host_write(lpa)
            if dropped:
                rec.record_dropped(dropped, dropped == len(pages))

    def run(self, workload, window=None):
        """
        Optional warm-up, then replay the workload

        Returns
        -------
        SimReport of the replay
        """
        cfg = self.config
        label = strategy_label(cfg.strategy)
        logger.info("run %s on %d ch x %d blocks x %d pages, %d logical pages",
            label, self.geometry.channels, self.geometry.blocks_per_channel,
            self.n_p, self.geometry.logical_pages)
        warm = Dict()
        if cfg.warm_up:
            warm = self.warm_up()
        base = self.counters()
        base_profile = self.profile()
        if window is None:
            window = cfg.window
        self.recorder = Recorder(self.geometry.total_blocks, window=window,
            trace_victims=cfg.trace_victims)
        t = time.perf_counter()
        self.replay(workload)
        wall = time.perf_counter() - t
        self.check_conservation()

        counters = self.counters()
        for key in counters:
            counters[key] -= base.get(key, 0)
        profile = None
        if cfg.bench:
            profile = self.profile()
            for key in profile:
                profile[key] -= base_profile[key]
        report = SimReport(label, self.recorder, bookkeeping=counters,
            profile=profile, warmup=warm,
            wall_clock=wall if cfg.bench else None)
        logger.info("run %s done: wa=%.6g gc=%d host=%d", label,
            report.wa_final, report.gc_count, report.host_page_writes)
        return report


def _rebuilds(sel):
    return (getattr(sel, 'rebuild_empty', 0) +
        getattr(sel, 'rebuild_overflow', 0))


def simulate(config, workload):
    """
    Pre-characterize hotness over the workload, then run it

    The WA window defaults to 1/100 of the workload's in-range page writes.
    """
    g = config.geometry
    hotness = precharacterize(workload, g.logical_pages,
        quantiles=config.quantiles, levels=config.hotness_levels,
        page_size=g.page_size)
    window = config.window
    if window is None:
        window = max(1, hotness.page_writes // 100)
    ftl = Ftl(config, hotness)
    return ftl.run(workload, window=window)
