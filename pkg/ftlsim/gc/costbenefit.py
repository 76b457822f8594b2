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
ftlsim.gc.costbenefit

Score-maximizing strategies

cb       : highest cost-benefit value, full scan per selection
cat      : highest cost-age-times value, full scan
fegc     : highest cost-with-age value, full scan
approxcb : cost-benefit over a cache of the q best blocks, the full scan
           only runs when the cache is empty

"""
import heapq
import logging
import math

from ftlsim.core import ConfigError
from ftlsim.gc.base import (VictimSelector, LinearScanSelector, block_cb,
    block_cat, block_cwa)

logger = logging.getLogger(__name__)


class CostBenefitSelector(LinearScanSelector):
    name = 'cb'
    score = staticmethod(block_cb)


class CatSelector(LinearScanSelector):
    name = 'cat'
    score = staticmethod(block_cat)


class FegcSelector(LinearScanSelector):
    name = 'fegc'
    score = staticmethod(block_cwa)


class ApproxCostBenefitSelector(VictimSelector):
    """
    Approximative cost-benefit

    Keeps a cache of candidate blocks. When the cache is empty all
    registered blocks are scored and the q_abs best move into the cache;
    every selection returns (and evicts) the cached block with the highest
    CB value at selection time. Cached blocks stay cached when their value
    changes, blocks outside are ignored until the next refill.

    Parameters
    ----------
    q : float cache size in percent of the registered blocks
    qabs : int absolute cache size, overrides q
    """
    name = 'approxcb'
    q = None
    qabs = None

    def __init__(self, device, channel, **kwargs):
        super(ApproxCostBenefitSelector, self).__init__(device, channel,
            **kwargs)
        if self.qabs is None and self.q is None:
            raise ConfigError("approxcb: need q=<pct>% or qabs=<n>")
        if self.qabs is not None and self.qabs < 1:
            raise ConfigError("approxcb: qabs must be >= 1")
        if self.q is not None and not 0 < self.q <= 100:
            raise ConfigError("approxcb: q must be in (0, 100]")
        self.registered = set()
        self.cache = set()
        self.refills = 0
        self.refill_scan = 0
        self.cache_scan = 0

    def cache_size(self):
        """q_abs for the next refill"""
        if self.qabs is not None:
            return self.qabs
        n = len(self.registered)
        return max(1, int(math.floor(round(self.q * n / 100.0, 9))))

    def on_block_full(self, block_id, now):
        self._check_block(block_id)
        self.registered.add(block_id)

    def on_page_invalidated(self, block_id, now):
        if block_id not in self.registered:
            raise self._unknown(block_id)

    def on_block_erased(self, block_id):
        self.registered.discard(block_id)
        self.cache.discard(block_id)

    def _ranked(self, candidates, now):
        blocks = self.blocks
        n_p = self.n_p
        return [(block_cb(blocks[b], n_p, now), -b) for b in candidates]

    def select_victim(self, now):
        if not self.registered:
            return self._finish(None, 0)
        if not self.cache:
            q_abs = self.cache_size()
            ranked = self._ranked(self.registered, now)
            top = heapq.nlargest(q_abs, ranked)
            self.cache = set(-b for _, b in top)
            self.refills += 1
            self.refill_scan += len(ranked)
            logger.debug("approxcb ch%d: refill %d of %d blocks at t=%d",
                self.channel, len(top), len(ranked), now)
            victim = -top[0][1]
            scanned = len(ranked)
        else:
            ranked = self._ranked(self.cache, now)
            victim = -max(ranked)[1]
            scanned = len(ranked)
            self.cache_scan += scanned
        self.cache.discard(victim)
        self.registered.discard(victim)
        return self._finish(victim, scanned)

    def __len__(self):
        return len(self.registered)

    def __contains__(self, block_id):
        return block_id in self.registered

    def counters(self):
        c = super(ApproxCostBenefitSelector, self).counters()
        c['approx_refills'] = self.refills
        c['approx_refill_scan'] = self.refill_scan
        c['approx_cache_scan'] = self.cache_scan
        return c
