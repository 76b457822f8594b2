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
ftlsim.gc.fastcb

Fast cost-benefit

Picks the same victim as the full-scan cost-benefit strategy but only
searches a small candidate class.

Used blocks live in two disjoint classes:

class0 : candidates, CB value >= threshold t_cb
class1 : everything else, keyed by the time ("shift time") at which the
         block's CB value reaches t_cb if its utilization does not change

Selection:
  1. lazily move every class1 block whose shift time has come to class0
  2. if class0 is empty or holds more than t0 blocks, score the affected
     blocks, keep the c0 best in class0 and set t_cb to the lowest retained
     value
  3. return the class0 block with the highest CB value

An invalidation resets a block's age, so the block always goes (back) to
class1 with a new shift time.

Shift times are scaled by time_factor so that colliding times can be made
unique by incrementing the key. A key k is due at time now when
k // time_factor <= now.

Raising t_cb leaves existing class1 keys alone (they can only be early),
each entry remembers the threshold generation it was keyed under and stale
entries are re-keyed when they come due. Lowering t_cb (class0 ran empty)
re-keys every class1 block.

"""
import heapq
import logging
import math
import time

from ftlsim.core import INF, ConfigError
from ftlsim.gc.base import VictimSelector, cb_value, block_cb
from ftlsim.lib.indexedheap import IndexedHeap

logger = logging.getLogger(__name__)


def fastcb_shift_time(valid_count, n_p, last_inv_at, t_cb):
    """
    Earliest logical time at which a block's CB value reaches t_cb

    Returns the least integer T >= last_inv_at with
    cb_value(valid_count, n_p, T - last_inv_at) >= t_cb, or INF if the value
    never gets there. The closed form last_inv_at + ceil(2u t_cb / (1 - u))
    is corrected against cb_value so the promotion rule and the scorer
    agree exactly.
    """
    if valid_count == 0 or t_cb <= 0:
        return last_inv_at
    if valid_count == n_p or t_cb == INF:
        return INF
    delta = int(math.ceil(2.0 * valid_count * t_cb / (n_p - valid_count)))
    while delta > 0 and cb_value(valid_count, n_p, delta - 1) >= t_cb:
        delta -= 1
    while cb_value(valid_count, n_p, delta) < t_cb:
        delta += 1
    return last_inv_at + delta


class FastCostBenefitSelector(VictimSelector):
    """
    Two-class cost-benefit selector

    Parameters
    ----------
    t0 : int maximum class0 size before the threshold is raised
    c0 : int class0 size after a threshold adjustment
    time_factor : int shift time scaling, must exceed the number of blocks
        that can share one raw shift time

    Attributes
    ----------
    t_cb : float current threshold
    rebuild_seconds : float wall-clock seconds spent in threshold rebuilds
    class0 : set of block ids
    class1 : IndexedHeap of block id -> (key, block id)
    """
    name = 'fastcb'
    t0 = 125
    c0 = 25
    time_factor = 1024

    def __init__(self, device, channel, **kwargs):
        super(FastCostBenefitSelector, self).__init__(device, channel,
            **kwargs)
        if not 1 <= self.c0 <= self.t0:
            raise ConfigError("fastcb: need 1 <= c0 <= t0")
        if self.time_factor < 1:
            raise ConfigError("fastcb: time_factor must be >= 1")
        self.t_cb = 0.0
        self.generation = 0
        self.class0 = set()
        self.class1 = IndexedHeap()
        self.registered = set()
        self._key_of = {}
        self._keyed_gen = {}
        self._taken = set()
        self.rebuild_empty = 0
        self.rebuild_overflow = 0
        self.rebuild_seconds = 0.0
        self.rekeys = 0
        self.stale_promotions = 0

    # -- class1 bookkeeping ------------------------------------------------

    def shift_time(self, block_id):
        meta = self.blocks[block_id]
        return fastcb_shift_time(meta.valid_count, self.n_p, meta.age_origin,
            self.t_cb)

    def class1_key(self, block_id):
        """Scaled shift key of a class1 block, None outside class1"""
        return self._key_of.get(block_id)

    def _insert1(self, block_id, shift):
        """Key block into class1 at a raw shift time"""
        if shift == INF:
            key = INF
        else:
            base = shift * self.time_factor
            key = base
            while key in self._taken:
                key += 1
            if key - base >= self.time_factor:
                raise ConfigError(
                    "fastcb: more than time_factor={0} blocks share shift "
                    "time {1}".format(self.time_factor, shift))
            self._taken.add(key)
        self._key_of[block_id] = key
        self._keyed_gen[block_id] = self.generation
        self.class1.push(block_id, (key, block_id))
        self.rekeys += 1

    def _remove1(self, block_id):
        if not self.class1.remove(block_id):
            return False
        key = self._key_of.pop(block_id)
        del self._keyed_gen[block_id]
        if key != INF:
            self._taken.discard(key)
        return True

    def _detach(self, block_id):
        if block_id in self.class0:
            self.class0.discard(block_id)
        else:
            self._remove1(block_id)

    # -- events --------------------------------------------------------------

    def on_block_full(self, block_id, now):
        self._check_block(block_id)
        self.registered.add(block_id)
        self._insert1(block_id, self.shift_time(block_id))

    def on_page_invalidated(self, block_id, now):
        if block_id not in self.registered:
            raise self._unknown(block_id)
        self._detach(block_id)
        self._insert1(block_id, self.shift_time(block_id))

    def on_block_erased(self, block_id):
        if block_id in self.registered:
            self.registered.discard(block_id)
            self._detach(block_id)

    # -- selection -----------------------------------------------------------

    def _lazy_update(self, now):
        """Move due class1 blocks to class0"""
        limit = (now + 1) * self.time_factor
        class1 = self.class1
        while class1 and class1.top_priority()[0] < limit:
            block_id = class1.top()
            stale = self._keyed_gen[block_id] != self.generation
            self._remove1(block_id)
            if stale:
                self.stale_promotions += 1
                shift = self.shift_time(block_id)
                if shift > now:
                    self._insert1(block_id, shift)
                    continue
            self.class0.add(block_id)

    def _adjust(self, candidates, now, full):
        """
        Keep the c0 best candidates in class0 and raise or lower t_cb

        Returns the ranked retained list [(cb, -block_id), ...], best first.
        """
        blocks = self.blocks
        n_p = self.n_p
        ranked = [(block_cb(blocks[b], n_p, now), -b) for b in candidates]
        top = heapq.nlargest(self.c0, ranked)
        retained = set(-b for _, b in top)
        old = self.t_cb
        self.t_cb = top[-1][0]
        self.generation += 1
        if full:
            for b in list(self.class1):
                if b not in retained:
                    self._remove1(b)
                    self._insert1(b, self.shift_time(b))
            for b in retained:
                self._remove1(b)
        else:
            for b in self.class0 - retained:
                self._insert1(b, self.shift_time(b))
        self.class0 = retained
        logger.debug("fastcb ch%d t=%d: %s rebuild over %d blocks, "
            "t_cb %g -> %g", self.channel, now,
            'empty' if full else 'overflow', len(ranked), old, self.t_cb)
        return top, len(ranked)

    def select_victim(self, now):
        if not self.registered:
            return self._finish(None, 0)
        self._lazy_update(now)
        n0 = len(self.class0)
        if n0 == 0 or n0 > self.t0:
            t = time.perf_counter()
            if n0 == 0:
                self.rebuild_empty += 1
                top, scanned = self._adjust(list(self.class1), now, True)
            else:
                self.rebuild_overflow += 1
                top, scanned = self._adjust(self.class0, now, False)
            self.rebuild_seconds += time.perf_counter() - t
            victim = -top[0][1]
        else:
            blocks = self.blocks
            n_p = self.n_p
            best = max((block_cb(blocks[b], n_p, now), -b) for b in self.class0)
            victim = -best[1]
            scanned = n0
        self.class0.discard(victim)
        self.registered.discard(victim)
        return self._finish(victim, scanned)

    def __len__(self):
        return len(self.registered)

    def __contains__(self, block_id):
        return block_id in self.registered

    def counters(self):
        c = super(FastCostBenefitSelector, self).counters()
        c['fastcb_rebuild_empty'] = self.rebuild_empty
        c['fastcb_rebuild_overflow'] = self.rebuild_overflow
        c['fastcb_rekeys'] = self.rekeys
        c['fastcb_stale_promotions'] = self.stale_promotions
        return c
