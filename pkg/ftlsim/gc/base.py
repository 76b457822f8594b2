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
ftlsim.gc.base

Victim selection contract and the block scores.

Scores
======
cb_value  : age * (1 - u) / (2u), the cost-benefit value
cat_value : (1 - u) / u * norm(age since creation) / (erase_count + 1)
cwa_value : sum of the ages of a block's invalid pages (cost with age)

u is the fraction of valid pages. A block without valid pages scores INF for
CB and CAT, it is a free victim.

All scores are plain floats computed the same way everywhere, so equal
inputs always give bit-identical results and argmax comparisons between
strategies are exact.

"""
import logging
import time

from ftlsim.core import (Dict, INF, ConfigError, UnknownBlockError,
    FtlSimError)

logger = logging.getLogger(__name__)


def cb_value(valid_count, n_p, age):
    """
    Cost-benefit value of a block

    Inputs
    ------
    valid_count : int valid pages (0 <= valid_count <= n_p)
    n_p : int pages per block
    age : int logical time since the last invalidation

    Returns
    -------
    float, INF if valid_count is 0
    """
    if valid_count == 0:
        return INF
    return age * (n_p - valid_count) / (2.0 * valid_count)


def cat_age_norm(age):
    """Discrete log-like age normalization, floor(log2(age + 1)) + 1"""
    return (int(age) + 1).bit_length()


def cat_value(valid_count, n_p, age_since_creation, erase_count):
    """Cost-age-times value, INF if valid_count is 0"""
    if valid_count == 0:
        return INF
    norm = cat_age_norm(age_since_creation)
    return (n_p - valid_count) * norm / float(valid_count * (erase_count + 1))


def cwa_value(inv_count, inv_time_sum, now):
    """
    Cost with age: sum of (now - t_i) over all invalidation times t_i

    Kept incrementally as inv_count * now - sum(t_i).
    """
    return inv_count * now - inv_time_sum


def block_cb(meta, n_p, now):
    """cb_value of a BlockMeta at time now"""
    return cb_value(meta.valid_count, n_p, now - meta.age_origin)


def block_cat(meta, n_p, now):
    return cat_value(meta.valid_count, n_p, now - meta.created_at,
        meta.erase_count)


def block_cwa(meta, n_p, now):
    return cwa_value(meta.inv_count, meta.inv_time_sum, now)


class VictimSelector(object):
    """
    Event driven GC victim selection for one channel

    Events
    ------
    on_block_full(block_id, now) : a block of the channel became Used
    on_page_invalidated(block_id, now) : a Used block lost a valid page
    on_block_erased(block_id) : a block was erased

    Query
    -----
    select_victim(now) : return a registered block id (and unregister it) or
        None when nothing is registered

    Parameters are class attributes that keyword arguments override, unknown
    keywords raise ConfigError.

    Attributes
    ----------
    scan_cost_last_selection : int of score evaluations of the last selection
    scan_cost_total : int of score evaluations over all selections
    selections : int of select_victim calls that returned a block
    """
    name = None

    def __init__(self, device, channel, **kwargs):
        for key, value in kwargs.items():
            if key.startswith('_') or not hasattr(self, key):
                raise ConfigError("{0}: unknown parameter {1!r}".format(
                    self.name, key))
            setattr(self, key, value)
        self.device = device
        self.blocks = device.blocks
        self.n_p = device.pages_per_block
        self.channel = channel
        self.scan_cost_last_selection = 0
        self.scan_cost_total = 0
        self.selections = 0

    def _check_block(self, block_id):
        if self.blocks[block_id].channel != self.channel:
            raise FtlSimError("block {0} is not on channel {1}".format(
                block_id, self.channel))

    def _unknown(self, block_id):
        return UnknownBlockError("{0}: block {1} is not registered".format(
            self.name, block_id))

    def _finish(self, victim, scanned):
        self.scan_cost_last_selection = scanned
        self.scan_cost_total += scanned
        if victim is not None:
            self.selections += 1
        return victim

    def on_block_full(self, block_id, now):
        raise NotImplementedError

    def on_page_invalidated(self, block_id, now):
        raise NotImplementedError

    def on_block_erased(self, block_id):
        raise NotImplementedError

    def select_victim(self, now):
        raise NotImplementedError

    def __len__(self):
        raise NotImplementedError

    def counters(self):
        """Return Dict of counters, summed over channels by the FTL"""
        return Dict([
            ('selections', self.selections),
            ('scan_cost_total', self.scan_cost_total),
        ])


class LinearScanSelector(VictimSelector):
    """
    Full scan argmax over all registered blocks

    Subclasses set score(meta, n_p, now). Ties go to the lowest block id.
    """
    score = None

    def __init__(self, device, channel, **kwargs):
        super(LinearScanSelector, self).__init__(device, channel, **kwargs)
        self.registered = set()

    def on_block_full(self, block_id, now):
        self._check_block(block_id)
        self.registered.add(block_id)

    def on_page_invalidated(self, block_id, now):
        if block_id not in self.registered:
            raise self._unknown(block_id)

    def on_block_erased(self, block_id):
        self.registered.discard(block_id)

    def select_victim(self, now):
        score = self.score
        blocks = self.blocks
        n_p = self.n_p
        scanned = len(self.registered)
        best = None
        best_score = None
        for b in self.registered:
            s = score(blocks[b], n_p, now)
            if best is None or s > best_score or (s == best_score and b < best):
                best = b
                best_score = s
        if best is not None:
            self.registered.discard(best)
        return self._finish(best, scanned)

    def __len__(self):
        return len(self.registered)

    def __contains__(self, block_id):
        return block_id in self.registered


class TimedSelector(object):
    """
    Wall-clock accounting proxy around a selector (bench mode)

    Accumulates seconds spent selecting victims and handling block events,
    the split between search time and bookkeeping time.
    """
    def __init__(self, selector):
        self.selector = selector
        self.select_seconds = 0.0
        self.event_seconds = 0.0

    def select_victim(self, now):
        t = time.perf_counter()
        try:
            return self.selector.select_victim(now)
        finally:
            self.select_seconds += time.perf_counter() - t

    def on_block_full(self, block_id, now):
        t = time.perf_counter()
        self.selector.on_block_full(block_id, now)
        self.event_seconds += time.perf_counter() - t

    def on_page_invalidated(self, block_id, now):
        t = time.perf_counter()
        self.selector.on_page_invalidated(block_id, now)
        self.event_seconds += time.perf_counter() - t

    def on_block_erased(self, block_id):
        t = time.perf_counter()
        self.selector.on_block_erased(block_id)
        self.event_seconds += time.perf_counter() - t

    def __getattr__(self, name):
        return getattr(self.selector, name)

    def __len__(self):
        return len(self.selector)
