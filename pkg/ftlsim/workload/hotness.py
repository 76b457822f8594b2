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
ftlsim.workload.hotness

Static hotness pre-characterization

One pre-pass over the workload counts page writes per lpa; pages are then
ranked by descending count (ties by lpa) and cut into levels by quantile
shares of the logical space. Level 0 is the hottest; pages never written
fall into the coldest level.

"""
import logging

import numpy as np

from ftlsim.core import ConfigError, ceil_product

logger = logging.getLogger(__name__)

DEFAULT_QUANTILES = (0.1, 0.3, 0.6)
BATCH = 1 << 16


def default_quantiles(levels):
    """10/30/60 for three levels, equal shares otherwise"""
    if levels < 1:
        raise ConfigError("hotness_levels must be >= 1")
    if levels == 3:
        return DEFAULT_QUANTILES
    return tuple([1.0 / levels] * levels)


def request_pages(req, page_size):
    """
    Pages touched by a request: offset floor-aligned, length rounded up

    Returns a range of lpas (possibly reaching beyond the logical space).
    """
    first = req.byte_offset // page_size
    npages = -(-req.length // page_size)
    return range(first, first + npages)


class HotnessMap(object):
    """
    lpa -> hotness level (0 = hottest)

    Attributes
    ----------
    levels : numpy int array, one level per lpa
    counts : numpy int array of pre-pass page writes per lpa
    nlevels : int
    page_writes : int of in-range page writes seen in the pre-pass
    """
    def __init__(self, levels, counts, nlevels, page_writes=0):
        self.levels = levels
        self.counts = counts
        self.nlevels = nlevels
        self.page_writes = page_writes
        self._lookup = levels.tolist()

    def __getitem__(self, lpa):
        return self._lookup[lpa]

    def __len__(self):
        return len(self._lookup)

    def level_sizes(self):
        return np.bincount(self.levels, minlength=self.nlevels).tolist()

    @classmethod
    def uniform(cls, logical_pages, nlevels=1, level=None):
        """Every page on one level (coldest by default)"""
        if level is None:
            level = nlevels - 1
        return cls(np.full(logical_pages, level, dtype=np.int64),
            np.zeros(logical_pages, dtype=np.int64), nlevels)


def access_counts(workload, logical_pages, page_size=4096):
    """Return (counts array, in-range page writes) of one pass"""
    counts = np.zeros(logical_pages, dtype=np.int64)
    batch = []
    total = 0
    for req in workload:
        for lpa in request_pages(req, page_size):
            if lpa < logical_pages:
                batch.append(lpa)
        if len(batch) >= BATCH:
            counts += np.bincount(batch, minlength=logical_pages)
            total += len(batch)
            batch = []
    if batch:
        counts += np.bincount(batch, minlength=logical_pages)
        total += len(batch)
    return counts, total


def assign_levels(counts, quantiles):
    """
    Cut the descending-count ranking into len(quantiles) levels

    Level i takes ranks [ceil(L*q_0+..+q_{i-1}), ceil(L*q_0+..+q_i)), so
    level 0 holds at least one page whenever L > 0. Unaccessed pages are
    moved to the coldest level.
    """
    logical_pages = len(counts)
    coldest = len(quantiles) - 1
    levels = np.full(logical_pages, coldest, dtype=np.int64)
    order = np.argsort(-counts, kind='stable')
    lo = 0
    cum = 0.0
    for level, share in enumerate(quantiles[:-1]):
        cum += share
        hi = min(logical_pages, ceil_product(logical_pages, cum))
        levels[order[lo:hi]] = level
        lo = max(lo, hi)
    levels[counts == 0] = coldest
    return levels


def precharacterize(workload, logical_pages, quantiles=None, levels=3,
        page_size=4096):
    """
    Build the HotnessMap of a workload

    Inputs
    ------
    workload : iterable of WriteRequest (iterated once)
    logical_pages : int
    quantiles : sequence of shares summing to 1 (default per level count)
    levels : int, used when quantiles is None
    page_size : int

    Returns
    -------
    HotnessMap
    """
    if quantiles is None:
        quantiles = default_quantiles(levels)
    quantiles = tuple(float(q) for q in quantiles)
    if not quantiles or any(q <= 0 for q in quantiles):
        raise ConfigError("hotness quantiles must be positive")
    if abs(sum(quantiles) - 1.0) > 1e-6:
        raise ConfigError("hotness quantiles must sum to 1")
    counts, total = access_counts(workload, logical_pages, page_size)
    hmap = HotnessMap(assign_levels(counts, quantiles), counts,
        len(quantiles), total)
    logger.debug("hotness levels %s over %d page writes", hmap.level_sizes(),
        total)
    return hmap
