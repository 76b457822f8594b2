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
ftlsim.gc.greedy

Utilization-only and order-only strategies

greedy        : least valid pages, indexed min-heap with decrease-key
const-greedy  : least valid pages, one bucket per possible valid count
fifo          : first block filled is collected first
age-threshold : least valid pages among blocks at least tau old

Ties always go to the lowest block id.
"""
from ftlsim.core import Dict, ConfigError
from ftlsim.gc.base import VictimSelector
from ftlsim.lib.indexedheap import IndexedHeap


class HeapGreedySelector(VictimSelector):
    """
    Greedy with O(log n) updates

    Heap priority is (valid_count, block_id), an invalidation is a
    decrease-key.
    """
    name = 'greedy'

    def __init__(self, device, channel, **kwargs):
        super(HeapGreedySelector, self).__init__(device, channel, **kwargs)
        self.heap = IndexedHeap()

    def on_block_full(self, block_id, now):
        self._check_block(block_id)
        self.heap.push(block_id, (self.blocks[block_id].valid_count, block_id))

    def on_page_invalidated(self, block_id, now):
        if block_id not in self.heap:
            raise self._unknown(block_id)
        self.heap.setpriority(block_id,
            (self.blocks[block_id].valid_count, block_id))

    def on_block_erased(self, block_id):
        self.heap.remove(block_id)

    def select_victim(self, now):
        if not self.heap:
            return self._finish(None, 0)
        return self._finish(self.heap.pop(), 1)

    def __len__(self):
        return len(self.heap)

    def __contains__(self, block_id):
        return block_id in self.heap


class BucketGreedySelector(VictimSelector):
    """
    Greedy with constant time updates

    An array of N_p + 1 buckets, bucket v holds the blocks with v valid
    pages ordered by block id. Selection scans buckets from 0 upwards.
    """
    name = 'const-greedy'

    def __init__(self, device, channel, **kwargs):
        super(BucketGreedySelector, self).__init__(device, channel, **kwargs)
        self.buckets = [IndexedHeap() for _ in range(self.n_p + 1)]
        self.where = {}

    def on_block_full(self, block_id, now):
        self._check_block(block_id)
        v = self.blocks[block_id].valid_count
        self.buckets[v].push(block_id, block_id)
        self.where[block_id] = v

    def on_page_invalidated(self, block_id, now):
        old = self.where.get(block_id)
        if old is None:
            raise self._unknown(block_id)
        v = self.blocks[block_id].valid_count
        self.buckets[old].remove(block_id)
        self.buckets[v].push(block_id, block_id)
        self.where[block_id] = v

    def on_block_erased(self, block_id):
        v = self.where.pop(block_id, None)
        if v is not None:
            self.buckets[v].remove(block_id)

    def select_victim(self, now):
        for bucket in self.buckets:
            if bucket:
                victim = bucket.pop()
                del self.where[victim]
                return self._finish(victim, 1)
        return self._finish(None, 0)

    def __len__(self):
        return len(self.where)

    def __contains__(self, block_id):
        return block_id in self.where


class FifoSelector(VictimSelector):
    """Collect blocks in the order they filled"""
    name = 'fifo'

    def __init__(self, device, channel, **kwargs):
        super(FifoSelector, self).__init__(device, channel, **kwargs)
        self.queue = Dict()

    def on_block_full(self, block_id, now):
        self._check_block(block_id)
        self.queue[block_id] = now

    def on_page_invalidated(self, block_id, now):
        if block_id not in self.queue:
            raise self._unknown(block_id)

    def on_block_erased(self, block_id):
        self.queue.pop(block_id, None)

    def select_victim(self, now):
        if not self.queue:
            return self._finish(None, 0)
        victim, _ = self.queue.popitem(last=False)
        return self._finish(victim, 1)

    def __len__(self):
        return len(self.queue)

    def __contains__(self, block_id):
        return block_id in self.queue


class AgeThresholdSelector(VictimSelector):
    """
    Preselect blocks at least tau old, then take the least valid one

    Age is the time since the block's first page was written. When no block
    is old enough the global least-valid block is taken.
    """
    name = 'age-threshold'
    tau = 0

    def __init__(self, device, channel, **kwargs):
        super(AgeThresholdSelector, self).__init__(device, channel, **kwargs)
        if self.tau < 0:
            raise ConfigError("age-threshold: tau must be >= 0")
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
        blocks = self.blocks
        old = None
        best = None
        for b in self.registered:
            meta = blocks[b]
            key = (meta.valid_count, b)
            if best is None or key < best:
                best = key
            if (now - meta.created_at >= self.tau and
                    (old is None or key < old)):
                old = key
        scanned = len(self.registered)
        pick = old or best
        if pick is None:
            return self._finish(None, scanned)
        self.registered.discard(pick[1])
        return self._finish(pick[1], scanned)

    def __len__(self):
        return len(self.registered)

    def __contains__(self, block_id):
        return block_id in self.registered
