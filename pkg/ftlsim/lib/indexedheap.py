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
ftlsim.lib.indexedheap

Binary min-heap with a value -> position index, so that the priority of any
stored value can be changed or the value removed in O(log n).

Priorities are compared with <, tuples such as (valid_count, block_id) give
deterministic tie-breaking.
"""


class IndexedHeap(object):
    """
    A heap with indices
    """
    __slots__ = ('heap', 'index')

    def __init__(self):
        self.heap = []
        self.index = {}

    def push(self, value, priority):
        """Insert value, or update its priority if already present"""
        if value in self.index:
            self.setpriority(value, priority)
            return
        self.heap.append((priority, value))
        self.index[value] = len(self.heap) - 1
        self._siftup(len(self.heap) - 1)

    def setpriority(self, value, priority):
        pos = self.index[value]
        old = self.heap[pos][0]
        self.heap[pos] = (priority, value)
        if old < priority:
            self._siftdown(pos)
        else:
            self._siftup(pos)

    def remove(self, value):
        """Remove value if present, return True if it was"""
        pos = self.index.pop(value, None)
        if pos is None:
            return False
        last = self.heap.pop()
        if pos == len(self.heap):
            return True
        removed = self.heap[pos]
        self.heap[pos] = last
        self.index[last[1]] = pos
        if removed[0] < last[0]:
            self._siftdown(pos)
        else:
            self._siftup(pos)
        return True

    def pop(self):
        """Remove and return the value with the smallest priority"""
        if not self.heap:
            raise IndexError('pop from an empty heap')
        value = self.heap[0][1]
        self.remove(value)
        return value

    def top(self):
        return self.heap[0][1]

    def top_priority(self):
        return self.heap[0][0]

    def _siftup(self, pos):
        heap = self.heap
        index = self.index
        temp = heap[pos]
        while pos > 0:
            parent = (pos - 1) // 2
            pt = heap[parent]
            if temp[0] < pt[0]:
                heap[pos] = pt
                index[pt[1]] = pos
                pos = parent
            else:
                break
        heap[pos] = temp
        index[temp[1]] = pos

    def _siftdown(self, pos):
        heap = self.heap
        index = self.index
        temp = heap[pos]
        size = len(heap)
        while pos * 2 + 1 < size:
            child = pos * 2 + 1
            ct = heap[child]
            if child + 1 < size and heap[child + 1][0] < ct[0]:
                child += 1
                ct = heap[child]
            if ct[0] < temp[0]:
                heap[pos] = ct
                index[ct[1]] = pos
                pos = child
            else:
                break
        heap[pos] = temp
        index[temp[1]] = pos

    def __len__(self):
        return len(self.index)

    def __bool__(self):
        return bool(self.index)

    def __contains__(self, value):
        return value in self.index

    def __iter__(self):
        """Iterate stored values in heap (not sorted) order"""
        return iter(list(self.index))
