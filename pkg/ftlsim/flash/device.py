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
ftlsim.flash.device

Physical flash abstraction: pages, blocks, channels, the block life-cycle
and the logical to physical page map.

Pages are written to an Active block in a log-structured manner, become
invalid when overwritten and only return to Clean when the whole block is
erased:

    Clean -> Active -> Used -> (erase) -> Clean

Physical page addresses (PPA) are single integers,

    ppa = block_id * pages_per_block + page
    block_id = channel * blocks_per_channel + index

so decoding is arithmetic and the reverse map is a flat list.

USE:
>>> dev = create_device(DeviceGeometry(1, 16, 4, logical_pages=56))
>>> dev.open_block(0)
>>> dev.write_physical(dev.ppa(0, 0), lpa=7, now=1)

"""
import enum
import logging
from collections import namedtuple

from ftlsim.core import (GeometryError, FlashStateError, ceil_product,
    floor_quotient)

logger = logging.getLogger(__name__)


class BlockState(enum.Enum):
    CLEAN = 0
    ACTIVE = 1
    USED = 2


class PageState(enum.Enum):
    CLEAN = 0
    VALID = 1
    INVALID = 2


_GeometryBase = namedtuple('_GeometryBase', ('channels', 'blocks_per_channel',
    'pages_per_block', 'page_size', 'logical_pages', 'op_factor'))


class DeviceGeometry(_GeometryBase):
    """
    Physical layout of a simulated SSD

    Attributes
    ----------
    channels : int number of channels (>= 1)
    blocks_per_channel : int erase blocks per channel
    pages_per_block : int N_p, pages per erase block (>= 2)
    page_size : int bytes per page
    logical_pages : int size of the host address space in pages, derived
        from the physical size and op_factor if not given
    op_factor : float overprovisioning ratio physical/logical (>= 1.0)
    """
    __slots__ = ()

    def __new__(cls, channels, blocks_per_channel, pages_per_block,
            page_size=4096, logical_pages=None, op_factor=1.07):
        if logical_pages is None and op_factor:
            total = channels * blocks_per_channel * pages_per_block
            logical_pages = floor_quotient(total, op_factor)
        return super(DeviceGeometry, cls).__new__(cls, channels,
            blocks_per_channel, pages_per_block, page_size, logical_pages,
            op_factor)

    @property
    def total_blocks(self):
        return self.channels * self.blocks_per_channel

    @property
    def total_pages(self):
        return self.total_blocks * self.pages_per_block

    @property
    def required_pages(self):
        """Physical pages needed for the logical space at op_factor"""
        return ceil_product(self.logical_pages, self.op_factor)

    def validate(self):
        """Raise GeometryError if a layout invariant is violated"""
        if self.channels < 1:
            raise GeometryError("need at least one channel, got {0}".format(
                self.channels))
        if self.blocks_per_channel < 1:
            raise GeometryError("need at least one block per channel")
        if self.pages_per_block < 2:
            raise GeometryError("pages_per_block must be >= 2, got {0}".format(
                self.pages_per_block))
        if self.page_size < 1:
            raise GeometryError("page_size must be positive")
        if self.op_factor < 1.0:
            raise GeometryError("op_factor must be >= 1.0, got {0}".format(
                self.op_factor))
        if self.logical_pages < 1:
            raise GeometryError("logical address space is empty")
        if self.total_pages < self.required_pages:
            raise GeometryError(
                "capacity shortfall: {0} physical pages < {1} required "
                "({2} logical pages x {3})".format(self.total_pages,
                    self.required_pages, self.logical_pages, self.op_factor))
        return self


class BlockMeta(object):
    """
    Per-block state

    Holds every quantity the victim scores read: valid page count
    (utilization), last invalidation time (CB age), creation time (CAT age),
    erase count, and the invalidation count/time sum for the cost-with-age
    value.

    Invariant: inv_count + valid_count == write_ptr
    """
    __slots__ = ('block_id', 'channel', 'state', 'valid_count', 'write_ptr',
        'created_at', 'filled_at', 'last_invalidation_at', 'erase_count',
        'inv_count', 'inv_time_sum', 'programmed', 'hotness', 'collecting',
        'inv_log')

    def __init__(self, block_id, channel):
        self.block_id = block_id
        self.channel = channel
        self.state = BlockState.CLEAN
        self.valid_count = 0
        self.write_ptr = 0
        self.created_at = None
        self.filled_at = None
        self.last_invalidation_at = None
        self.erase_count = 0
        self.inv_count = 0
        self.inv_time_sum = 0
        self.programmed = 0
        self.hotness = None
        self.collecting = False
        self.inv_log = None

    @property
    def age_origin(self):
        """
        Reference time of the CB age

        Last invalidation if there was one, else the time the block filled.
        """
        if self.last_invalidation_at is not None:
            return self.last_invalidation_at
        return self.filled_at

    def _reset(self):
        self.state = BlockState.CLEAN
        self.valid_count = 0
        self.write_ptr = 0
        self.created_at = None
        self.filled_at = None
        self.last_invalidation_at = None
        self.inv_count = 0
        self.inv_time_sum = 0
        self.hotness = None
        self.collecting = False
        if self.inv_log is not None:
            self.inv_log = []

    def __repr__(self):
        return "<BlockMeta {0} ch={1} {2} valid={3}/{4}>".format(
            self.block_id, self.channel, self.state.name, self.valid_count,
            self.write_ptr)


class MappingTable(object):
    """
    Logical page -> physical page map plus its reverse

    Both directions are flat lists, None marks an unmapped entry.
    """
    __slots__ = ('forward', 'reverse', 'mapped')

    def __init__(self, logical_pages, physical_pages):
        self.forward = [None] * logical_pages
        self.reverse = [None] * physical_pages
        self.mapped = 0

    def lookup(self, lpa):
        """Return ppa of lpa or None"""
        return self.forward[lpa]

    def owner(self, ppa):
        """Return lpa stored at ppa or None"""
        return self.reverse[ppa]

    def bind(self, lpa, ppa):
        self.forward[lpa] = ppa
        self.reverse[ppa] = lpa
        self.mapped += 1

    def unbind(self, ppa):
        lpa = self.reverse[ppa]
        self.reverse[ppa] = None
        self.forward[lpa] = None
        self.mapped -= 1
        return lpa

    def __len__(self):
        return self.mapped


class Device(object):
    """
    Simulated flash device

    Block events are delivered to the listener attached to the block's
    channel (a victim selector), see attach(). Listeners implement

        on_block_full(block_id, now)
        on_page_invalidated(block_id, now)
        on_block_erased(block_id)

    Attributes
    ----------
    geometry : DeviceGeometry
    blocks : list of BlockMeta indexed by block_id
    mapping : MappingTable
    programs : int of page programs since creation (host + GC copies)
    erases : int of block erases since creation
    debug : bool, keep per-block invalidation logs
    """
    def __init__(self, geometry, debug=False):
        self.geometry = geometry.validate()
        self.debug = debug
        self.pages_per_block = geometry.pages_per_block
        bpc = geometry.blocks_per_channel
        self.blocks = [BlockMeta(b, b // bpc)
            for b in range(geometry.total_blocks)]
        if debug:
            for meta in self.blocks:
                meta.inv_log = []
        self.mapping = MappingTable(geometry.logical_pages,
            geometry.total_pages)
        self.listeners = [None] * geometry.channels
        self.programs = 0
        self.erases = 0

    def attach(self, channel, listener):
        """Route block events of a channel to listener"""
        self.listeners[channel] = listener

    def ppa(self, block_id, page):
        return block_id * self.pages_per_block + page

    def decode(self, ppa):
        """Return (channel, block_id, page) of a physical page address"""
        block_id, page = divmod(ppa, self.pages_per_block)
        return self.blocks[block_id].channel, block_id, page

    def channel_blocks(self, channel):
        """Return range of block ids on a channel"""
        bpc = self.geometry.blocks_per_channel
        return range(channel * bpc, (channel + 1) * bpc)

    def page_state(self, ppa):
        block_id, page = divmod(ppa, self.pages_per_block)
        if page >= self.blocks[block_id].write_ptr:
            return PageState.CLEAN
        if self.mapping.reverse[ppa] is None:
            return PageState.INVALID
        return PageState.VALID

    def valid_pages(self, block_id):
        """Return list of (ppa, lpa) of the valid pages of a block"""
        start = block_id * self.pages_per_block
        meta = self.blocks[block_id]
        reverse = self.mapping.reverse
        return [(ppa, reverse[ppa]) for ppa in range(start, start + meta.write_ptr)
            if reverse[ppa] is not None]

    def open_block(self, block_id, hotness=0):
        """Turn a Clean block into the Active block of a hotness stream"""
        meta = self.blocks[block_id]
        if meta.state is not BlockState.CLEAN:
            raise FlashStateError("cannot open block {0}: state {1}".format(
                block_id, meta.state.name))
        meta.state = BlockState.ACTIVE
        meta.hotness = hotness

    def write_physical(self, ppa, lpa, now):
        """
        Program one page of an Active block

        The page must be the block's next clean page. Fires on_block_full
        when the last page is written.
        """
        block_id, page = divmod(ppa, self.pages_per_block)
        meta = self.blocks[block_id]
        if meta.state is not BlockState.ACTIVE:
            raise FlashStateError("write to non-active block {0} ({1})".format(
                block_id, meta.state.name))
        if page != meta.write_ptr:
            raise FlashStateError(
                "out-of-order write to block {0}: page {1}, write_ptr {2}".format(
                    block_id, page, meta.write_ptr))
        if self.mapping.forward[lpa] is not None:
            raise FlashStateError("lpa {0} still mapped to ppa {1}".format(
                lpa, self.mapping.forward[lpa]))
        if meta.write_ptr == 0:
            meta.created_at = now
        self.mapping.bind(lpa, ppa)
        meta.valid_count += 1
        meta.write_ptr += 1
        meta.programmed += 1
        self.programs += 1
        if meta.write_ptr == self.pages_per_block:
            meta.state = BlockState.USED
            meta.filled_at = now
            listener = self.listeners[meta.channel]
            if listener is not None:
                listener.on_block_full(block_id, now)

    def invalidate(self, ppa, now):
        """
        Mark a valid page invalid and drop its mapping

        Fires on_page_invalidated for Used blocks that are not being
        collected.
        """
        block_id, page = divmod(ppa, self.pages_per_block)
        meta = self.blocks[block_id]
        if page >= meta.write_ptr or self.mapping.reverse[ppa] is None:
            raise FlashStateError("invalidate of non-valid page {0}".format(ppa))
        self.mapping.unbind(ppa)
        meta.valid_count -= 1
        meta.inv_count += 1
        meta.inv_time_sum += now
        meta.last_invalidation_at = now
        if meta.inv_log is not None:
            meta.inv_log.append(now)
        if meta.state is BlockState.USED and not meta.collecting:
            listener = self.listeners[meta.channel]
            if listener is not None:
                listener.on_page_invalidated(block_id, now)

    def begin_collection(self, block_id):
        """Mark a Used block as GC victim, its relocations raise no events"""
        meta = self.blocks[block_id]
        if meta.state is not BlockState.USED:
            raise FlashStateError("victim {0} is not a used block ({1})".format(
                block_id, meta.state.name))
        meta.collecting = True

    def erase(self, block_id):
        """Erase a fully invalid Used block back to Clean"""
        meta = self.blocks[block_id]
        if meta.state is not BlockState.USED:
            raise FlashStateError("erase of {0} block {1}".format(
                meta.state.name.lower(), block_id))
        if meta.valid_count:
            raise FlashStateError("erase of block {0} with {1} valid pages".format(
                block_id, meta.valid_count))
        meta._reset()
        meta.erase_count += 1
        self.erases += 1
        listener = self.listeners[meta.channel]
        if listener is not None:
            listener.on_block_erased(block_id)

    def count_states(self):
        """Return dict of BlockState -> number of blocks"""
        counts = dict((s, 0) for s in BlockState)
        for meta in self.blocks:
            counts[meta.state] += 1
        return counts

    def check_invariants(self):
        """
        Assert page conservation, mapping soundness and per-block counters

        O(physical pages), meant for debug runs and tests.
        """
        npb = self.pages_per_block
        reverse = self.mapping.reverse
        total_valid = 0
        for meta in self.blocks:
            assert 0 <= meta.valid_count <= npb, meta
            assert meta.inv_count + meta.valid_count == meta.write_ptr, meta
            if meta.state is BlockState.USED:
                assert meta.write_ptr == npb, meta
            if meta.state is BlockState.CLEAN:
                assert meta.write_ptr == 0, meta
            start = meta.block_id * npb
            mapped = sum(1 for ppa in range(start, start + npb)
                if reverse[ppa] is not None)
            assert mapped == meta.valid_count, meta
            total_valid += meta.valid_count
        assert len(self.mapping) == total_valid
        for lpa, ppa in enumerate(self.mapping.forward):
            if ppa is not None:
                assert reverse[ppa] == lpa, (lpa, ppa)
        return True


def create_device(geometry, debug=False):
    """
    Return a fresh Device: all blocks Clean, mapping empty, counters zero

    Raises GeometryError if the geometry violates its invariants.
    """
    dev = Device(geometry, debug=debug)
    logger.debug("created device: %d ch x %d blk x %d pg, %d logical pages",
        geometry.channels, geometry.blocks_per_channel,
        geometry.pages_per_block, geometry.logical_pages)
    return dev
