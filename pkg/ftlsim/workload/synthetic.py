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
ftlsim.workload.synthetic

Seeded synthetic write workloads

Each generator is a pure function of (spec, seed, logical_pages): requests
are page aligned, `req_pages` pages long, and always inside the logical
address space.

USE:
>>> w = parse_workload_spec("hotspot:writes=10x,regions=0.1/0.9+0.9/0.1",
...     logical_pages=4096, seed=7)
>>> for req in w:
...     pass

"""
import logging
from collections import namedtuple

import numpy as np

from ftlsim.core import ConfigError
from ftlsim.workload.traces import WriteRequest, TraceWorkload

logger = logging.getLogger(__name__)

CHUNK = 1 << 16
FRACTION_TOL = 1e-6

UniformSpec = namedtuple('UniformSpec', ('total_writes', 'req_pages'))
HotspotSpec = namedtuple('HotspotSpec', ('total_writes', 'req_pages', 'fractions'))
ZipfSpec = namedtuple('ZipfSpec', ('total_writes', 'req_pages', 's'))
TraceSpec = namedtuple('TraceSpec', ('path', 'fmt'))


def _check_common(spec, logical_pages):
    if spec.total_writes < 0:
        raise ConfigError("writes must be >= 0")
    if spec.req_pages < 1:
        raise ConfigError("req_pages must be >= 1")
    if spec.req_pages > logical_pages:
        raise ConfigError("req_pages larger than the logical space")


def validate_fractions(fractions):
    """
    Check hotspot (address_fraction, access_fraction) pairs

    Each fraction in (0, 1], access fractions sum to 1, address fractions
    sum to at most 1.
    """
    if not fractions:
        raise ConfigError("hotspot needs at least one region")
    for addr, acc in fractions:
        if not (0 < addr <= 1) or not (0 < acc <= 1):
            raise ConfigError("hotspot fractions must be in (0, 1]: "
                "{0}/{1}".format(addr, acc))
    if abs(sum(acc for _, acc in fractions) - 1.0) > FRACTION_TOL:
        raise ConfigError("hotspot access fractions must sum to 1")
    if sum(addr for addr, _ in fractions) > 1.0 + FRACTION_TOL:
        raise ConfigError("hotspot address fractions exceed the address space")


def _emit(starts, req_pages, page_size, seq):
    length = req_pages * page_size
    for n, lpa in enumerate(starts.tolist()):
        yield WriteRequest(seq + n, lpa * page_size, length)


def _chunks(total):
    done = 0
    while done < total:
        n = min(CHUNK, total - done)
        yield done, n
        done += n


def gen_uniform(spec, seed, logical_pages, page_size=4096):
    """Start pages uniform over [0, logical_pages - req_pages]"""
    _check_common(spec, logical_pages)
    rng = np.random.default_rng(seed)
    span = logical_pages - spec.req_pages + 1
    for seq, n in _chunks(spec.total_writes):
        starts = rng.integers(0, span, size=n)
        for req in _emit(starts, spec.req_pages, page_size, seq):
            yield req


def hotspot_regions(fractions, logical_pages, req_pages=1):
    """
    Return (starts, sizes) numpy arrays of the hotspot regions in pages

    Regions are laid out back to back from lpa 0. A region always holds at
    least one request start.
    """
    starts = []
    sizes = []
    cum = 0.0
    for addr, _ in fractions:
        lo = int(np.floor(round(cum * logical_pages, 9)))
        cum += addr
        hi = int(np.floor(round(cum * logical_pages, 9)))
        hi = min(hi, logical_pages)
        lo = min(lo, logical_pages - req_pages)
        size = max(1, hi - lo - req_pages + 1)
        starts.append(lo)
        sizes.append(size)
    return np.array(starts, dtype=np.int64), np.array(sizes, dtype=np.int64)


def gen_hotspot(spec, seed, logical_pages, page_size=4096):
    """
    Sample a region by access fraction, then a start page uniform inside it
    """
    _check_common(spec, logical_pages)
    validate_fractions(spec.fractions)
    starts, sizes = hotspot_regions(spec.fractions, logical_pages,
        spec.req_pages)
    p = np.array([acc for _, acc in spec.fractions], dtype=float)
    p = p / p.sum()
    rng = np.random.default_rng(seed)
    for seq, n in _chunks(spec.total_writes):
        region = rng.choice(len(p), size=n, p=p)
        offs = np.floor(rng.random(n) * sizes[region]).astype(np.int64)
        for req in _emit(starts[region] + offs, spec.req_pages, page_size, seq):
            yield req


def gen_zipf(spec, seed, logical_pages, page_size=4096):
    """
    Zipf(s) over request slots; slot ranks are shuffled across the space

    Notes
    -----
    Unlike numpy's `Generator.zipf`, the support is bounded to the slots of
    the logical space and any s > 0 is accepted.
    """
    _check_common(spec, logical_pages)
    if not spec.s > 0:
        raise ConfigError("zipf exponent s must be > 0")
    rng = np.random.default_rng(seed)
    slots = logical_pages - spec.req_pages + 1
    weights = 1.0 / np.power(np.arange(1, slots + 1, dtype=float), spec.s)
    cdf = np.cumsum(weights)
    cdf /= cdf[-1]
    perm = rng.permutation(slots)
    for seq, n in _chunks(spec.total_writes):
        rank = np.searchsorted(cdf, rng.random(n), side='right')
        rank = np.minimum(rank, slots - 1)
        for req in _emit(perm[rank], spec.req_pages, page_size, seq):
            yield req


class SyntheticWorkload(object):
    """
    Re-iterable seeded workload, every iteration replays the same stream

    Attributes
    ----------
    spec : UniformSpec, HotspotSpec or ZipfSpec
    seed : int
    logical_pages : int
    page_size : int
    """
    generator = None

    def __init__(self, spec, logical_pages, page_size=4096, seed=0):
        _check_common(spec, logical_pages)
        self.spec = spec
        self.logical_pages = logical_pages
        self.page_size = page_size
        self.seed = seed

    def __iter__(self):
        return self.generator(self.spec, self.seed, self.logical_pages,
            self.page_size)

    @property
    def expected_page_writes(self):
        return self.spec.total_writes * self.spec.req_pages

    def describe(self):
        return "{0}:{1} ({2} page writes)".format(type(self).__name__,
            self.spec, self.expected_page_writes)


class UniformWorkload(SyntheticWorkload):
    generator = staticmethod(gen_uniform)


class HotspotWorkload(SyntheticWorkload):
    generator = staticmethod(gen_hotspot)

    def __init__(self, spec, logical_pages, page_size=4096, seed=0):
        validate_fractions(spec.fractions)
        super(HotspotWorkload, self).__init__(spec, logical_pages, page_size,
            seed)


class ZipfWorkload(SyntheticWorkload):
    generator = staticmethod(gen_zipf)

    def __init__(self, spec, logical_pages, page_size=4096, seed=0):
        if not spec.s > 0:
            raise ConfigError("zipf exponent s must be > 0")
        super(ZipfWorkload, self).__init__(spec, logical_pages, page_size,
            seed)


def _float(key, value):
    try:
        return float(value)
    except ValueError:
        raise ConfigError("workload option {0}={1!r} is not a number".format(
            key, value))


def _writes(value, logical_pages, req_pages):
    if value.endswith('x'):
        mult = _float('writes', value[:-1])
        return int(round(mult * logical_pages / req_pages))
    try:
        return int(value)
    except ValueError:
        raise ConfigError("workload option writes={0!r} is not a count".format(
            value))


def _regions(value):
    fractions = []
    for item in value.split('+'):
        parts = item.split('/')
        if len(parts) != 2:
            raise ConfigError("hotspot region {0!r} is not addr/access".format(
                item))
        fractions.append((_float('regions', parts[0]),
            _float('regions', parts[1])))
    return tuple(fractions)


WORKLOAD_KINDS = ('uniform', 'hotspot', 'zipf')


def parse_workload_spec(text, logical_pages, page_size=4096, seed=0):
    """
    Build a workload from a spec string

    Inputs
    ------
    text : str, one of
        uniform:writes=N[,req_pages=k]
        hotspot:writes=N[,req_pages=k],regions=a/b+c/d
        zipf:writes=N[,req_pages=k],s=x
        `writes=10x` means 10 * logical_pages / req_pages requests.
    logical_pages : int
    page_size : int
    seed : int

    Returns
    -------
    SyntheticWorkload subclass instance
    """
    kind, _, rest = text.strip().partition(':')
    kind = kind.strip().lower()
    if kind not in WORKLOAD_KINDS:
        raise ConfigError("unknown workload kind {0!r}".format(kind))
    opts = {}
    for item in filter(None, (s.strip() for s in rest.split(','))):
        key, sep, value = item.partition('=')
        if not sep:
            raise ConfigError("workload option {0!r} is not key=value".format(
                item))
        opts[key.strip()] = value.strip()

    allowed = {'writes', 'req_pages'}
    allowed |= {'hotspot': {'regions'}, 'zipf': {'s'}}.get(kind, set())
    unknown = set(opts) - allowed
    if unknown:
        raise ConfigError("unknown {0} workload options: {1}".format(
            kind, ", ".join(sorted(unknown))))
    if 'writes' not in opts:
        raise ConfigError("workload needs writes=N")

    try:
        req_pages = int(opts.get('req_pages', 1))
    except ValueError:
        raise ConfigError("req_pages must be an integer")
    if req_pages < 1:
        raise ConfigError("req_pages must be >= 1")
    writes = _writes(opts['writes'], logical_pages, req_pages)

    if kind == 'uniform':
        return UniformWorkload(UniformSpec(writes, req_pages), logical_pages,
            page_size, seed)
    if kind == 'hotspot':
        if 'regions' not in opts:
            raise ConfigError("hotspot workload needs regions=a/b+c/d")
        spec = HotspotSpec(writes, req_pages, _regions(opts['regions']))
        return HotspotWorkload(spec, logical_pages, page_size, seed)
    if 's' not in opts:
        raise ConfigError("zipf workload needs s=x")
    spec = ZipfSpec(writes, req_pages, _float('s', opts['s']))
    return ZipfWorkload(spec, logical_pages, page_size, seed)


def make_workload(spec, logical_pages, page_size=4096, seed=0, lba_unit=512,
        strict=True):
    """
    Build a workload object from a WorkloadSpec tuple (TraceSpec or one of
    the synthetic specs)
    """
    if isinstance(spec, TraceSpec):
        return TraceWorkload(spec.path, spec.fmt, lba_unit=lba_unit,
            strict=strict)
    kinds = {
        UniformSpec: UniformWorkload,
        HotspotSpec: HotspotWorkload,
        ZipfSpec: ZipfWorkload,
    }
    try:
        cls = kinds[type(spec)]
    except KeyError:
        raise ConfigError("unknown workload spec {0!r}".format(spec))
    return cls(spec, logical_pages, page_size, seed)
