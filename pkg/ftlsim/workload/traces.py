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
ftlsim.workload.traces

Trace ingestion

Canonical format
----------------
UTF-8 text, one request per line, `#` starts a comment line. A line that
is not valid UTF-8 is malformed like any other unparsable line:

    timestamp,op,offset,length

timestamp : any integer (ignored by the simulator, which keeps its own clock)
op        : r or w, reads are dropped because they do not affect GC
offset    : byte offset, decimal
length    : bytes, decimal, > 0

SPC-style CSV
-------------
The OLTP traces published by the storage trace repositories:

    ASU,LBA,size,opcode,timestamp

with LBA in units of lba_unit bytes (512 or 4096, traces disagree).

"""
import logging
import os
from collections import namedtuple

from ftlsim.core import ConfigError, TraceFormatError

logger = logging.getLogger(__name__)

WriteRequest = namedtuple('WriteRequest', ('seq', 'byte_offset', 'length'))

TRACE_FORMATS = ('canonical', 'spc')


def _text(raw, lineno):
    """Stripped text of one line read from a binary or text stream"""
    if isinstance(raw, bytes):
        try:
            raw = raw.decode('utf-8')
        except UnicodeDecodeError as e:
            raise TraceFormatError("invalid UTF-8 at byte {0}".format(e.start),
                lineno, raw.decode('utf-8', 'replace').strip())
    return raw.strip()


class _TraceParser(object):
    """
    Line parser base

    Attributes
    ----------
    strict : bool, raise on the first malformed line (else log and count)
    writes : int of write requests yielded
    reads : int of read lines dropped
    malformed : int of malformed lines skipped (strict=False only)
    """
    def __init__(self, stream, strict=True):
        self.stream = stream
        self.strict = strict
        self.writes = 0
        self.reads = 0
        self.malformed = 0

    def _parse(self, fields, lineno, line):
        """Return (is_write, offset, length), raise TraceFormatError"""
        raise NotImplementedError

    def _skip(self, line):
        return not line or line.startswith('#')

    def __iter__(self):
        for lineno, raw in enumerate(self.stream, 1):
            try:
                line = _text(raw, lineno)
                if self._skip(line):
                    continue
                is_write, offset, length = self._parse(
                    [f.strip() for f in line.split(',')], lineno, line)
            except TraceFormatError as e:
                if self.strict:
                    raise
                self.malformed += 1
                logger.warning("skipping malformed trace line: %s", e)
                continue
            if not is_write:
                self.reads += 1
                continue
            yield WriteRequest(self.writes, offset, length)
            self.writes += 1


def _int(value, what, lineno, line):
    try:
        return int(value)
    except ValueError:
        raise TraceFormatError("{0} {1!r} is not an integer".format(what, value),
            lineno, line)


class CanonicalTraceParser(_TraceParser):
    """Parser for `timestamp,op,offset,length` lines"""

    def _parse(self, fields, lineno, line):
        if len(fields) != 4:
            raise TraceFormatError("expected 4 fields, got {0}".format(
                len(fields)), lineno, line)
        _int(fields[0], "timestamp", lineno, line)
        op = fields[1].lower()
        if op not in ('r', 'w'):
            raise TraceFormatError("unknown op {0!r}".format(fields[1]),
                lineno, line)
        offset = _int(fields[2], "offset", lineno, line)
        length = _int(fields[3], "length", lineno, line)
        if offset < 0:
            raise TraceFormatError("negative offset", lineno, line)
        if op == 'w' and length <= 0:
            raise TraceFormatError("write length must be > 0", lineno, line)
        return op == 'w', offset, length


class SpcTraceParser(_TraceParser):
    """
    Parser for SPC-style `ASU,LBA,size,opcode,timestamp` rows

    asu_stride : int bytes added per ASU number so that storage units do not
        alias (0 maps every ASU onto the same address space)
    """
    def __init__(self, stream, lba_unit=512, asu_stride=0, strict=True):
        super(SpcTraceParser, self).__init__(stream, strict=strict)
        if lba_unit < 1:
            raise ConfigError("lba_unit must be positive")
        self.lba_unit = lba_unit
        self.asu_stride = asu_stride

    def _parse(self, fields, lineno, line):
        if len(fields) < 5:
            raise TraceFormatError("expected 5 fields, got {0}".format(
                len(fields)), lineno, line)
        asu = _int(fields[0], "ASU", lineno, line)
        lba = _int(fields[1], "LBA", lineno, line)
        size = _int(fields[2], "size", lineno, line)
        opcode = fields[3]
        if opcode not in ('r', 'R', 'w', 'W'):
            raise TraceFormatError("unknown opcode {0!r}".format(opcode),
                lineno, line)
        try:
            float(fields[4])
        except ValueError:
            raise TraceFormatError("bad timestamp {0!r}".format(fields[4]),
                lineno, line)
        if lba < 0 or asu < 0:
            raise TraceFormatError("negative address", lineno, line)
        is_write = opcode in ('w', 'W')
        if is_write and size <= 0:
            raise TraceFormatError("write size must be > 0", lineno, line)
        return is_write, asu * self.asu_stride + lba * self.lba_unit, size


def parse_canonical(stream, strict=True):
    """Yield WriteRequests of a canonical trace stream, in file order"""
    return iter(CanonicalTraceParser(stream, strict=strict))


def import_spc(stream, lba_unit=512, asu_stride=0, strict=True):
    """Yield WriteRequests of an SPC-style CSV stream, W/w rows only"""
    return iter(SpcTraceParser(stream, lba_unit=lba_unit,
        asu_stride=asu_stride, strict=strict))


class TraceWorkload(object):
    """
    Re-iterable trace file workload

    Every iteration reopens the file, so the hotness pre-pass and the replay
    see the same requests.
    """
    def __init__(self, path, fmt='canonical', lba_unit=512, asu_stride=0,
            strict=True):
        if fmt not in TRACE_FORMATS:
            raise ConfigError("unknown trace format {0!r}".format(fmt))
        self.path = path
        self.fmt = fmt
        self.lba_unit = lba_unit
        self.asu_stride = asu_stride
        self.strict = strict

    def __iter__(self):
        with open(self.path, 'rb') as f:
            if self.fmt == 'spc':
                parser = SpcTraceParser(f, self.lba_unit, self.asu_stride,
                    strict=self.strict)
            else:
                parser = CanonicalTraceParser(f, strict=self.strict)
            for req in parser:
                yield req

    def describe(self):
        return "trace:{0}:{1}".format(self.fmt, os.path.basename(self.path))
