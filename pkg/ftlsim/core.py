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
Core/common for ftlsim packages

Exceptions, the logical clock and small number helpers shared by the flash
model, the GC strategies and the FTL.

"""
import math
from collections import OrderedDict as Dict

# Score of a block without valid pages, dominates every finite score
INF = float('inf')


class FtlSimError(Exception):
    """Base class for simulator errors"""


class GeometryError(FtlSimError, ValueError):
    """Device geometry violates a layout invariant"""


class FlashStateError(FtlSimError):
    """Illegal page or block life-cycle transition"""


class DeviceWedged(FtlSimError):
    """GC cannot free a block on a channel that is below its watermark"""


class ConfigError(FtlSimError, ValueError):
    """Invalid run, FTL, strategy or workload configuration"""


class UnknownBlockError(FtlSimError, KeyError):
    """Strategy event for a block that was never registered"""


class TraceFormatError(FtlSimError, ValueError):
    """
    Malformed trace line

    Attributes
    ----------
    lineno : int of 1-based line number in the source stream
    line : str of the offending text
    """
    def __init__(self, message, lineno=None, line=None):
        if lineno is not None:
            message = "line {0}: {1}".format(lineno, message)
        super(TraceFormatError, self).__init__(message)
        self.lineno = lineno
        self.line = line


class Clock(object):
    """
    Logical time of a run

    Counts host page writes since the start of the simulation. GC copies do
    not advance it and it is never reset between warm-up and replay.
    """
    __slots__ = ('now',)

    def __init__(self, now=0):
        self.now = now

    def tick(self):
        """Advance by one host page write, return the new time"""
        self.now += 1
        return self.now


def ceil_product(count, factor):
    """
    Return ceil(count * factor) without float noise

    100 * 1.07 is 107.00000000000001 in binary floating point, rounding to 9
    places first keeps capacity checks exact for the usual decimal factors.
    """
    return int(math.ceil(round(count * factor, 9)))


def floor_quotient(count, factor):
    """Return floor(count / factor) without float noise"""
    return int(math.floor(round(count / float(factor), 9)))


def sig6(value):
    """Round a float to 6 significant digits (ints pass through)"""
    if isinstance(value, float) and math.isfinite(value):
        return float("{0:.6g}".format(value))
    return value
