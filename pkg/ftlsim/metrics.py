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
ftlsim.metrics

Write amplification accounting, wear statistics, selection cost counters
and the report files.

WA of a span of the run is

    (host page writes + GC copy writes) / host page writes

The windowed series cuts the measured host writes into fixed windows; GC
copies are charged to the window of the host write that triggered them.

"""
import csv
import json
import logging
import os
from collections import namedtuple

import numpy as np

from ftlsim.core import Dict, sig6

logger = logging.getLogger(__name__)

SUMMARY_FILE = 'summary.json'
WA_SERIES_FILE = 'wa_series.csv'
ERASE_HIST_FILE = 'erase_hist.csv'

WA_SERIES_FIELDS = ('window_end_host_writes', 'wa')
ERASE_HIST_FIELDS = ('block_id', 'erase_count')

VictimRecord = namedtuple('VictimRecord', ('channel', 'block_id',
    'valid_count', 'cb_score', 'scan_cost', 'registered', 'rebuild'))


def wa_ratio(host, copies):
    """Return (wa, defined), 1.0 and False without host writes"""
    if host == 0:
        return 1.0, False
    return (host + copies) / float(host), True


def coefficient_of_variation(values):
    """Population std / mean, 0.0 for an empty or all-zero sample"""
    if not len(values):
        return 0.0
    arr = np.asarray(values, dtype=float)
    mean = arr.mean()
    if mean == 0:
        return 0.0
    return float(arr.std() / mean)


class Recorder(object):
    """
    Counters of one span of a run (measured replay or warm-up shadow)

    Attributes
    ----------
    window : int host writes per WA window, None disables the series
    host_page_writes : int
    gc_copy_writes : int
    gc_count : int of GC cycles (one erase each)
    erase_counts : list of per-block erases in this span
    selections : int
    scan_cost_total : int
    dropped_requests : int of requests without an in-range page
    dropped_pages : int of page writes beyond the logical space
    wa_series : list of (window_end_host_writes, wa) of complete windows
    victims : list of VictimRecord or None
    """
    def __init__(self, total_blocks, window=None, trace_victims=False):
        if window is not None and window < 1:
            window = 1
        self.window = window
        self.host_page_writes = 0
        self.gc_copy_writes = 0
        self.gc_count = 0
        self.erase_counts = [0] * total_blocks
        self.selections = 0
        self.scan_cost_total = 0
        self.dropped_requests = 0
        self.dropped_pages = 0
        self.wa_series = []
        self.victims = [] if trace_victims else None
        self._win_host = 0
        self._win_copies = 0

    def _close_window(self):
        wa, _ = wa_ratio(self._win_host, self._win_copies)
        self.wa_series.append((self.host_page_writes, wa))
        self._win_host = 0
        self._win_copies = 0

    def record_host_write(self):
        if self.window and self._win_host == self.window:
            self._close_window()
        self.host_page_writes += 1
        self._win_host += 1

    def record_gc_copy(self):
        self.gc_copy_writes += 1
        self._win_copies += 1

    def record_erase(self, block_id):
        self.erase_counts[block_id] += 1
        self.gc_count += 1

    def record_selection(self, scan_cost):
        self.selections += 1
        self.scan_cost_total += scan_cost

    def record_victim(self, record):
        if self.victims is not None:
            self.victims.append(record)

    def record_dropped(self, pages, whole_request):
        self.dropped_pages += pages
        if whole_request:
            self.dropped_requests += 1

    def finish(self):
        """Close a full trailing window, return the incomplete tail"""
        if self.window and self._win_host == self.window:
            self._close_window()
        return (self._win_host, self._win_copies)

    def scalars(self):
        """Dict of the span's scalar counters (the warm-up shadow report)"""
        wa, defined = wa_ratio(self.host_page_writes, self.gc_copy_writes)
        return Dict([
            ('host_page_writes', self.host_page_writes),
            ('gc_copy_writes', self.gc_copy_writes),
            ('wa', wa),
            ('wa_defined', defined),
            ('gc_count', self.gc_count),
            ('selections', self.selections),
            ('scan_cost_total', self.scan_cost_total),
        ])


class SimReport(object):
    """
    Result of one simulation run

    Attributes
    ----------
    strategy : str canonical strategy spec
    host_page_writes : int, measured (post warm-up)
    gc_copy_writes : int
    wa_final : float
    wa_defined : bool, False when there were no host writes
    wa_series : list of (window_end_host_writes, wa)
    tail_window : (host writes, gc copies) of the trailing incomplete window
    window : int
    erase_histogram : list of per-block erase counts
    erase_cv : float coefficient of variation of erase_histogram
    gc_count : int
    selections : int
    scan_cost_total : int
    scan_cost_mean : float
    dropped_requests : int
    dropped_pages : int
    bookkeeping : Dict of strategy counters summed over channels
    profile : Dict of bench mode seconds, empty otherwise
    warmup : Dict of warm-up scalars, empty without warm-up
    victims : list of VictimRecord or None
    wall_clock : float seconds of the measured replay (bench mode) or None
    """
    def __init__(self, strategy, recorder, bookkeeping=None, profile=None,
            warmup=None, wall_clock=None):
        tail = recorder.finish()
        self.strategy = strategy
        self.host_page_writes = recorder.host_page_writes
        self.gc_copy_writes = recorder.gc_copy_writes
        self.wa_final, self.wa_defined = wa_ratio(self.host_page_writes,
            self.gc_copy_writes)
        self.wa_series = list(recorder.wa_series)
        self.tail_window = tail
        self.window = recorder.window
        self.erase_histogram = list(recorder.erase_counts)
        self.erase_cv = coefficient_of_variation(self.erase_histogram)
        self.gc_count = recorder.gc_count
        self.selections = recorder.selections
        self.scan_cost_total = recorder.scan_cost_total
        self.scan_cost_mean = (self.scan_cost_total / float(self.selections)
            if self.selections else 0.0)
        self.dropped_requests = recorder.dropped_requests
        self.dropped_pages = recorder.dropped_pages
        self.bookkeeping = bookkeeping if bookkeeping is not None else Dict()
        self.profile = profile if profile is not None else Dict()
        self.warmup = warmup if warmup is not None else Dict()
        self.victims = recorder.victims
        self.wall_clock = wall_clock

    @property
    def host_writes_per_sec(self):
        if not self.wall_clock:
            return None
        return self.host_page_writes / self.wall_clock

    def summary(self):
        """Dict of every scalar field, floats at 6 significant digits"""
        s = Dict([
            ('strategy', self.strategy),
            ('host_page_writes', self.host_page_writes),
            ('gc_copy_writes', self.gc_copy_writes),
            ('wa_final', self.wa_final),
            ('wa_defined', self.wa_defined),
            ('window', self.window),
            ('windows', len(self.wa_series)),
            ('tail_window', Dict([('host_page_writes', self.tail_window[0]),
                ('gc_copy_writes', self.tail_window[1])])),
            ('erase_cv', self.erase_cv),
            ('gc_count', self.gc_count),
            ('selections', self.selections),
            ('scan_cost_total', self.scan_cost_total),
            ('scan_cost_mean', self.scan_cost_mean),
            ('dropped_requests', self.dropped_requests),
            ('dropped_pages', self.dropped_pages),
            ('fastcb_rebuild_empty', self.bookkeeping.get(
                'fastcb_rebuild_empty', 0)),
            ('fastcb_rebuild_overflow', self.bookkeeping.get(
                'fastcb_rebuild_overflow', 0)),
            ('approx_refills', self.bookkeeping.get('approx_refills', 0)),
            ('bookkeeping', self.bookkeeping),
            ('warmup', self.warmup),
        ])
        if self.wall_clock is not None:
            s['wall_clock'] = self.wall_clock
            s['host_writes_per_sec'] = self.host_writes_per_sec
            s['profile'] = self.profile
        return _round(s)

    def line(self):
        """One-line human summary"""
        return "{0}: wa={1:.6g} gc={2} scan_cost_mean={3:.6g}".format(
            self.strategy, self.wa_final, self.gc_count, self.scan_cost_mean)


def _round(obj):
    if isinstance(obj, dict):
        return Dict((k, _round(v)) for k, v in obj.items())
    return sig6(obj)


def _fmt(value):
    if isinstance(value, float):
        return "{0:.6g}".format(value)
    return value


def write_csv(path, fields, rows):
    """Write rows (sequences) under a header, LF line endings"""
    with open(path, 'w', newline='', encoding='utf-8') as f:
        w = csv.writer(f, lineterminator='\n')
        w.writerow(fields)
        for row in rows:
            w.writerow([_fmt(v) for v in row])


def export(report, outdir):
    """
    Write summary.json, wa_series.csv and erase_hist.csv into outdir

    Returns
    -------
    list of the written paths
    """
    os.makedirs(outdir, exist_ok=True)
    paths = [os.path.join(outdir, name) for name in (SUMMARY_FILE,
        WA_SERIES_FILE, ERASE_HIST_FILE)]
    with open(paths[0], 'w', encoding='utf-8') as f:
        json.dump(report.summary(), f, indent=2, sort_keys=True)
        f.write('\n')
    write_csv(paths[1], WA_SERIES_FIELDS, report.wa_series)
    write_csv(paths[2], ERASE_HIST_FIELDS, enumerate(report.erase_histogram))
    logger.info("report written to %s", outdir)
    return paths
