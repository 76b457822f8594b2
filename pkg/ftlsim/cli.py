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
ftlsim.cli

Command line driver

    ftlsim run   --strategy fastcb --workload hotspot:writes=10x,regions=0.1/0.9+0.9/0.1
    ftlsim sweep --axis q --values 0.1% 1% 25% --workload ...
    ftlsim bench --strategies cb fastcb --repeats 3 --workload ...

Every run option can also come from a flat key=value file (--config), with
`#` comments; flags given on the command line win over the file.

Exit codes: 0 success, 1 a sweep point failed, 2 usage, configuration or
I/O error.

"""
import argparse
import logging
import multiprocessing
import os
import re
import sys

import numpy as np

from ftlsim.core import Dict, ConfigError, FtlSimError, ceil_product
from ftlsim.flash import DeviceGeometry
from ftlsim.ftl import FtlConfig, simulate
from ftlsim.gc import strategy_label
from ftlsim.metrics import export, write_csv
from ftlsim.workload import (TRACE_FORMATS, TraceSpec, make_workload,
    parse_workload_spec)

logger = logging.getLogger(__name__)

SWEEP_AXES = ('strategy', 'q', 'pages-per-block', 'capacity')
SWEEP_FIELDS = ('point', 'wa_final', 'scan_cost_mean', 'gc_count',
    'total_blocks')
BENCH_FIELDS = ('strategy', 'median_seconds', 'host_writes_per_sec',
    'scan_cost_mean', 'wa_final', 'speedup_vs_cb', 'rebuilds',
    'rebuild_seconds')

_SIZE = re.compile(r'^\s*(\d+)\s*([KMGT]?)(I?B)?\s*$', re.I)
_UNITS = {'': 1, 'K': 1 << 10, 'M': 1 << 20, 'G': 1 << 30, 'T': 1 << 40}


def parse_size(text):
    """Bytes of '4096', '64K', '1G', '1GiB' (binary units)"""
    m = _SIZE.match(str(text))
    if not m:
        raise ConfigError("bad size {0!r}".format(text))
    return int(m.group(1)) * _UNITS[m.group(2).upper()]


def on_off(text):
    value = str(text).strip().lower()
    if value in ('on', 'yes', 'true', '1'):
        return True
    if value in ('off', 'no', 'false', '0'):
        return False
    raise ConfigError("expected on or off, got {0!r}".format(text))


def trace_format(text):
    if text not in TRACE_FORMATS:
        raise ConfigError("trace format must be one of {0}".format(
            ", ".join(TRACE_FORMATS)))
    return text


# RunSpec field -> (converter, help), also the accepted config file keys
FIELDS = Dict([
    ('strategy', (str, "victim selection strategy spec")),
    ('workload', (str, "synthetic workload spec, e.g. uniform:writes=10x")),
    ('trace', (str, "trace file to replay")),
    ('trace_format', (trace_format, "canonical or spc")),
    ('lba_unit', (int, "bytes per LBA of spc traces")),
    ('permissive', (on_off, "skip malformed trace lines (on|off)")),
    ('channels', (int, "number of channels")),
    ('blocks_per_channel', (int, "erase blocks per channel")),
    ('pages_per_block', (int, "pages per erase block")),
    ('page_size', (int, "bytes per page")),
    ('logical_capacity', (parse_size, "host capacity in bytes (64M, 1G)")),
    ('op_factor', (float, "overprovisioning factor physical/logical")),
    ('hotness_levels', (int, "hotness streams per channel")),
    ('warmup', (on_off, "sequential fill plus 2x random writes (on|off)")),
    ('seed', (int, "random seed of workload and warm-up")),
    ('out', (str, "output directory")),
    ('window', (int, "host writes per WA window")),
    ('debug', (on_off, "check invariants after every write (on|off)")),
])


class RunSpec(object):
    """
    Everything one simulation needs, with desk-scale defaults

    Keyword arguments override the class attributes, unknown keys raise
    ConfigError.
    """
    strategy = 'greedy'
    workload = None
    trace = None
    trace_format = 'canonical'
    lba_unit = 512
    permissive = False
    channels = 1
    blocks_per_channel = 4096
    pages_per_block = 64
    page_size = 4096
    logical_capacity = None
    op_factor = 1.07
    hotness_levels = 3
    warmup = True
    seed = 0
    out = 'ftlsim-out'
    window = None
    debug = False

    def __init__(self, **kwargs):
        for key, value in kwargs.items():
            if key not in FIELDS:
                raise ConfigError("unknown run option {0!r}".format(key))
            setattr(self, key, value)

    def replace(self, **kwargs):
        d = self.as_dict()
        d.update(kwargs)
        return RunSpec(**d)

    def as_dict(self):
        return Dict((k, getattr(self, k)) for k in FIELDS)

    def geometry(self):
        logical_pages = None
        if self.logical_capacity is not None:
            logical_pages = self.logical_capacity // self.page_size
        return DeviceGeometry(self.channels, self.blocks_per_channel,
            self.pages_per_block, page_size=self.page_size,
            logical_pages=logical_pages, op_factor=self.op_factor)

    def ftl_config(self, **kwargs):
        return FtlConfig(geometry=self.geometry().validate(),
            strategy=self.strategy, hotness_levels=self.hotness_levels,
            warm_up=self.warmup, rng_seed=self.seed, window=self.window,
            debug=self.debug, **kwargs)

    def make_workload(self, logical_pages):
        if self.trace:
            return make_workload(TraceSpec(self.trace, self.trace_format),
                logical_pages, self.page_size, lba_unit=self.lba_unit,
                strict=not self.permissive)
        return parse_workload_spec(self.workload, logical_pages,
            self.page_size, seed=self.seed)

    def validate(self):
        """Check every option, return (FtlConfig, workload)"""
        if bool(self.workload) == bool(self.trace):
            raise ConfigError("give exactly one of --workload and --trace")
        if self.trace and not os.path.isfile(self.trace):
            raise ConfigError("trace file not found: {0}".format(self.trace))
        cfg = self.ftl_config()
        return cfg, self.make_workload(cfg.geometry.logical_pages)


def read_config(path):
    """Return dict of typed RunSpec options from a key=value file"""
    opts = {}
    with open(path, encoding='utf-8') as f:
        for n, line in enumerate(f, 1):
            line = line.strip()
            if not line or line.startswith('#'):
                continue
            key, sep, value = line.partition('=')
            key = key.strip().replace('-', '_')
            if not sep:
                raise ConfigError("{0}:{1}: expected key=value".format(path, n))
            if key not in FIELDS:
                raise ConfigError("{0}:{1}: unknown option {2!r}".format(
                    path, n, key))
            try:
                opts[key] = FIELDS[key][0](value.strip())
            except ValueError as e:
                raise ConfigError("{0}:{1}: {2}: {3}".format(path, n, key, e))
    return opts


def build_spec(args):
    """RunSpec from the config file overridden by the given flags"""
    opts = read_config(args.config) if args.config else {}
    for key in FIELDS:
        value = getattr(args, key, None)
        if value is not None:
            opts[key] = value
    return RunSpec(**opts)


def run_one(spec, bench=False):
    cfg, workload = spec.validate()
    logger.info("workload %s", workload.describe())
    if bench:
        cfg.bench = True
    return cfg, simulate(cfg, workload)


def cmd_run(args):
    spec = build_spec(args)
    _, report = run_one(spec)
    export(report, spec.out)
    print(report.line())
    return 0


# -- sweep -------------------------------------------------------------------

def sweep_points(spec, axis, values):
    """Return list of (label, RunSpec) of a sweep"""
    if axis not in SWEEP_AXES:
        raise ConfigError("unknown sweep axis {0!r}".format(axis))
    if not values:
        raise ConfigError("sweep needs at least one value")
    points = []
    for value in values:
        if axis == 'strategy':
            strategy_label(value)
            point = spec.replace(strategy=value)
        elif axis == 'q':
            q = value if value.endswith('%') else value + '%'
            point = spec.replace(strategy='approxcb:q={0}'.format(q))
            strategy_label(point.strategy)
        elif axis == 'pages-per-block':
            ppb = int(value)
            if ppb < 2:
                raise ConfigError("pages per block must be >= 2")
            pages = spec.blocks_per_channel * spec.pages_per_block
            point = spec.replace(pages_per_block=ppb,
                blocks_per_channel=pages // ppb)
        else:
            capacity = parse_size(value)
            logical_pages = capacity // spec.page_size
            need = ceil_product(logical_pages, spec.op_factor)
            per_channel = -(-need // spec.channels)
            bpc = -(-per_channel // spec.pages_per_block)
            point = spec.replace(logical_capacity=capacity,
                blocks_per_channel=bpc)
        label = "{0}={1}".format(axis, value)
        points.append((label, point.replace(out=os.path.join(spec.out,
            label))))
    return points


def _run_point(job):
    """Sweep worker, returns (label, row or None)"""
    label, spec = job
    logger.info("sweep point %s started", label)
    try:
        cfg, report = run_one(spec)
        export(report, spec.out)
    except Exception:
        logger.exception("sweep point %s failed", label)
        return label, None
    logger.info("sweep point %s: wa=%.6g", label, report.wa_final)
    return label, (label, report.wa_final, report.scan_cost_mean,
        report.gc_count, cfg.geometry.total_blocks)


def cmd_sweep(args):
    spec = build_spec(args)
    points = sweep_points(spec, args.axis, args.values)
    for label, point in points:
        point.validate()
    if args.jobs > 1:
        with multiprocessing.Pool(min(args.jobs, len(points))) as pool:
            results = pool.map(_run_point, points)
    else:
        results = [_run_point(p) for p in points]
    rows = [row for _, row in results if row is not None]
    os.makedirs(spec.out, exist_ok=True)
    write_csv(os.path.join(spec.out, 'sweep.csv'), SWEEP_FIELDS, rows)
    for row in rows:
        print("{0}: wa={1:.6g} scan_cost_mean={2:.6g} gc={3}".format(*row))
    failed = [label for label, row in results if row is None]
    if failed:
        print("ftlsim: sweep points failed: {0}".format(", ".join(failed)),
            file=sys.stderr)
        return 1
    return 0


# -- bench -------------------------------------------------------------------

def cmd_bench(args):
    spec = build_spec(args)
    if args.repeats < 3:
        raise ConfigError("bench needs --repeats >= 3")
    strategies = args.strategies or ['cb', 'fastcb']
    rows = []
    medians = {}
    rebuild_cols = {}
    for strategy in strategies:
        point = spec.replace(strategy=strategy)
        point.validate()
        seconds = []
        rebuild_seconds = []
        first = None
        for r in range(args.repeats):
            _, report = run_one(point, bench=True)
            seconds.append(report.wall_clock)
            rebuild_seconds.append(report.profile['rebuild_seconds'])
            key = (report.wa_final, report.gc_count, report.scan_cost_total)
            if first is None:
                first = report
                export(report, os.path.join(spec.out, report.strategy))
            elif key != (first.wa_final, first.gc_count,
                    first.scan_cost_total):
                raise FtlSimError("bench repeats of {0} disagree".format(
                    strategy))
            logger.info("bench %s repeat %d: %.6g s", first.strategy, r + 1,
                report.wall_clock)
        median = float(np.median(seconds))
        medians[first.strategy] = median
        rate = first.host_page_writes / median if median else 0.0
        rebuilds = (first.bookkeeping.get('fastcb_rebuild_empty', 0) +
            first.bookkeeping.get('fastcb_rebuild_overflow', 0))
        rows.append([first.strategy, median, rate, first.scan_cost_mean,
            first.wa_final])
        rebuild_cols[first.strategy] = [rebuilds,
            float(np.median(rebuild_seconds))]
    base = medians.get('cb')
    for row in rows:
        row.append(base / row[1] if base and row[1] else '')
        row.extend(rebuild_cols[row[0]])
    os.makedirs(spec.out, exist_ok=True)
    write_csv(os.path.join(spec.out, 'bench.csv'), BENCH_FIELDS, rows)
    for row in rows:
        speedup = "{0:.6g}".format(row[5]) if row[5] != '' else '-'
        print("{0}: median={1:.6g}s rate={2:.6g}/s scan_cost_mean={3:.6g} "
            "speedup_vs_cb={4}".format(row[0], row[1], row[2], row[3], speedup))
    return 0


# -- parser ------------------------------------------------------------------

def _add_run_options(p):
    p.add_argument('--config', help="key=value file with run options")
    for name, (conv, text) in FIELDS.items():
        kwargs = dict(type=conv, default=None, help=text)
        if name == 'trace_format':
            kwargs['choices'] = TRACE_FORMATS
            kwargs['type'] = str
        p.add_argument('--' + name.replace('_', '-'), dest=name, **kwargs)
    verbosity = p.add_mutually_exclusive_group()
    verbosity.add_argument('-v', '--verbose', action='count', default=0)
    verbosity.add_argument('-q', '--quiet', action='store_true')


def make_parser():
    parser = argparse.ArgumentParser(prog='ftlsim',
        description="SSD garbage collection simulator")
    sub = parser.add_subparsers(dest='command')
    sub.required = True

    p = sub.add_parser('run', help="one simulation")
    _add_run_options(p)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser('sweep', help="one simulation per value of an axis")
    _add_run_options(p)
    p.add_argument('--axis', required=True, choices=SWEEP_AXES)
    p.add_argument('--values', required=True, nargs='+')
    p.add_argument('--jobs', type=int, default=1, help="worker processes")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser('bench', help="wall-clock comparison of strategies")
    _add_run_options(p)
    p.add_argument('--strategies', nargs='+')
    p.add_argument('--repeats', type=int, default=3)
    p.set_defaults(func=cmd_bench)
    return parser


def _level(args):
    if args.quiet:
        return logging.ERROR
    return {0: logging.WARNING, 1: logging.INFO}.get(args.verbose,
        logging.DEBUG)


def main(argv=None):
    args = make_parser().parse_args(argv)
    logging.basicConfig(level=_level(args),
        format="%(asctime)s %(name)s %(levelname)s %(message)s")
    try:
        return args.func(args)
    except (FtlSimError, OSError) as e:
        print("ftlsim: error: {0}".format(e), file=sys.stderr)
        return 2


if __name__ == '__main__':
    sys.exit(main())
