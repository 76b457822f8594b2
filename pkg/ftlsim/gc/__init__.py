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
ftlsim.gc

GC victim selection strategies and the strategy spec strings used on the
command line:

    greedy, const-greedy, fifo, cb, cat, fegc,
    fastcb[:t0=125,c0=25,time_factor=1024],
    approxcb:q=<pct>%  |  approxcb:qabs=<n>,
    age-threshold:tau=<n>

USE:
>>> name, params = parse_strategy("approxcb:q=1%")
>>> sel = make_selector("fastcb", device, channel=0)

"""
from ftlsim.core import ConfigError
from ftlsim.gc.base import (VictimSelector, LinearScanSelector, TimedSelector,
    cb_value, cat_value, cat_age_norm, cwa_value, block_cb, block_cat,
    block_cwa)
from ftlsim.gc.greedy import (HeapGreedySelector, BucketGreedySelector,
    FifoSelector, AgeThresholdSelector)
from ftlsim.gc.costbenefit import (CostBenefitSelector, CatSelector,
    FegcSelector, ApproxCostBenefitSelector)
from ftlsim.gc.fastcb import FastCostBenefitSelector, fastcb_shift_time

STRATEGIES = dict((cls.name, cls) for cls in (
    HeapGreedySelector,
    BucketGreedySelector,
    FifoSelector,
    CostBenefitSelector,
    CatSelector,
    FegcSelector,
    FastCostBenefitSelector,
    ApproxCostBenefitSelector,
    AgeThresholdSelector,
))

# Parameter name -> converter, per strategy
_PARAM_TYPES = {
    'fastcb': {'t0': int, 'c0': int, 'time_factor': int},
    'approxcb': {'q': float, 'qabs': int},
    'age-threshold': {'tau': int},
}

_REQUIRED = {
    'approxcb': (('q', 'qabs'),),
    'age-threshold': (('tau',),),
}


def parse_strategy(text):
    """
    Parse a strategy spec string

    Returns
    -------
    (name, params) : str, dict of typed parameters

    Raises ConfigError on unknown names, unknown or malformed parameters.
    """
    name, _, argstr = text.strip().partition(':')
    name = name.strip().lower()
    if name not in STRATEGIES:
        raise ConfigError("unknown strategy {0!r}, expected one of {1}".format(
            name, ', '.join(sorted(STRATEGIES))))
    types = _PARAM_TYPES.get(name, {})
    params = {}
    for item in filter(None, (a.strip() for a in argstr.split(','))):
        key, sep, value = item.partition('=')
        key = key.strip()
        if not sep or key not in types:
            raise ConfigError("strategy {0}: bad parameter {1!r}".format(
                name, item))
        value = value.strip()
        if value.endswith('%'):
            value = value[:-1]
        try:
            params[key] = types[key](value)
        except ValueError:
            raise ConfigError("strategy {0}: {1}={2!r} is not a {3}".format(
                name, key, value, types[key].__name__))
    for options in _REQUIRED.get(name, ()):
        if not any(o in params for o in options):
            raise ConfigError("strategy {0} needs {1}".format(name,
                ' or '.join("{0}=...".format(o) for o in options)))
    return name, params


def strategy_label(text):
    """Canonical form of a strategy spec string"""
    name, params = parse_strategy(text)
    if not params:
        return name
    parts = []
    for k in sorted(params):
        v = params[k]
        parts.append("{0}={1}{2}".format(k, v, '%' if k == 'q' else ''))
    return "{0}:{1}".format(name, ','.join(parts))


def make_selector(text, device, channel):
    """Build the selector of a strategy spec for one channel of device"""
    name, params = parse_strategy(text)
    return STRATEGIES[name](device, channel, **params)
