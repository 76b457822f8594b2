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
ftlsim.workload

Trace parsers, synthetic generators and hotness pre-characterization

"""
from ftlsim.workload.traces import (WriteRequest, TRACE_FORMATS,
    CanonicalTraceParser, SpcTraceParser, parse_canonical, import_spc,
    TraceWorkload)
from ftlsim.workload.synthetic import (UniformSpec, HotspotSpec, ZipfSpec,
    TraceSpec, gen_uniform, gen_hotspot, gen_zipf, validate_fractions,
    hotspot_regions, UniformWorkload, HotspotWorkload, ZipfWorkload,
    parse_workload_spec, make_workload)
from ftlsim.workload.hotness import (HotnessMap, DEFAULT_QUANTILES,
    default_quantiles, request_pages, access_counts, assign_levels,
    precharacterize)
