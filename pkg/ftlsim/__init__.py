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
ftlsim - SSD garbage collection simulator

Page-mapped FTL simulation for comparing GC victim selection strategies
(greedy, FIFO, cost-benefit and its fast and approximate variants, CAT,
FeGC) by write amplification and victim search cost.

"""
from ftlsim.core import (FtlSimError, GeometryError, FlashStateError,
    DeviceWedged, ConfigError, UnknownBlockError, TraceFormatError, Clock,
    Dict, INF)
from ftlsim.flash import DeviceGeometry, Device, create_device
from ftlsim.gc import STRATEGIES, parse_strategy, make_selector
from ftlsim.ftl import FtlConfig, Ftl, simulate
from ftlsim.metrics import Recorder, SimReport, export
from ftlsim.workload import (WriteRequest, parse_canonical, import_spc,
    precharacterize, parse_workload_spec)
