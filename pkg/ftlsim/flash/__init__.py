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
ftlsim.flash

Flash device model: geometry, block metadata, page mapping
"""
from ftlsim.flash.device import (DeviceGeometry, BlockState, PageState,
    BlockMeta, MappingTable, Device, create_device)
