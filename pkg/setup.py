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
setup.py for ftlsim

- University of Nevada, Reno, (2017)

"""
from setuptools import setup

s_args = {
    'name': 'ftlsim',
    'version': '0.3.0',
    'description': 'SSD garbage collection / FTL simulator for python',
    'author': 'Mark Williams',
    'maintainer': 'Nevada Seismological Laboratory',
    'packages': [
        'ftlsim',
        'ftlsim.flash',
        'ftlsim.gc',
        'ftlsim.lib',
        'ftlsim.workload',
    ],
    'install_requires': [
        'numpy>=1.17',
    ],
    'entry_points': {
        'console_scripts': [
            'ftlsim = ftlsim.cli:main',
        ],
    },
}

setup(**s_args)
