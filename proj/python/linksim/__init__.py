# Copyright 2026 The linksim Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
# http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Discrete-event simulator for host-accelerator interconnects."""

from ._linksim import (
    ConfigError,
    RunConfig,
    SimReport,
    SimulationFault,
    TranslationStats,
    config_keys,
    csv_columns,
    devmem_threshold,
    figure_names,
    footprint_pages,
    gemm,
    mix_time,
    run_figure,
    simulate,
    sweep,
    to_csv,
)

__all__ = [
    "ConfigError",
    "RunConfig",
    "SimReport",
    "SimulationFault",
    "TranslationStats",
    "config_keys",
    "csv_columns",
    "devmem_threshold",
    "figure_names",
    "footprint_pages",
    "gemm",
    "mix_time",
    "run_figure",
    "simulate",
    "sweep",
    "to_csv",
]
