# Copyright 2026 The Exposure Rollout Authors.
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

"""Python bindings for the rollout simulator."""

from ._core import (
    DegenerateCustomer,
    EmptyWindow,
    InvalidArgument,
    LoadError,
    PlanError,
    SizeLimit,
    brute_force,
    exposure_change,
    immediate_impact,
    run,
    run_config_file,
    solve,
    sweep,
    theta_schedule,
    top_k,
    transition_metrics,
)

__all__ = [
    "DegenerateCustomer",
    "EmptyWindow",
    "InvalidArgument",
    "LoadError",
    "PlanError",
    "SizeLimit",
    "brute_force",
    "exposure_change",
    "immediate_impact",
    "run",
    "run_config_file",
    "solve",
    "sweep",
    "theta_schedule",
    "top_k",
    "transition_metrics",
]
