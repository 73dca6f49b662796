# Copyright 2026 The Featbench Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      https://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Feature-parameterized fuzzing benchmark toolchain."""

from fractions import Fraction

try:
    from ._featbench import *  # noqa: F401,F403  (installed wheel layout)
    from . import _featbench as _ext
except ImportError:  # in-tree builds put the extension on sys.path directly
    from _featbench import *  # noqa: F401,F403
    import _featbench as _ext

__version__ = "0.1.0"


def analytic_probability(spec):
    """Exact bug-trigger probability of a program spec as a Fraction."""
    parts = _ext.analytic_probability(spec)
    if parts is None:
        return None
    num, den = parts
    return Fraction(int(num), int(den))
