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

import math
from fractions import Fraction

import pytest

import featbench


def test_grid_shape():
    grid = featbench.default_grid()
    assert len(grid) == 153
    names = {spec.name for spec in grid}
    assert len(names) == 153
    assert len({spec.family for spec in grid}) == 7
    assert len(featbench.grid_version()) == 16


def test_name_round_trip():
    spec = featbench.parse_name("COMP_W2_D2_O2_B1")
    assert spec.name == "COMP_W2_D2_O2_B1"
    assert spec.family == "branch_tree"
    assert spec.input_len == 4
    assert featbench.format_name(spec) == spec.name
    with pytest.raises(ValueError):
        featbench.parse_name("COMP_W2_D2_O2_B5")  # beyond the leaf count


def test_leaf_count():
    assert featbench.leaf_count(2, 10) == 1024


def test_analytic_probability_is_exact():
    spec = featbench.parse_name("COMP_W2_D2_O2_B1")
    assert featbench.analytic_probability(spec) == Fraction(1, 4)
    chk = featbench.parse_name("DCHK_C2")
    assert featbench.analytic_probability(chk) == Fraction(1, 2**32)


def test_emitted_source_and_witness():
    spec = featbench.parse_name("DMAG_S4_L3")
    code = featbench.emit_source(spec)
    assert "abort();" in code
    assert featbench.bug_marker(spec) == "FB_BUG:DMAG_S4_L3"
    witness = featbench.witness_input(spec)
    assert isinstance(witness, bytes)
    assert len(witness) == spec.input_len


def test_spearman():
    rho, p = featbench.spearman([1, 2, 3, 4], [1, 3, 2, 4])
    assert math.isclose(rho, 0.8, abs_tol=1e-12)
    rho_inv, p_inv = featbench.spearman([1, 2, 3], [3, 2, 1])
    assert math.isclose(rho_inv, -1.0)
    assert p_inv == 0.0


def test_completion_rate():
    assert featbench.completion_rate([True] * 12 + [False] * 4) == 0.75
