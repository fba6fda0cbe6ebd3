import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hlars.design import TermDescriptor, add_factor, expand_second_order, main_effects_only
from hlars.exceptions import RankDeficientError, UnknownTermError
from hlars.hierarchy import (
    DependencyStructure,
    FactorGroup,
    dependencies_from_json,
    dependencies_to_json,
    expand_active,
    factor_design_columns,
    factor_groups,
    marginality_dependencies,
)
from hlars.linalg import least_squares


@pytest.fixture
def full10(rng):
    return expand_second_order(rng.uniform(size=(30, 10)))


def named(dm, idx):
    return {dm.names[i] for i in idx}


def test_square_depends_on_its_main_effect():
    terms = [TermDescriptor.main(0), TermDescriptor.square(0)]
    d = marginality_dependencies(terms)
    assert d.deps == (frozenset(), frozenset({0}))


def test_cross_depends_on_both_main_effects():
    terms = [TermDescriptor.main(0), TermDescriptor.main(1), TermDescriptor.cross(0, 1)]
    assert marginality_dependencies(terms).deps[2] == {0, 1}


def test_main_effects_only_has_no_dependencies(rng):
    d = marginality_dependencies(main_effects_only(rng.uniform(size=(5, 4))).terms)
    assert d.is_empty


def test_missing_main_effect_is_unknown_term():
    with pytest.raises(UnknownTermError):
        marginality_dependencies([TermDescriptor.main(0), TermDescriptor.cross(0, 1)])


def test_expand_active_examples(full10):
    d = marginality_dependencies(full10.terms)
    a1, a = expand_active({full10.index("X2:5")}, d)
    assert named(full10, a) == {"X2:5", "X2", "X5"}
    assert named(full10, a1) == {"X2", "X5"}
    a1, a = expand_active({full10.index("X2")}, d)
    assert a1 == frozenset() and named(full10, a) == {"X2"}
    _, a = expand_active({full10.index("X1:1")}, d)
    assert named(full10, a) == {"X1:1", "X1"}


def test_closure_is_transitive():
    # 3 -> 2 -> 1 -> 0
    d = DependencyStructure.from_sets([set(), {0}, {1}, {2}])
    a1, a = expand_active({3}, d)
    assert a == {0, 1, 2, 3} and a1 == {0, 1, 2}


def test_self_dependency_rejected():
    with pytest.raises(ValueError):
        DependencyStructure.from_sets([{0}])


@st.composite
def dag_and_sets(draw):
    m = draw(st.integers(1, 12))
    # edges only to lower indices keep the structure acyclic
    sets = [draw(st.sets(st.integers(0, i - 1), max_size=3)) if i else set() for i in range(m)]
    a0 = draw(st.sets(st.integers(0, m - 1), min_size=1))
    extra = draw(st.sets(st.integers(0, m - 1)))
    return DependencyStructure.from_sets(sets), a0, a0 | extra


@given(dag_and_sets())
def test_expand_active_monotone_and_idempotent(case):
    d, a0, bigger = case
    _, a = expand_active(a0, d)
    _, a_big = expand_active(bigger, d)
    assert a <= a_big
    assert expand_active(a, d)[1] == a
    assert expand_active(a0, DependencyStructure.empty(d.m)) == (frozenset(), frozenset(a0))


def test_factor_indicators_depend_on_each_other(rng):
    dm = add_factor(main_effects_only(rng.uniform(size=(9, 2))), np.array(list("abcabcabc")), "F")
    d = marginality_dependencies(dm.terms)
    assert d.deps[2] == {3, 4} and d.deps[4] == {2, 3}
    groups = factor_groups(dm.terms)
    assert groups == [FactorGroup("F", (2, 3, 4))]
    assert groups[0].held_out == 4


def test_factor_design_columns_drops_held_out():
    g = FactorGroup("F", (2, 3, 4))
    assert factor_design_columns({0, 2, 3, 4}, [g]) == [0, 2, 3]
    assert factor_design_columns({0, 1}, [g]) == [0, 1]
    # a partially active group is left alone
    assert factor_design_columns({2, 3}, [g]) == [2, 3]


def test_two_factors_keep_solve_full_rank(rng):
    n = 24
    dm = main_effects_only(rng.uniform(size=(n, 2)))
    dm = add_factor(dm, np.array(list("abc") * 8), "F")
    dm = add_factor(dm, np.array(list("uv") * 12), "G")
    groups = factor_groups(dm.terms)
    everything = set(range(dm.n_terms))
    y = rng.standard_normal(n)
    with pytest.raises(RankDeficientError):
        least_squares(dm.data, y)
    cols = factor_design_columns(everything, groups)
    assert named(dm, cols) == {"X1", "X2", "F.a", "F.b", "G.u"}
    least_squares(dm.data[:, cols], y)
    for g in groups:
        assert not set(g.members) <= set(cols)


def test_factor_group_validation():
    with pytest.raises(ValueError):
        FactorGroup("F", (1,))
    with pytest.raises(ValueError):
        FactorGroup("F", (1, 2), held_out=5)


def test_json_round_trip(full10):
    d = marginality_dependencies(full10.terms)
    text = json.dumps(dependencies_to_json(d, full10.names))
    d2, groups = dependencies_from_json(text, full10.names)
    assert d2 == d and groups == []


def test_json_factor_entry_and_unknown_term():
    names = ["X1", "F.a", "F.b"]
    d, groups = dependencies_from_json([{"factor": "F", "members": ["F.a", "F.b"]}], names)
    assert d.deps == (frozenset(), frozenset({2}), frozenset({1}))
    assert groups[0].held_out == 2
    with pytest.raises(UnknownTermError):
        dependencies_from_json([{"term": "X9", "requires": ["X1"]}], names)
