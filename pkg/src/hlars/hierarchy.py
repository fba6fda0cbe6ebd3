"""Column dependency structures for marginality-constrained selection.

``deps[i]`` is the set of columns that must be in the model whenever column
``i`` is. Closure is transitive, so nested hierarchies (e.g. third-order
terms) work without extra bookkeeping.
"""

from __future__ import annotations

import json
from collections import defaultdict
from dataclasses import dataclass

from .design import CROSS, INDICATOR, MAIN, SQUARE
from .exceptions import UnknownTermError


@dataclass(frozen=True)
class DependencyStructure:
    m: int
    deps: tuple

    def __post_init__(self):
        if len(self.deps) != self.m:
            raise ValueError(f"need {self.m} dependency sets, got {len(self.deps)}")
        for i, d in enumerate(self.deps):
            if i in d:
                raise ValueError(f"column {i} depends on itself")
            if any(not 0 <= j < self.m for j in d):
                raise ValueError(f"column {i} has an out-of-range dependency")

    @classmethod
    def empty(cls, m):
        return cls(m, tuple(frozenset() for _ in range(m)))

    @classmethod
    def from_sets(cls, sets):
        return cls(len(sets), tuple(frozenset(s) for s in sets))

    @property
    def is_empty(self):
        return not any(self.deps)

    def closure(self, i):
        """All columns reachable from ``i``, excluding ``i`` itself."""
        seen = set()
        stack = list(self.deps[i])
        while stack:
            j = stack.pop()
            if j not in seen:
                seen.add(j)
                stack.extend(self.deps[j])
        seen.discard(i)
        return frozenset(seen)


@dataclass(frozen=True)
class FactorGroup:
    """Indicator columns of one categorical variable.

    ``held_out`` defaults to the last member and is never put into the
    least-squares solve.
    """

    factor: str
    members: tuple
    held_out: int | None = None

    def __post_init__(self):
        if len(self.members) < 2:
            raise ValueError(f"factor {self.factor!r} needs at least two indicator columns")
        if self.held_out is None:
            object.__setattr__(self, "held_out", self.members[-1])
        elif self.held_out not in self.members:
            raise ValueError(f"held-out column {self.held_out} is not a member of {self.factor!r}")


def marginality_dependencies(terms):
    """Derive the strong-heredity dependency structure from term metadata.

    Squares require their main effect, cross products require both main
    effects and each factor indicator requires every other indicator of the
    same factor.
    """
    main_of = {t.vars[0]: k for k, t in enumerate(terms) if t.kind == MAIN}
    levels = defaultdict(list)
    for k, t in enumerate(terms):
        if t.kind == INDICATOR:
            levels[t.factor].append(k)

    sets = []
    for k, t in enumerate(terms):
        if t.kind == MAIN:
            sets.append(set())
        elif t.kind in (SQUARE, CROSS):
            missing = [v for v in set(t.vars) if v not in main_of]
            if missing:
                raise UnknownTermError(
                    f"{t.name} requires X{missing[0] + 1}, which is not in the design"
                )
            sets.append({main_of[v] for v in t.vars})
        elif t.kind == INDICATOR:
            sets.append(set(levels[t.factor]) - {k})
        else:
            raise UnknownTermError(f"unrecognised term kind {t.kind!r}")
    return DependencyStructure.from_sets(sets)


def factor_groups(terms):
    """Group indicator columns by factor, in column order."""
    groups = defaultdict(list)
    for k, t in enumerate(terms):
        if t.kind == INDICATOR:
            groups[t.factor].append(k)
    return [FactorGroup(f, tuple(cols)) for f, cols in groups.items()]


def expand_active(a0, d):
    """Close ``a0`` under ``d``.

    Returns ``(a1, a)`` where ``a1`` holds the columns forced in by the
    dependencies (excluding ``a0``) and ``a = a0 | a1``.
    """
    a0 = frozenset(a0)
    a1 = set()
    for i in a0:
        a1 |= d.closure(i)
    a1 = frozenset(a1 - a0)
    return a1, a0 | a1


def factor_design_columns(a, groups):
    """Sorted list of columns to solve on, dropping each complete group's held-out column."""
    a = set(a)
    for g in groups:
        if set(g.members) <= a:
            a.discard(g.held_out)
    return sorted(a)


def dependencies_from_json(obj, names):
    """Build dependencies and factor groups from a JSON-style description.

    ``obj`` is a list whose entries are either ``{"term": ..., "requires":
    [...]}`` or ``{"factor": ..., "members": [...], "held_out": ...}``
    (``held_out`` optional). A factor entry also makes its members mutually
    dependent.
    """
    if isinstance(obj, (str, bytes)):
        obj = json.loads(obj)
    if not isinstance(obj, list):
        raise ValueError("dependency config must be a JSON list")
    index = {name: k for k, name in enumerate(names)}

    def lookup(name):
        try:
            return index[name]
        except KeyError:
            raise UnknownTermError(f"unknown term {name!r} in dependency config") from None

    sets = [set() for _ in names]
    groups = []
    for entry in obj:
        if "factor" in entry:
            members = tuple(lookup(t) for t in entry["members"])
            held = entry.get("held_out")
            groups.append(
                FactorGroup(str(entry["factor"]), members, lookup(held) if held is not None else None)
            )
            for k in members:
                sets[k] |= set(members) - {k}
        else:
            k = lookup(entry["term"])
            sets[k] |= {lookup(t) for t in entry.get("requires", [])} - {k}
    return DependencyStructure.from_sets(sets), groups


def dependencies_to_json(d, names, groups=()):
    out = [
        {"term": names[i], "requires": [names[j] for j in sorted(deps)]}
        for i, deps in enumerate(d.deps)
        if deps
    ]
    out += [
        {"factor": g.factor, "members": [names[k] for k in g.members], "held_out": names[g.held_out]}
        for g in groups
    ]
    return out
