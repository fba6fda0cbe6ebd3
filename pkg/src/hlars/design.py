"""Model matrices with main effects, squares and pairwise interactions.

Term names follow the ``X2``, ``X2:5``, ``X5:5`` scheme (1-based raw
variable indices). Product columns are formed from the *raw* variables and
only then is every column standardized.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .exceptions import ConstantColumnError
from .linalg import StandardizationRecord, standardize

MAIN = "main"
SQUARE = "square"
CROSS = "cross"
INDICATOR = "indicator"


@dataclass(frozen=True)
class TermDescriptor:
    """What one design column is.

    ``vars`` holds 0-based raw variable indices: ``(i,)`` for a main effect,
    ``(i, i)`` for a square and ``(i, j)`` with ``i < j`` for a cross
    product. Indicator columns carry ``factor`` and ``level`` instead.
    """

    kind: str
    name: str
    vars: tuple = ()
    factor: str | None = None
    level: str | None = None

    @classmethod
    def main(cls, i):
        return cls(MAIN, f"X{i + 1}", (i,))

    @classmethod
    def square(cls, i):
        return cls(SQUARE, f"X{i + 1}:{i + 1}", (i, i))

    @classmethod
    def cross(cls, i, j):
        if not i < j:
            raise ValueError(f"cross term needs i < j, got ({i}, {j})")
        return cls(CROSS, f"X{i + 1}:{j + 1}", (i, j))

    @classmethod
    def indicator(cls, factor, level):
        return cls(INDICATOR, f"{factor}.{level}", factor=str(factor), level=str(level))


@dataclass(frozen=True)
class DesignMatrix:
    """Standardized design columns plus what each column means."""

    data: np.ndarray
    terms: tuple
    standardization: StandardizationRecord
    raw_cols: int
    raw_names: tuple = field(default=())

    def __post_init__(self):
        if self.data.shape[1] != len(self.terms):
            raise ValueError("one term descriptor is needed per column")
        names = [t.name for t in self.terms]
        if len(set(names)) != len(names):
            raise ValueError("term names must be unique")

    @property
    def n_samples(self):
        return self.data.shape[0]

    @property
    def n_terms(self):
        return self.data.shape[1]

    @property
    def names(self):
        return [t.name for t in self.terms]

    def index(self, name):
        return self.names.index(name)

    def transform(self, raw):
        """Build and standardize the same columns for new raw data."""
        if any(t.kind == INDICATOR for t in self.terms):
            raise ValueError("designs with factor indicators cannot transform new data")
        products = _raw_columns(np.asarray(raw, dtype=float), self.terms)
        return self.standardization.apply(products)


def second_order_terms(m, include_squares=True, include_cross=True):
    """Term list in canonical order: mains, then squares, then crosses."""
    terms = [TermDescriptor.main(i) for i in range(m)]
    if include_squares:
        terms += [TermDescriptor.square(i) for i in range(m)]
    if include_cross:
        terms += [TermDescriptor.cross(i, j) for i, j in combinations(range(m), 2)]
    return terms


def _raw_columns(raw, terms):
    cols = []
    for t in terms:
        if t.kind == MAIN:
            cols.append(raw[:, t.vars[0]])
        else:
            i, j = t.vars
            cols.append(raw[:, i] * raw[:, j])
    return np.column_stack(cols) if cols else np.empty((raw.shape[0], 0))


def _build(raw, terms, raw_names):
    products = _raw_columns(raw, terms)
    try:
        data, record = standardize(products)
    except ConstantColumnError as exc:
        raise ConstantColumnError(exc.column, terms[exc.column].name) from None
    return DesignMatrix(
        data=data,
        terms=tuple(terms),
        standardization=record,
        raw_cols=raw.shape[1],
        raw_names=tuple(raw_names) if raw_names is not None else (),
    )


def expand_second_order(raw, include_squares=True, include_cross=True, raw_names=None):
    """Expand raw variables into a standardized second-order design.

    With ``m`` raw columns the result has ``m + [include_squares] * m +
    [include_cross] * m * (m - 1) / 2`` columns, so 65 for ten variables.
    """
    raw = check_array(raw, dtype=float, ensure_min_samples=1)
    terms = second_order_terms(raw.shape[1], include_squares, include_cross)
    return _build(raw, terms, raw_names)


def main_effects_only(raw, raw_names=None):
    return expand_second_order(raw, False, False, raw_names=raw_names)


def add_factor(dm, labels, factor):
    """Append one indicator column per level of a categorical variable.

    Every level gets a column, in sorted level order; the hierarchy module
    keeps the last one out of each least-squares solve.
    """
    labels = np.asarray(labels)
    if labels.shape != (dm.n_samples,):
        raise ValueError(f"need {dm.n_samples} labels, got shape {labels.shape}")
    levels = sorted(set(labels.tolist()), key=str)
    if len(levels) < 2:
        raise ValueError(f"factor {factor!r} needs at least two levels")
    ind = np.column_stack([(labels == lev).astype(float) for lev in levels])
    new_terms = [TermDescriptor.indicator(factor, lev) for lev in levels]
    try:
        std, rec = standardize(ind)
    except ConstantColumnError as exc:  # pragma: no cover - excluded by level count
        raise ConstantColumnError(exc.column, new_terms[exc.column].name) from None
    record = StandardizationRecord(
        center=np.concatenate([dm.standardization.center, rec.center]),
        scale=np.concatenate([dm.standardization.scale, rec.scale]),
    )
    return DesignMatrix(
        data=np.hstack([dm.data, std]),
        terms=dm.terms + tuple(new_terms),
        standardization=record,
        raw_cols=dm.raw_cols,
        raw_names=dm.raw_names,
    )


class SecondOrderFeatures(TransformerMixin, BaseEstimator):
    """Transformer producing the standardized second-order design.

    Parameters
    ----------
    include_squares : bool, default=True
    include_cross : bool, default=True
    """

    def __init__(self, include_squares=True, include_cross=True):
        self.include_squares = include_squares
        self.include_cross = include_cross

    def fit(self, X, y=None):
        self.design_ = expand_second_order(X, self.include_squares, self.include_cross)
        self.n_features_in_ = self.design_.raw_cols
        return self

    def transform(self, X):
        check_is_fitted(self, "design_")
        X = check_array(X, dtype=float)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(
                f"X has {X.shape[1]} features, expected {self.n_features_in_}"
            )
        return self.design_.transform(X)

    def get_feature_names_out(self, input_features=None):
        check_is_fitted(self, "design_")
        return np.asarray(self.design_.names, dtype=object)
