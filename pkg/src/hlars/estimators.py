"""scikit-learn estimators wrapping the path engine."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.utils.validation import check_is_fitted, validate_data

from .design import expand_second_order
from .hierarchy import DependencyStructure, dependencies_from_json, marginality_dependencies
from .lars import TIE_RTOL, coefficients_along_path, lars_fit, modified_lars_fit

_DESIGNS = {"main": (False, False), "full": (True, True), "squares": (True, False), "cross": (False, True)}


class _BaseLars(RegressorMixin, BaseEstimator):
    def _design(self, X):
        try:
            squares, cross = _DESIGNS[self.design]
        except KeyError:
            raise ValueError(f"design must be one of {sorted(_DESIGNS)}, got {self.design!r}") from None
        return expand_second_order(X, squares, cross)

    def _run(self, dm, y):
        raise NotImplementedError

    def fit(self, X, y):
        X, y = validate_data(self, X, y, dtype=float, y_numeric=True, ensure_min_samples=2)
        dm = self._design(X)
        self.intercept_ = float(y.mean())
        self.path_ = self._run(dm, y - self.intercept_)
        self.design_ = dm
        self.coef_ = self.path_.coef.copy()
        table = coefficients_along_path(self.path_)
        self.coef_path_ = table.coef.T
        self.alphas_ = np.array([s.Chat for s in self.path_.steps])
        self.entry_steps_ = dict(zip(self.path_.names, self.path_.first_entry))
        self.n_iter_ = len(self.path_.steps)
        return self

    def predict(self, X):
        check_is_fitted(self, "path_")
        X = validate_data(self, X, dtype=float, reset=False)
        return self.design_.transform(X) @ self.coef_ + self.intercept_

    def get_feature_names_out(self, input_features=None):
        check_is_fitted(self, "design_")
        return np.asarray(self.design_.names, dtype=object)


class Lars(_BaseLars):
    """Least angle regression over a standardized (optionally expanded) design.

    Parameters
    ----------
    design : {"main", "full", "squares", "cross"}, default="main"
        Which second-order terms to build from the raw columns of ``X``.
    max_steps : int or None
        Iteration cap; ``None`` means ``min(n_samples - 1, n_terms)``.
    tie_tol : float
        Relative tolerance for ties with the maximal absolute correlation.

    Attributes
    ----------
    coef_ : ndarray of shape (n_terms,)
        Final coefficients on the standardized design columns.
    coef_path_ : ndarray of shape (n_terms, n_iter_ + 1)
    alphas_ : ndarray of shape (n_iter_,)
        Maximal absolute current correlation at the start of each step.
    entry_steps_ : dict
        Term name to the 1-based step at which it entered.
    path_ : LarsPath
    """

    def __init__(self, design="main", max_steps=None, tie_tol=TIE_RTOL):
        self.design = design
        self.max_steps = max_steps
        self.tie_tol = tie_tol

    def _run(self, dm, y):
        return lars_fit(dm, y, max_steps=self.max_steps, tie_tol=self.tie_tol)


class ModifiedLars(_BaseLars):
    """LARS with active sets closed under a column dependency structure.

    ``dependencies="auto"`` applies strong heredity: a square or product
    term brings its main effects along. A list in the JSON dependency format
    (``[{"term": ..., "requires": [...]}, ...]``) or a
    :class:`DependencyStructure` may be given instead; ``None`` disables
    dependencies, which reduces to plain LARS.
    """

    def __init__(self, design="full", dependencies="auto", max_steps=None, tie_tol=TIE_RTOL):
        self.design = design
        self.dependencies = dependencies
        self.max_steps = max_steps
        self.tie_tol = tie_tol

    def _run(self, dm, y):
        groups = None
        if isinstance(self.dependencies, str) and self.dependencies == "auto":
            deps = marginality_dependencies(dm.terms)
        elif self.dependencies is None:
            deps = DependencyStructure.empty(dm.n_terms)
        elif isinstance(self.dependencies, DependencyStructure):
            deps = self.dependencies
        else:
            deps, groups = dependencies_from_json(self.dependencies, dm.names)
        self.dependencies_ = deps
        return modified_lars_fit(dm, y, deps, groups, max_steps=self.max_steps, tie_tol=self.tie_tol)
