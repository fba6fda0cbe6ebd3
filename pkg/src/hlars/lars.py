"""Least angle regression and its marginality-constrained variant.

Both algorithms share one loop. Each iteration computes the current
correlations ``c = X'(y - mu)``, collects the columns tying the maximal
absolute correlation into ``A0``, closes ``A0`` under the dependency
structure (modified variant only) to get ``A``, fits ``y`` on ``A`` by least
squares and moves from ``mu`` toward that fit until a column outside ``A``
ties the shrinking maximal correlation.

Coefficients stay on the standardized scale of the design columns.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .design import DesignMatrix, second_order_terms
from .exceptions import RankDeficientError
from .hierarchy import DependencyStructure, expand_active, factor_design_columns, factor_groups
from .linalg import crossprod, least_squares

TIE_RTOL = 1e-8
GAMMA_FLOOR = 1e-12
JOIN_ATOL = 1e-12
# correlations below this fraction of the starting maximum count as zero
CHAT_RTOL = 1e-12


@dataclass(frozen=True)
class PathStep:
    """One iteration of the path.

    ``chat`` and ``Chat`` are measured at the fit *before* the step;
    ``mu`` and ``coef`` are the fit and coefficients *after* it, so that
    ``mu == X @ coef``. ``avec`` holds ``x_j'(ybar - mu_before)`` for every
    column, not just the active ones.
    """

    k: int
    mu: np.ndarray
    chat: np.ndarray
    Chat: float
    a0: frozenset
    a1: frozenset
    gamma: float
    coef: np.ndarray
    ybar: np.ndarray
    avec: np.ndarray
    joiners: frozenset = frozenset()

    @property
    def active(self):
        return self.a0 | self.a1


@dataclass(frozen=True)
class LarsPath:
    steps: tuple
    terms: tuple
    y: np.ndarray
    final_chat: np.ndarray

    @property
    def names(self):
        return [t.name for t in self.terms]

    @property
    def first_entry(self):
        """1-based step at which each term first became active, or None."""
        entry = [None] * len(self.terms)
        for s in self.steps:
            for j in s.active:
                if entry[j] is None:
                    entry[j] = s.k + 1
        return entry

    @property
    def coef(self):
        if not self.steps:
            return np.zeros(len(self.terms))
        return self.steps[-1].coef

    @property
    def mu(self):
        if not self.steps:
            return np.zeros_like(self.y)
        return self.steps[-1].mu

    @property
    def complete(self):
        return bool(self.steps) and len(self.steps[-1].active) == len(self.terms)

    def fit_before(self, k):
        """Fitted vector at the start of iteration ``k``."""
        return np.zeros_like(self.y) if k == 0 else self.steps[k - 1].mu


def _data(dm):
    return dm.data if isinstance(dm, DesignMatrix) else np.asarray(dm, dtype=float)


def current_correlations(dm, y, mu):
    """Return ``(chat, Chat)`` with ``chat = X'(y - mu)`` and ``Chat = max |chat|``."""
    X = _data(dm)
    chat = crossprod(X, np.asarray(y, dtype=float) - np.asarray(mu, dtype=float))
    Chat = float(np.max(np.abs(chat))) if chat.size else 0.0
    return chat, Chat


def active_set(chat, Chat, tol=TIE_RTOL):
    """Columns whose absolute correlation ties ``Chat`` up to relative ``tol``."""
    chat = np.asarray(chat, dtype=float)
    return frozenset(np.flatnonzero(np.abs(chat) >= Chat * (1.0 - tol)).tolist())


def _step_length(Chat, chat, avec, complement):
    if not complement:
        return 1.0, frozenset()
    idx = np.fromiter(complement, dtype=int)
    c = chat[idx]
    a = avec[idx]
    with np.errstate(divide="ignore", invalid="ignore"):
        cands = np.stack([(Chat - c) / (Chat - a), (Chat + c) / (Chat + a)])
    cands[~np.isfinite(cands)] = np.inf
    cands[cands <= GAMMA_FLOOR] = np.inf
    per_col = cands.min(axis=0)
    best = float(per_col.min())
    if best >= 1.0:
        return 1.0, frozenset()
    joiners = frozenset(idx[per_col <= best + JOIN_ATOL].tolist())
    return best, joiners


def gamma_step(Chat, chat, avec_full, complement):
    """Step length: the smallest strictly positive crossing over the complement.

    Candidates not exceeding 1e-12 count as non-positive. Returns 1 when the
    complement is empty or no candidate lies in ``(0, 1)``.
    """
    gamma, _ = _step_length(
        float(Chat), np.asarray(chat, dtype=float), np.asarray(avec_full, dtype=float),
        sorted(complement),
    )
    return gamma


def _run(dm, y, deps=None, groups=(), max_steps=None, tie_tol=TIE_RTOL):
    X = _data(dm)
    y = np.asarray(y, dtype=float)
    n, m = X.shape
    if y.shape != (n,):
        raise ValueError(f"y has shape {y.shape}, expected ({n},)")
    if deps is not None and deps.m != m:
        raise ValueError(f"dependency structure covers {deps.m} columns, design has {m}")
    if max_steps is None:
        max_steps = min(n - 1, m)
    terms = dm.terms if isinstance(dm, DesignMatrix) else second_order_terms(m, False, False)

    mu = np.zeros(n)
    beta = np.zeros(m)
    a0 = frozenset()
    joiners = frozenset()
    steps = []
    C0 = None
    all_cols = frozenset(range(m))
    while len(steps) < max_steps:
        chat, Chat = current_correlations(X, y, mu)
        if C0 is None:
            C0 = Chat
        if Chat <= CHAT_RTOL * C0 or Chat == 0.0:
            break
        a0 = a0 | joiners | active_set(chat, Chat, tie_tol)
        if deps is None:
            a1, a = frozenset(), a0
        else:
            a1, a = expand_active(a0, deps)
        cols = factor_design_columns(a, groups)
        try:
            b, ybar = least_squares(X[:, cols], y)
        except RankDeficientError as exc:
            col = cols[exc.column] if exc.column < len(cols) else exc.column
            raise RankDeficientError(col, terms[col].name) from None
        avec = crossprod(X, ybar - mu)
        gamma, joiners = _step_length(Chat, chat, avec, sorted(all_cols - a))
        target = np.zeros(m)
        target[cols] = b
        mu = mu + gamma * (ybar - mu)
        beta = beta + gamma * (target - beta)
        steps.append(PathStep(
            k=len(steps), mu=mu, chat=chat, Chat=Chat, a0=a0, a1=a1, gamma=gamma,
            coef=beta, ybar=ybar, avec=avec, joiners=joiners,
        ))
        if a == all_cols:
            break
    final_chat, _ = current_correlations(X, y, mu)
    return LarsPath(steps=tuple(steps), terms=tuple(terms), y=y, final_chat=final_chat)


def lars_fit(dm, y, max_steps=None, tie_tol=TIE_RTOL):
    """Run plain least angle regression to completion.

    ``y`` should already be centred; the design has no intercept column.
    ``max_steps`` defaults to ``min(n - 1, m)``.
    """
    return _run(dm, y, None, (), max_steps, tie_tol)


def modified_lars_fit(dm, y, d=None, groups=None, max_steps=None, tie_tol=TIE_RTOL):
    """Least angle regression with every active set closed under ``d``.

    ``d=None`` derives no dependencies (plain LARS). ``groups`` defaults to
    the factor groups found in the design's term metadata.
    """
    X = _data(dm)
    if d is None:
        d = DependencyStructure.empty(X.shape[1])
    if groups is None:
        groups = factor_groups(dm.terms) if isinstance(dm, DesignMatrix) else []
    return _run(dm, y, d, tuple(groups), max_steps, tie_tol)


@dataclass(frozen=True)
class CoefficientTable:
    """Path vertices: row 0 is the origin, row ``k`` the state after step ``k``."""

    step: np.ndarray
    sum_abs_beta: np.ndarray
    coef: np.ndarray
    names: list


def coefficients_along_path(path):
    coefs = np.vstack([np.zeros(len(path.terms))]
                      + [s.coef for s in path.steps])
    return CoefficientTable(
        step=np.arange(coefs.shape[0]),
        sum_abs_beta=np.abs(coefs).sum(axis=1),
        coef=coefs,
        names=path.names,
    )
