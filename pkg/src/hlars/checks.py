"""Invariant checks on a computed path.

Each check returns a :class:`CheckResult` carrying the largest residual it
saw, so reports show how close a pass was.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .hierarchy import expand_active
from .linalg import crossprod

RTOL = 1e-8


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    max_residual: float
    tol: float
    detail: str = ""

    def line(self):
        status = "PASS" if self.passed else "FAIL"
        text = f"{status} {self.name}: max residual {self.max_residual:.3e} (tol {self.tol:.0e})"
        return f"{text} {self.detail}".rstrip()


def _result(name, resid, tol, detail=""):
    resid = float(resid)
    return CheckResult(name, bool(resid <= tol), resid, tol, detail)


def correlation_decay(path, tol=RTOL):
    """Maximal correlation shrinks by ``1 - gamma`` at every step."""
    chats = [s.Chat for s in path.steps] + [float(np.max(np.abs(path.final_chat)))]
    resid = 0.0
    for k, s in enumerate(path.steps):
        expected = (1.0 - s.gamma) * s.Chat
        resid = max(resid, abs(chats[k + 1] - expected) / s.Chat)
    return _result("correlation_decay", resid, tol)


def equiangularity(path, tol=RTOL):
    """``x_j'(ybar - mu) = sign(c_j) * Chat`` for every tied column."""
    resid = 0.0
    for s in path.steps:
        idx = sorted(s.a0)
        diff = s.avec[idx] - np.sign(s.chat[idx]) * s.Chat
        resid = max(resid, float(np.max(np.abs(diff))) / s.Chat)
    return _result("equiangularity", resid, tol)


def step_linearity(path, X, gammas=(0.25, 0.5, 0.75), tol=RTOL):
    """Along a step, ``|c_i(g)| = (1 - g) |c_i|`` for every active column."""
    X = np.asarray(X, dtype=float)
    resid = 0.0
    for s in path.steps:
        mu0 = path.fit_before(s.k)
        idx = sorted(s.active)
        for g in gammas:
            c_g = crossprod(X[:, idx], path.y - (mu0 + g * (s.ybar - mu0)))
            diff = np.abs(c_g) - (1.0 - g) * np.abs(s.chat[idx])
            resid = max(resid, float(np.max(np.abs(diff))) / s.Chat)
    return _result("step_linearity", resid, tol)


def ols_completion(X, y, coef, tol=RTOL):
    """The final fit equals the projection of ``y`` on all columns."""
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    proj = X @ np.linalg.lstsq(X, y, rcond=None)[0]
    scale = max(float(np.linalg.norm(y)), 1.0)
    resid = float(np.max(np.abs(X @ coef - proj))) / scale
    return _result("ols_completion", resid, tol)


def fit_reconstruction(path, X, tol=RTOL):
    """Recorded fitted vectors equal ``X @ coef`` at every step."""
    X = np.asarray(X, dtype=float)
    scale = max(float(np.linalg.norm(path.y)), 1.0)
    resid = max((float(np.max(np.abs(s.mu - X @ s.coef))) for s in path.steps), default=0.0)
    return _result("fit_reconstruction", resid / scale, tol)


def closure(active_sets, deps):
    """Every active set already contains everything its members depend on.

    Returns the number of violating steps as the residual.
    """
    bad = []
    for k, a in enumerate(active_sets):
        a = frozenset(a)
        _, closed = expand_active(a, deps)
        if closed != a:
            bad.append(k)
    detail = f"(first violation at step {bad[0]})" if bad else ""
    return _result("closure", len(bad), 0, detail)


def nestedness(active_sets):
    bad = sum(1 for prev, cur in zip(active_sets, active_sets[1:]) if not set(prev) <= set(cur))
    return _result("nestedness", bad, 0)


def path_suite(path, X, deps=None):
    """Run every path invariant; closure is checked only when ``deps`` is given."""
    X = np.asarray(X, dtype=float)
    results = [
        correlation_decay(path),
        equiangularity(path),
        step_linearity(path, X),
        fit_reconstruction(path, X),
        nestedness([s.active for s in path.steps]),
    ]
    if path.complete:
        results.append(ols_completion(X, path.y, path.coef))
    if deps is not None:
        results.append(closure([s.active for s in path.steps], deps))
    return results
