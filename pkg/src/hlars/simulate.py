"""Monte-Carlo selection-order study on the quadratic benchmark model.

The benchmark draws ten independent U[0, 1] variables and sets

    y = (x1 - 0.5)**2 + x2 + x3 + x4 + x5 + noise,   noise ~ N(0, noise_sd**2).

Random numbers: each replication gets its own 64-bit seed,
``mix_seed(master_seed, r)``, a double SplitMix64 finalisation of the master
seed and the replication index. That seed drives numpy's PCG64 generator;
uniforms come from ``Generator.random`` and normals from
``Generator.standard_normal`` (ziggurat method). Replications therefore do
not depend on execution order.
"""

from __future__ import annotations

import logging
import os
from dataclasses import asdict, dataclass, field

import numpy as np
from joblib import Parallel, delayed

from .design import expand_second_order, main_effects_only
from .exceptions import HlarsError, TermNeverEnteredError
from .checks import closure
from .hierarchy import marginality_dependencies
from .lars import lars_fit, modified_lars_fit

logger = logging.getLogger(__name__)

N_VARS = 10
DESIGNS = ("main", "full")
ALGORITHMS = ("lars", "mlars")
_MASK = (1 << 64) - 1


def splitmix64(x):
    """SplitMix64 output function applied to one 64-bit state."""
    z = (x + 0x9E3779B97F4A7C15) & _MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return z ^ (z >> 31)


def mix_seed(master_seed, rep):
    return splitmix64(splitmix64(master_seed & _MASK) ^ (rep & _MASK))


def model1_response(X, noise):
    X = np.asarray(X, dtype=float)
    return (X[:, 0] - 0.5) ** 2 + X[:, 1:5].sum(axis=1) + noise


def gen_model1(n, noise_sd=0.05, seed=0):
    """Draw ``n`` observations from the benchmark model.

    Returns the raw ``(n, 10)`` explanatory matrix and the response.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    if noise_sd < 0:
        raise ValueError("noise_sd must be non-negative")
    rng = np.random.default_rng(seed)
    X = rng.random((n, N_VARS))
    noise = noise_sd * rng.standard_normal(n)
    return X, model1_response(X, noise)


@dataclass(frozen=True)
class SimConfig:
    n: int = 500
    reps: int = 1000
    noise_sd: float = 0.05
    master_seed: int = 0
    design: str = "main"
    algorithm: str = "lars"

    def __post_init__(self):
        if self.n < 10:
            raise ValueError("n must be at least 10")
        if self.reps < 1:
            raise ValueError("reps must be at least 1")
        if self.noise_sd < 0:
            raise ValueError("noise_sd must be non-negative")
        if self.design not in DESIGNS:
            raise ValueError(f"design must be one of {DESIGNS}")
        if self.algorithm not in ALGORITHMS:
            raise ValueError(f"algorithm must be one of {ALGORITHMS}")

    def to_dict(self):
        return asdict(self)


def build_design(raw, design):
    if design == "main":
        return main_effects_only(raw)
    if design == "full":
        return expand_second_order(raw)
    raise ValueError(f"unknown design {design!r}")


def fit_path(dm, y, algorithm, deps=None, groups=None, max_steps=None):
    """Centre ``y`` and run the configured algorithm on ``dm``.

    For ``"mlars"``, ``deps=None`` means strong-heredity dependencies
    derived from the term metadata.
    """
    y = np.asarray(y, dtype=float)
    y = y - y.mean()
    if algorithm == "lars":
        return lars_fit(dm, y, max_steps=max_steps)
    if algorithm == "mlars":
        if deps is None:
            deps = marginality_dependencies(dm.terms)
        return modified_lars_fit(dm, y, deps, groups, max_steps=max_steps)
    raise ValueError(f"unknown algorithm {algorithm!r}")


def selection_steps(path):
    """1-based entry step of every term, keyed by term name.

    Terms that enter together (ties, or dependencies pulled in alongside a
    selected term) share a step.
    """
    entry = path.first_entry
    missing = [t.name for t, e in zip(path.terms, entry) if e is None]
    if missing:
        raise TermNeverEnteredError(missing)
    return dict(zip(path.names, entry))


@dataclass
class SelectionHistogram:
    """Counts of first-entry step per term.

    ``counts[i, s]`` is the number of replications in which term ``i``
    entered at step ``s + 1``. ``entries[r, i]`` is the entry step of term
    ``i`` in replication ``r`` (0 for a failed replication).
    ``closure_violations`` counts modified-LARS replications in which some
    active set was not closed under the dependencies.
    """

    names: list
    counts: np.ndarray
    reps: int
    entries: np.ndarray | None = None
    failures: list = field(default_factory=list)
    closure_violations: int = 0

    @property
    def percent(self):
        return 100.0 * self.counts / self.reps

    @property
    def n_steps(self):
        return self.counts.shape[1]

    def row(self, name):
        return self.counts[self.names.index(name)]

    def mass_within(self, name, last_step):
        """Fraction of replications in which ``name`` entered by ``last_step``."""
        return self.row(name)[:last_step].sum() / self.reps


def _one_replication(cfg, rep):
    seed = mix_seed(cfg.master_seed, rep)
    try:
        X, y = gen_model1(cfg.n, cfg.noise_sd, seed)
        dm = build_design(X, cfg.design)
        deps = marginality_dependencies(dm.terms) if cfg.algorithm == "mlars" else None
        path = fit_path(dm, y, cfg.algorithm, deps)
        steps = selection_steps(path)
        closed = deps is None or closure([s.active for s in path.steps], deps).passed
        return rep, [steps[name] for name in dm.names], closed, None
    except (HlarsError, np.linalg.LinAlgError) as exc:
        return rep, None, True, f"{type(exc).__name__}: {exc}"


def default_n_jobs():
    try:
        return max(1, int(os.environ.get("HLARS_THREADS", "1")))
    except ValueError:
        return 1


def replicate_study(cfg, n_jobs=None):
    """Run ``cfg.reps`` independent replications and tally entry steps.

    Failed replications are logged and listed in ``failures``; they do not
    abort the study and contribute no counts.
    """
    n_jobs = default_n_jobs() if n_jobs is None else n_jobs
    names = build_design(np.random.default_rng(0).random((12, N_VARS)), cfg.design).names
    m = len(names)
    if n_jobs == 1:
        results = [_one_replication(cfg, r) for r in range(cfg.reps)]
    else:
        results = Parallel(n_jobs=n_jobs)(
            delayed(_one_replication)(cfg, r) for r in range(cfg.reps)
        )
    counts = np.zeros((m, m), dtype=np.int64)
    entries = np.zeros((cfg.reps, m), dtype=np.int64)
    failures = []
    violations = 0
    for rep, steps, closed, err in sorted(results, key=lambda t: t[0]):
        if err is not None:
            logger.warning("replication %d failed: %s", rep, err)
            failures.append((rep, err))
            continue
        entries[rep] = steps
        counts[np.arange(m), entries[rep] - 1] += 1
        violations += not closed
    return SelectionHistogram(
        names=names, counts=counts, reps=cfg.reps, entries=entries,
        failures=failures, closure_violations=violations,
    )


def model1_correlations(n, seed, noise_sd=0.05):
    """Return ``(corr(x1, y), corr(x2 * x5, y) / corr(x2, y))`` for one sample."""
    X, y = gen_model1(n, noise_sd, seed)
    r1 = np.corrcoef(X[:, 0], y)[0, 1]
    r2 = np.corrcoef(X[:, 1], y)[0, 1]
    r25 = np.corrcoef(X[:, 1] * X[:, 4], y)[0, 1]
    return float(r1), float(r25 / r2)


def correlation_ratio_check(n, seeds, noise_sd=0.05):
    """Mean and standard error over seeds of ``corr(x2 * x5, y) / corr(x2, y)``."""
    ratios = np.array([model1_correlations(n, s, noise_sd)[1] for s in seeds])
    stderr = ratios.std(ddof=1) / np.sqrt(len(ratios)) if len(ratios) > 1 else float("nan")
    return float(ratios.mean()), float(stderr)
