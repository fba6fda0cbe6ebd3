"""Flat-file formats: input data CSV, path/correlation/histogram CSVs, manifests.

All numbers are written with 17 significant digits, '.' as decimal
separator and '\\n' line endings so that outputs are byte-stable.
"""

from __future__ import annotations

import csv
import hashlib
import json
from pathlib import Path

import numpy as np

from .lars import coefficients_along_path

PATH_HEADER = ["step", "term", "coefficient", "sum_abs_beta", "active"]
CORR_HEADER = ["step", "term", "abs_corr", "Chat"]
HIST_HEADER = ["term", "step", "count", "percent"]


class MalformedInput(ValueError):
    pass


def fmt(x):
    return format(float(x), ".17g")


def read_data_csv(path, response="y"):
    """Read a numeric CSV with a header row.

    Returns ``(X, y, names)`` where ``names`` are the explanatory column
    headers in file order. Raises :class:`MalformedInput` naming the
    offending column on any parse problem.
    """
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise MalformedInput(f"{path}: empty file")
    header = [h.strip() for h in rows[0]]
    if len(set(header)) != len(header):
        raise MalformedInput(f"{path}: duplicate column names in header")
    if response not in header:
        raise MalformedInput(f"{path}: response column {response!r} not found")
    body = [r for r in rows[1:] if any(cell.strip() for cell in r)]
    if len(body) < 2:
        raise MalformedInput(f"{path}: need at least two data rows")
    values = np.empty((len(body), len(header)))
    for i, row in enumerate(body, start=2):
        if len(row) != len(header):
            raise MalformedInput(f"{path}: line {i} has {len(row)} fields, expected {len(header)}")
        for j, cell in enumerate(row):
            try:
                v = float(cell)
            except ValueError:
                raise MalformedInput(
                    f"{path}: column {header[j]!r}, line {i}: {cell!r} is not a number"
                ) from None
            if not np.isfinite(v):
                raise MalformedInput(f"{path}: column {header[j]!r}, line {i}: non-finite value")
            values[i - 2, j] = v
    r = header.index(response)
    names = [h for j, h in enumerate(header) if j != r]
    if not names:
        raise MalformedInput(f"{path}: no explanatory columns")
    X = np.delete(values, r, axis=1)
    return X, values[:, r], names


def write_data_csv(path, X, y, names=None, response="y"):
    X = np.asarray(X, dtype=float)
    names = names or [f"X{j + 1}" for j in range(X.shape[1])]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(list(names) + [response])
        for row, yi in zip(X, y):
            w.writerow([fmt(v) for v in row] + [fmt(yi)])


def write_path_csv(path, lars_path):
    """One row per (step, term); step 0 is the empty model."""
    table = coefficients_along_path(lars_path)
    actives = [frozenset()] + [s.active for s in lars_path.steps]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(PATH_HEADER)
        for k in table.step:
            for j, name in enumerate(table.names):
                w.writerow([int(k), name, fmt(table.coef[k, j]), fmt(table.sum_abs_beta[k]),
                            int(j in actives[k])])


def read_path_csv(path, names):
    """Parse path.csv into ``(coef, active)`` arrays of shape (n_steps + 1, m).

    Missing rows read as an inactive term with coefficient zero.
    """
    index = {n: j for j, n in enumerate(names)}
    rows = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != PATH_HEADER:
            raise MalformedInput(f"{path}: expected header {PATH_HEADER}")
        for r in reader:
            if r["term"] not in index:
                raise MalformedInput(f"{path}: unknown term {r['term']!r}")
            rows.append((int(r["step"]), index[r["term"]], float(r["coefficient"]), int(r["active"])))
    n_steps = max(r[0] for r in rows) + 1 if rows else 0
    coef = np.zeros((n_steps, len(names)))
    active = np.zeros((n_steps, len(names)), dtype=bool)
    for k, j, c, a in rows:
        coef[k, j] = c
        active[k, j] = bool(a)
    return coef, active


def write_corr_csv(path, lars_path):
    """Absolute current correlations at the start of each step, plus the final residual."""
    chats = [s.chat for s in lars_path.steps] + [lars_path.final_chat]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CORR_HEADER)
        for k, chat in enumerate(chats):
            Chat = fmt(np.max(np.abs(chat)))
            for name, c in zip(lars_path.names, chat):
                w.writerow([k, name, fmt(abs(c)), Chat])


def read_corr_csv(path):
    out = {}
    with open(path, newline="") as fh:
        for r in csv.DictReader(fh):
            out.setdefault(int(r["step"]), {})[r["term"]] = (float(r["abs_corr"]), float(r["Chat"]))
    return out


def write_hist_csv(path, hist, truncate=None):
    """Every (term, step) cell, including zeros, for steps ``1..truncate``."""
    last = hist.n_steps if truncate is None else min(truncate, hist.n_steps)
    pct = hist.percent
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(HIST_HEADER)
        for i, name in enumerate(hist.names):
            for s in range(last):
                w.writerow([name, s + 1, int(hist.counts[i, s]), fmt(pct[i, s])])


def read_hist_csv(path):
    with open(path, newline="") as fh:
        return [
            (r["term"], int(r["step"]), int(r["count"]), float(r["percent"]))
            for r in csv.DictReader(fh)
        ]


def sha256(path):
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def write_manifest(out_dir, command, config, seeds, artifacts, version):
    out_dir = Path(out_dir)
    manifest = {
        "command": command,
        "tool_version": version,
        "config": config,
        "seeds": list(seeds),
        "artifacts": {
            name: {"path": str(p), "sha256": sha256(out_dir / p)} for name, p in artifacts.items()
        },
    }
    with open(out_dir / "manifest.json", "w", newline="") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return manifest


def read_manifest(path):
    with open(path) as fh:
        return json.load(fh)
