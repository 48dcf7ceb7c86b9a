"""Output artifacts: CSV and JSON files written atomically, plus figures.

Every CSV starts with two comment lines::

    # seed=<master seed>
    # config=<resolved config as compact JSON>

followed by a header row. Readers that skip ``#`` lines (for example
``pandas.read_csv(comment="#")``) see a plain table. JSON artifacts carry the
same information under the ``config`` and ``seed`` keys. Nothing
time-dependent is written, so a rerun with the same seed is byte-identical.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
import tempfile
from pathlib import Path
from typing import Any, Iterable, Sequence

import numpy as np


def _clean(obj: Any) -> Any:
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if math.isfinite(v) else None
    return obj


def atomic_write(path: str | Path, text: str) -> Path:
    """Write ``text`` to ``path`` through a temporary file and an atomic rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def json_text(data: Any) -> str:
    return json.dumps(_clean(data), indent=2, sort_keys=True, allow_nan=False) + "\n"


def write_json(path: str | Path, data: Any) -> Path:
    return atomic_write(path, json_text(data))


def _cell(v: Any) -> Any:
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return repr(v) if math.isfinite(v) else ""
    if v is None:
        return ""
    return v


def csv_text(header: Sequence[str], rows: Iterable[Sequence[Any]], provenance: dict | None = None) -> str:
    buf = io.StringIO()
    if provenance is not None:
        buf.write(f"# seed={provenance.get('seed')}\n")
        buf.write("# config=" + json.dumps(_clean(provenance.get("config")), sort_keys=True,
                                            separators=(",", ":"), allow_nan=False) + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_cell(v) for v in row])
    return buf.getvalue()


def write_csv(path: str | Path, header: Sequence[str], rows: Iterable[Sequence[Any]],
              provenance: dict | None = None) -> Path:
    return atomic_write(path, csv_text(header, rows, provenance))


def read_csv(path: str | Path) -> tuple[list[str], list[list[str]]]:
    with open(path, newline="") as fh:
        lines = [ln for ln in fh if not ln.startswith("#")]
    rows = list(csv.reader(lines))
    return rows[0], rows[1:]


# figures -------------------------------------------------------------------

def _pyplot():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


def _save(fig, path: Path) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, dpi=110, metadata={"Software": None})
    return path


def plot_scans(scans, path: str | Path) -> Path:
    """Mean objective against t with a one-standard-error band, one panel per line."""
    plt = _pyplot()
    n = len(scans)
    cols = min(n, 2)
    rows = math.ceil(n / cols)
    fig, axes = plt.subplots(rows, cols, figsize=(5 * cols, 3 * rows), squeeze=False)
    for ax, scan in zip(axes.flat, scans):
        se = scan.stderr
        ax.plot(scan.t, scan.mean, lw=1)
        ax.fill_between(scan.t, scan.mean - se, scan.mean + se, alpha=0.3, lw=0)
        ax.set_title(f"line {scan.line_id}")
        ax.set_xlabel("t")
        ax.set_ylabel("objective")
    for ax in list(axes.flat)[n:]:
        ax.axis("off")
    fig.tight_layout()
    out = _save(fig, Path(path))
    plt.close(fig)
    return out


def plot_convergence(runs, path: str | Path) -> Path:
    """Best objective so far against evaluation index, one panel per cost weight."""
    plt = _pyplot()
    alphas = sorted({r.alpha for r in runs})
    fig, axes = plt.subplots(1, len(alphas), figsize=(4.5 * len(alphas), 3.2), squeeze=False)
    for ax, a in zip(axes.flat, alphas):
        for r in runs:
            if r.alpha == a and r.history:
                ax.plot(np.arange(1, r.n_evals + 1), r.best_so_far, lw=1, label=r.run_id)
        ax.set_title(f"alpha = {a:g}")
        ax.set_xlabel("evaluation")
        ax.set_ylabel("best objective")
        ax.set_yscale("log")
    fig.tight_layout()
    out = _save(fig, Path(path))
    plt.close(fig)
    return out


def plot_tradeoff(points: Sequence[dict], path: str | Path) -> Path:
    """Execution time against cost at each run's optimum, colored by cost weight."""
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(5, 3.6))
    for a in sorted({p["alpha"] for p in points}):
        sel = [p for p in points if p["alpha"] == a]
        ax.scatter([p["cost"] for p in sel], [p["execution_time"] for p in sel], s=16, label=f"alpha={a:g}")
    ax.set_xlabel("cost")
    ax.set_ylabel("execution time (cycles)")
    if points:
        ax.legend(fontsize="small")
    fig.tight_layout()
    out = _save(fig, Path(path))
    plt.close(fig)
    return out
