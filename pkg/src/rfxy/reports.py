"""Report rows and their CSV / JSON / plain-text writers.

Floats are written with ``repr`` in both CSV and JSON, so the two files carry
identical numeric payloads and re-reading either gives back the same doubles.
"""

import csv
import json
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np

TIE_TOL = 1e-6
WALL_COLUMNS = ("wall_seconds",)


@dataclass
class ReportRow:
    d: int
    L: int
    delta: float
    field: str
    solver: str
    best_energy: float
    energy_per_site: float
    wall_seconds: float
    local_searches: int
    certificate_gap: float
    lower_bound: float
    winner: int = 0
    status: str = "ok"
    distinct_minima: int = 0
    runs: list = field(default_factory=list, repr=False)

    @property
    def key(self):
        return (self.d, self.L, self.delta, self.field)


COLUMNS = [f.name for f in fields(ReportRow) if f.name != "runs"]


def count_distinct(energies, tol=TIE_TOL):
    """Number of energy levels after merging values closer than ``tol``."""
    e = np.sort(np.asarray([x for x in energies if np.isfinite(x)], dtype=np.float64))
    if e.size == 0:
        return 0
    return int(1 + np.count_nonzero(np.diff(e) > tol))


def flag_winners(rows, tol=TIE_TOL):
    """Flag, per instance, the rows within ``tol`` of the best energy.

    Nothing is flagged when all rows of an instance tie, as in a table where
    both columns show the same value.
    """
    groups = {}
    for r in rows:
        groups.setdefault(r.key, []).append(r)
    for group in groups.values():
        finite = [r.best_energy for r in group if np.isfinite(r.best_energy)]
        if not finite:
            continue
        best = min(finite)
        lead = [r for r in group if r.best_energy <= best + tol]
        for r in group:
            r.winner = int(len(lead) < len(group) and r in lead)
    return rows


def _cell(v):
    return repr(float(v)) if isinstance(v, (float, np.floating)) else str(v)


def write_csv(rows, path, include_wall=True):
    cols = [c for c in COLUMNS if include_wall or c not in WALL_COLUMNS]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(cols)
        for r in rows:
            w.writerow([_cell(getattr(r, c)) for c in cols])
    return Path(path)


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def _jsonable(v):
    if isinstance(v, float) and not np.isfinite(v):
        return repr(v)
    return v


def write_json(rows, path, meta=None):
    payload = {"meta": meta or {}, "rows": []}
    for r in rows:
        item = {k: _jsonable(v) for k, v in asdict(r).items()}
        payload["rows"].append(item)
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=1)
    return Path(path)


def write_energies(energies, path):
    """One energy per line, for scatter plots of per-run minima."""
    with open(path, "w") as fh:
        for e in energies:
            fh.write(f"{float(e)!r}\n")
    return Path(path)
