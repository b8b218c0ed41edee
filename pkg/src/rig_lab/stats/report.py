"""Experiment reports: JSON for everything, long-format CSV for estimates."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field

import numpy as np

CSV_COLUMNS = ("quantity", "r_or_pair", "estimate", "ci_lo", "ci_hi", "theory", "n_rep", "seed")


@dataclass
class Estimate:
    quantity: str
    key: str
    estimate: float | None
    ci_lo: float | None
    ci_hi: float | None
    theory: float | None
    n_rep: int


def _clean(obj):
    """Make numpy scalars, arrays, tuples and non-finite floats JSON friendly."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else None
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


@dataclass
class ExperimentReport:
    """Estimates with intervals, theory values and distances for one experiment.

    ``duration_seconds`` is kept out of the serialized forms so that a rerun
    from the embedded config reproduces the files byte for byte.
    """

    kind: str
    config: dict
    seed: int
    n_rep: int
    estimates: list = field(default_factory=list)
    theory: dict = field(default_factory=dict)
    distances: dict = field(default_factory=dict)
    extra: dict = field(default_factory=dict)
    diagnostics: list = field(default_factory=list)
    truncated: bool = False
    duration_seconds: float = 0.0

    def add(self, quantity, key, estimate, ci=(None, None), theory=None, n_rep=None):
        self.estimates.append(Estimate(quantity, str(key), estimate, ci[0], ci[1], theory,
                                       self.n_rep if n_rep is None else int(n_rep)))

    def get(self, quantity: str, key="") -> Estimate:
        for e in self.estimates:
            if e.quantity == quantity and e.key == str(key):
                return e
        raise KeyError((quantity, key))

    def to_dict(self) -> dict:
        return _clean({
            "kind": self.kind,
            "config": self.config,
            "seed": self.seed,
            "n_rep": self.n_rep,
            "truncated": self.truncated,
            "estimates": [e.__dict__ for e in self.estimates],
            "theory": self.theory,
            "distances": self.distances,
            "extra": self.extra,
            "diagnostics": self.diagnostics,
        })

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def to_csv(self) -> str:
        """Long-format table; the resolved config rides along as ``#`` lines."""
        buf = io.StringIO()
        buf.write("# config=" + json.dumps(_clean(self.config), sort_keys=True) + "\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for e in self.estimates:
            w.writerow([e.quantity, e.key, _fmt(e.estimate), _fmt(e.ci_lo), _fmt(e.ci_hi),
                        _fmt(e.theory), e.n_rep, self.seed])
        return buf.getvalue()


def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v))
    v = float(v)
    return repr(v) if math.isfinite(v) else ""
