"""Lookup of calibrated rule factors.

Rewrites never compute their multiplicative scalars from closed-form theory;
they look them up here.  The table is produced by the calibration harness in
ledger.py (oracle ratios of witness diagram pairs, snapped to the exact
scalar lattice) and checked in under data/calibration.json.

A rewrite's total factor is core(rule, params) multiplied by edge-norm
bookkeeping: every H-edge the rewrite deletes contributes edge_norm(d, w),
every H-edge it creates contributes 1/edge_norm(d, w), and a weight change
w -> w' contributes edge_norm(d, w)/edge_norm(d, w').
"""

from __future__ import annotations

import json
from functools import lru_cache
from importlib import resources

from .scalars import ExactScalar


class CalibrationMissingError(RuntimeError):
    pass


@lru_cache(maxsize=1)
def _table() -> dict:
    try:
        path = resources.files("zxsimp.data").joinpath("calibration.json")
        raw = json.loads(path.read_text())
    except FileNotFoundError as exc:
        raise CalibrationMissingError(
            "calibration table not found; regenerate with ledger.write_table()") from exc
    return {name: {key: ExactScalar.from_json(val) for key, val in entries.items()}
            for name, entries in raw["rules"].items()}


def rule_factor(rule: str, key: str = "") -> ExactScalar:
    table = _table()
    try:
        return table[rule][key]
    except KeyError as exc:
        raise CalibrationMissingError(f"no calibrated factor for {rule}[{key!r}]") from exc


def edge_norm(d: int, w: int) -> ExactScalar:
    """Scalar carried by one H-edge of weight w (1 for an absent edge)."""
    if w == 0:
        return ExactScalar.one()
    return rule_factor(f"d{d}.edge_norm", f"w={w}")


def norm_change(d: int, old: int, new: int) -> ExactScalar:
    """Factor for a pair's weight moving old -> new."""
    f = edge_norm(d, old)
    if new:
        f = f * edge_norm(d, new).inverse_monomial()
    return f


def clear_cache() -> None:
    _table.cache_clear()
