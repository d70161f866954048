"""Qubit graph-like rewriting: local complementation and pivot eliminations.

Interior spiders with phase +-pi/2 are removed by complementing their
neighbourhood and shifting each neighbour's phase by the opposite quarter
turn; adjacent interior pairs with phases in {0, pi} are removed by a pivot,
which toggles the edges between the three neighbourhood classes and moves
the pair's phases onto the opposite neighbourhoods.  Scalars are tracked
exactly through the calibrated core factors and edge-norm bookkeeping.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import factors
from .convert import to_graph_like
from .diagram import Diagram, Phase
from .graphlike import GraphLike, QubitGraphLike
from .qutrit import (
    NotAdjacentError,
    NotInteriorError,
    RewriteError,
    SimplifyResult,
    WrongFamilyError,
)
from .scalars import ExactScalar


class NotCliffordPhaseError(RewriteError):
    pass


class NotPauliPhaseError(RewriteError):
    pass


def _stab_k(phase: Phase) -> int | None:
    return phase.values[0] if phase.stab else None


@dataclass
class _Engine:
    g: GraphLike
    trace: list = field(default_factory=list)
    steps: int = 0
    dry: bool = False  # graph transform only; calibration uses this mode

    def _scale(self, s: ExactScalar) -> None:
        if not self.dry:
            self.g.scalar = self.g.scalar * s

    def _core(self, rule: str, key: str) -> None:
        if not self.dry:
            self.g.scalar = self.g.scalar * factors.rule_factor(rule, key)

    def _toggle_pairs(self, rows: np.ndarray, cols: np.ndarray) -> int:
        """Toggle all edges between two disjoint index sets (complete bipartite)."""
        W = self.g.weights
        if rows.size == 0 or cols.size == 0:
            return 0
        sub = W[np.ix_(rows, cols)]
        created = int(np.count_nonzero(sub == 0))
        removed = int(np.count_nonzero(sub == 1))
        if not self.dry:
            if removed:
                self._scale(factors.edge_norm(2, 1) ** removed)
            if created:
                self._scale(factors.edge_norm(2, 1).inverse_monomial() ** created)
        W[np.ix_(rows, cols)] = 1 - sub
        W[np.ix_(cols, rows)] = (1 - sub).T
        return created + removed

    def _complement_within(self, nb: np.ndarray) -> int:
        W = self.g.weights
        if nb.size < 2:
            return 0
        sub = W[np.ix_(nb, nb)]
        new = 1 - sub
        np.fill_diagonal(new, 0)
        iu = np.triu_indices(len(nb), k=1)
        removed = int(np.count_nonzero(sub[iu] == 1))
        created = int(np.count_nonzero(sub[iu] == 0))
        if not self.dry:
            if removed:
                self._scale(factors.edge_norm(2, 1) ** removed)
            if created:
                self._scale(factors.edge_norm(2, 1).inverse_monomial() ** created)
        W[np.ix_(nb, nb)] = new
        return created + removed

    def _shift_phase(self, slot: int, quarter_turns: int) -> None:
        if quarter_turns % 4 == 0:
            return
        self.g._phase_add(slot, Phase.qubit(quarter_turns))

    def local_complement(self, v: int) -> int:
        """Complement N(v) and shift each neighbour by -pi/2.

        Sound up to an X(pi/2) gate on v's wire plus the tracked scalar,
        matching the graph-state local-complementation equality.
        """
        g = self.g
        vs = g.slot(v)
        nb = np.nonzero(g.weights[vs])[0]
        changed = self._complement_within(nb)
        for i in nb:
            self._shift_phase(int(i), -1)
        return changed

    def eliminate_clifford(self, v: int) -> None:
        g = self.g
        vs = g.slot(v)
        k = _stab_k(g.phases[vs])  # 1 or 3
        nb = np.nonzero(g.weights[vs])[0]
        self._core("d2.clifford_core", f"k={k}")
        deg = int(nb.size)
        if deg and not self.dry:
            self._scale(factors.edge_norm(2, 1) ** deg)
        eps = 1 if k == 1 else -1
        changed = self._complement_within(nb)
        for i in nb:
            self._shift_phase(int(i), -eps)
        g._drop_slots({vs})
        self._log("eliminate_clifford", [v], changed + deg)

    def eliminate_pauli_pair(self, u: int, v: int) -> None:
        g = self.g
        su, sv = g.slot(u), g.slot(v)
        ju = _stab_k(g.phases[su]) // 2  # 0 or 1
        jv = _stab_k(g.phases[sv]) // 2
        W = g.weights
        row_u = W[su].astype(bool).copy()
        row_v = W[sv].astype(bool).copy()
        row_u[[su, sv]] = False
        row_v[[su, sv]] = False
        self._core("d2.pauli_core", f"jj={ju * jv}")
        deg = int(np.count_nonzero(W[su]) + np.count_nonzero(W[sv])) - 1
        if not self.dry:
            self._scale(factors.edge_norm(2, 1) ** deg)
        both = np.nonzero(row_u & row_v)[0]
        only_u = np.nonzero(row_u & ~row_v)[0]
        only_v = np.nonzero(row_v & ~row_u)[0]
        changed = self._toggle_pairs(only_u, only_v)
        changed += self._toggle_pairs(only_u, both)
        changed += self._toggle_pairs(only_v, both)
        for i in both:
            self._shift_phase(int(i), 2)
        if ju:
            for i in np.nonzero(row_v)[0]:
                self._shift_phase(int(i), 2)
        if jv:
            for i in np.nonzero(row_u)[0]:
                self._shift_phase(int(i), 2)
        g._drop_slots({su, sv})
        self._log("eliminate_pauli_pair", [u, v], changed + deg + 1)

    def absorb_isolated(self, v: int) -> None:
        g = self.g
        vs = g.slot(v)
        k = g.phases[vs].values[0]
        self._scale(ExactScalar.one() + ExactScalar.i_power(k))
        g._drop_slots({vs})
        self._log("absorb_isolated", [v], 0)

    def _log(self, rule: str, nodes: list[int], edges_updated: int) -> None:
        self.steps += 1
        self.trace.append({"step": self.steps, "rule": rule, "nodes": nodes,
                           "edges_updated": edges_updated})


# ---------------------------------------------------------------------------
# Public operations


def to_graph_like_qubit(diagram: Diagram) -> QubitGraphLike:
    """Graph-like form of a d = 2 diagram; tensor preserved exactly."""
    if diagram.d != 2:
        raise RewriteError(f"expected d=2, got d={diagram.d}")
    return to_graph_like(diagram)


def local_complement_qubit(g: QubitGraphLike, v: int) -> QubitGraphLike:
    """Local complementation at v with the quarter-turn neighbour shifts.

    Equal to the input up to an X(pi/2) gate on v's wire and the scalar.
    """
    g.slot(v)
    out = g.copy()
    _Engine(out).local_complement(v)
    return out


def eliminate_clifford(g: QubitGraphLike, v: int) -> QubitGraphLike:
    """Remove an interior spider with phase +-pi/2."""
    if not g.is_interior(v):
        raise NotInteriorError(f"node {v} touches the boundary")
    if _stab_k(g.phase(v)) not in (1, 3):
        raise NotCliffordPhaseError(f"node {v} phase is not +-pi/2")
    out = g.copy()
    _Engine(out).eliminate_clifford(v)
    return out


def eliminate_pauli_pair(g: QubitGraphLike, u: int, v: int) -> QubitGraphLike:
    """Remove two adjacent interior spiders with phases in {0, pi} via a pivot."""
    for x in (u, v):
        if not g.is_interior(x):
            raise NotInteriorError(f"node {x} touches the boundary")
        if _stab_k(g.phase(x)) not in (0, 2):
            raise NotPauliPhaseError(f"node {x} phase is not in {{0, pi}}")
    if g.weight(u, v) == 0:
        raise NotAdjacentError(f"nodes {u} and {v} are not adjacent")
    out = g.copy()
    _Engine(out).eliminate_pauli_pair(u, v)
    return out


def simplify_qubit(diagram: Diagram, trace: bool = False,
                   oracle_finish: bool = True) -> SimplifyResult:
    """Eliminate +-pi/2 spiders, then Pauli pairs, until no rule matches.

    Closed stabilizer diagrams reduce to the empty diagram and the exact
    scalar; open or partly non-stabilizer inputs return a residual with the
    partial flag set.
    """
    if diagram.d != 2:
        raise RewriteError(f"simplify_qubit needs d=2, got d={diagram.d}")
    g = to_graph_like(diagram)
    eng = _Engine(g)
    guard = g.node_count()
    while True:
        interior = np.array([g.is_interior(v) for v in g.ids], dtype=bool)
        ks = np.array([p.values[0] if p.stab else -1 for p in g.phases], dtype=np.int8)
        cand = np.nonzero(interior & ((ks == 1) | (ks == 3)))[0]
        if cand.size:
            eng.eliminate_clifford(g.ids[int(cand[0])])
            continue
        pauli = interior & ((ks == 0) | (ks == 2))
        pair = None
        for su in np.nonzero(pauli)[0]:
            js = np.nonzero((g.weights[su] != 0) & pauli)[0]
            js = js[js > su]
            if js.size:
                pair = (g.ids[int(su)], g.ids[int(js[0])])
                break
        if pair is None:
            break
        eng.eliminate_pauli_pair(*pair)
        if eng.steps > guard:
            raise AssertionError("elimination loop exceeded node-count bound")
    for v in list(g.ids):
        if g.is_interior(v) and g.degree(v) == 0 and g.phase(v).stab:
            eng.absorb_isolated(v)
    residual = g.to_diagram()
    partial = g.node_count() > 0
    numeric = None
    if not partial:
        numeric = g.scalar.to_complex()
    elif oracle_finish and residual.is_closed:
        from .oracle import TooLargeError, contract_closed, oracle_cap
        if residual.wire_count() <= oracle_cap(2):
            try:
                numeric = contract_closed(residual)
            except TooLargeError:
                numeric = None
    return SimplifyResult(residual, g.scalar, partial, eng.steps,
                          eng.trace if trace else [], numeric)
