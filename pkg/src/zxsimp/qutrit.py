"""Qutrit graph-like rewriting: local complementation, pivots, eliminations.

Spiders fall into three stabilizer families by their phase pair, seen through
the exponent coordinates (c1, c2) where a node contributes w^(c1 s + c2 s^2):
family M has c2 = 0 (these copy through the Fourier basis), P has c1 = 0 with
c2 nonzero, N has both nonzero.  Interior P- and N-spiders are eliminated one
at a time via a-local complementation; adjacent interior M-pairs via a proper
pivot.  Every elimination multiplies the diagram scalar by its calibrated
core factor and the usual edge-norm bookkeeping, keeping the tracked scalar
exactly equal to the tensor the diagram denotes.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from . import factors
from .convert import to_graph_like
from .diagram import Diagram, NotClosedError, Phase
from .graphlike import (
    GraphLike,
    QutritGraphLike,
    qutrit_c_coords,
    qutrit_phase_from_c,
)
from .scalars import ExactScalar


class RewriteError(ValueError):
    pass


class NotInteriorError(RewriteError):
    pass


class WrongFamilyError(RewriteError):
    pass


class NotAdjacentError(RewriteError):
    pass


class ZeroWeightEdgeError(RewriteError):
    pass


class SpiderFamily(Enum):
    M = "M"
    N = "N"
    P = "P"
    NON_STABILIZER = "non-stabilizer"


def classify_spider(phase: Phase) -> SpiderFamily:
    """Family of a qutrit phase pair: |M| = 3, |N| = 4, |P| = 2 on stabilizers."""
    if phase.d != 3:
        raise RewriteError("classify_spider expects a qutrit phase")
    if not phase.stab:
        return SpiderFamily.NON_STABILIZER
    c1, c2 = qutrit_c_coords(phase)
    if c2 == 0:
        return SpiderFamily.M
    return SpiderFamily.P if c1 == 0 else SpiderFamily.N


# ---------------------------------------------------------------------------
# Mutable engine shared by the single-step API and the simplification loop


@dataclass
class _Engine:
    g: GraphLike  # working copy; mutated in place
    trace: list = field(default_factory=list)
    steps: int = 0
    dry: bool = False  # graph transform only; calibration uses this mode

    def _scale(self, s: ExactScalar) -> None:
        if not self.dry:
            self.g.scalar = self.g.scalar * s

    def _core(self, rule: str, key: str) -> None:
        if not self.dry:
            self.g.scalar = self.g.scalar * factors.rule_factor(rule, key)

    def _c(self, slot: int) -> tuple[int, int] | None:
        p = self.g.phases[slot]
        return qutrit_c_coords(p) if p.stab else None

    def _add_phase_c(self, slot: int, d1: int, d2: int) -> None:
        if d1 % 3 == 0 and d2 % 3 == 0:
            return
        self.g._phase_add(slot, qutrit_phase_from_c(d1 % 3, d2 % 3))

    def _pair_update(self, nb: np.ndarray, delta: np.ndarray) -> int:
        """Apply a (mod 3) delta to the neighbour-pair submatrix; scalar bookkeeping.

        Returns the number of edge entries that changed.
        """
        W = self.g.weights
        sub_old = W[np.ix_(nb, nb)]
        sub_new = (sub_old + delta) % 3
        np.fill_diagonal(sub_new, 0)
        iu = np.triu_indices(len(nb), k=1)
        old_u, new_u = sub_old[iu], sub_new[iu]
        changed = 0
        for o in range(3):
            for n in range(3):
                if o == n:
                    continue
                cnt = int(np.count_nonzero((old_u == o) & (new_u == n)))
                if cnt:
                    changed += cnt
                    if not self.dry:
                        self._scale(factors.norm_change(3, o, n) ** cnt)
        W[np.ix_(nb, nb)] = sub_new
        return changed

    def _remove_incident(self, slot: int) -> None:
        if self.dry:
            return
        row = self.g.weights[slot]
        for w in (1, 2):
            cnt = int(np.count_nonzero(row == w))
            if cnt:
                self._scale(factors.edge_norm(3, w) ** cnt)

    def local_complement(self, x: int, a: int) -> int:
        """Weight update of an a-local complementation at x, with the phase
        shifts its graph-state equality puts on the neighbours.

        The result equals the input up to an X(a,a) gate on x's wire (the
        eliminations consume that gate; the rule catalogue verifies it).
        """
        g = self.g
        xs = g.slot(x)
        a %= 3
        u = g.weights[xs].astype(np.int16)
        nb = np.nonzero(u)[0]
        changed = self._pair_update(nb, a * np.outer(u[nb], u[nb]))
        for i in nb:
            if g.phases[i].stab:
                self._add_phase_c(int(i), 0, 2 * a * int(u[i]) ** 2)
            else:
                g._phase_add(int(i), qutrit_phase_from_c(0, (2 * a * int(u[i]) ** 2) % 3))
        return changed

    def eliminate_quad(self, x: int, rule: str) -> None:
        """Remove an interior node whose quadratic exponent c2 is nonzero."""
        g = self.g
        xs = g.slot(x)
        c = self._c(xs)
        c1x, c2x = c
        u = g.weights[xs].astype(np.int16)
        nb = np.nonzero(u)[0]
        self._core("d3.quad_core", f"c2={c2x},c1={c1x}")
        self._remove_incident(xs)
        changed = self._pair_update(nb, c2x * np.outer(u[nb], u[nb]))
        for i in nb:
            d1 = c2x * c1x * int(u[i])
            d2 = 2 * c2x * int(u[i]) ** 2
            if g.phases[i].stab:
                self._add_phase_c(int(i), d1, d2)
            else:
                g._phase_add(int(i), qutrit_phase_from_c(d1 % 3, d2 % 3))
        g._drop_slots({xs})
        self._log(rule, [x], changed + len(nb))

    def eliminate_m_pair(self, i: int, j: int) -> None:
        g = self.g
        si, sj = g.slot(i), g.slot(j)
        w = int(g.weights[si, sj])
        mi, mj = self._c(si)[0], self._c(sj)[0]
        u = g.weights[si].astype(np.int16).copy()
        v = g.weights[sj].astype(np.int16).copy()
        u[[si, sj]] = 0
        v[[si, sj]] = 0
        self._core("d3.mpair_core", f"w={w},mm={(mi * mj) % 3}")
        if not self.dry:
            self._scale(factors.edge_norm(3, w))
            for vec in (u, v):
                for wt in (1, 2):
                    cnt = int(np.count_nonzero(vec == wt))
                    if cnt:
                        self._scale(factors.edge_norm(3, wt) ** cnt)
        nb = np.nonzero((u != 0) | (v != 0))[0]
        delta = -w * (np.outer(u[nb], v[nb]) + np.outer(v[nb], u[nb]))
        changed = self._pair_update(nb, delta)
        for k in nb:
            d1 = -w * (mj * int(u[k]) + mi * int(v[k]))
            d2 = -w * int(u[k]) * int(v[k])
            if g.phases[k].stab:
                self._add_phase_c(int(k), d1, d2)
            else:
                g._phase_add(int(k), qutrit_phase_from_c(d1 % 3, d2 % 3))
        g._drop_slots({si, sj})
        self._log("eliminate_m_pair", [i, j], changed + len(nb) + 1)

    def absorb_isolated(self, x: int) -> None:
        """Fold an isolated interior stabilizer node's value into the scalar."""
        g = self.g
        xs = g.slot(x)
        a, b = g.phases[xs].values
        value = ExactScalar.one() + ExactScalar.omega(a) + ExactScalar.omega(b)
        self._scale(value)
        g._drop_slots({xs})
        self._log("absorb_isolated", [x], 0)

    def _log(self, rule: str, nodes: list[int], edges_updated: int) -> None:
        self.steps += 1
        self.trace.append({"step": self.steps, "rule": rule, "nodes": nodes,
                           "edges_updated": edges_updated})


def _check_interior_family(g: GraphLike, x: int, want: SpiderFamily) -> None:
    if not g.is_interior(x):
        raise NotInteriorError(f"node {x} touches the boundary")
    fam = classify_spider(g.phase(x))
    if fam is not want:
        raise WrongFamilyError(f"node {x} is {fam.value}, expected {want.value}")


# ---------------------------------------------------------------------------
# Public single-step operations (pure: input is never mutated)


def a_local_complement(g: QutritGraphLike, x: int, a: int) -> QutritGraphLike:
    """a-local complementation at x: w'_{i,j} = w_{i,j} + a w_{i,x} w_{j,x}.

    Neighbour phases pick up the quadratic shifts of the underlying
    graph-state equality; the result equals the input up to an X(a,a) gate on
    x's wire and the tracked scalar.
    """
    g.slot(x)
    out = g.copy()
    _Engine(out).local_complement(x, a)
    return out


def proper_pivot(g: QutritGraphLike, i: int, j: int, a: int) -> QutritGraphLike:
    """Proper a-pivot along ij: the (a, -a, a) local-complementation composite."""
    if g.weight(i, j) == 0:
        raise ZeroWeightEdgeError(f"pivot needs a nonzero weight between {i} and {j}")
    step1 = a_local_complement(g, i, a)
    step2 = a_local_complement(step1, j, (-a) % 3)
    return a_local_complement(step2, i, a)


def eliminate_P(g: QutritGraphLike, x: int) -> QutritGraphLike:
    """Remove an interior P-spider by local complementation at itself."""
    _check_interior_family(g, x, SpiderFamily.P)
    out = g.copy()
    _Engine(out).eliminate_quad(x, "eliminate_P")
    return out


def eliminate_N(g: QutritGraphLike, x: int) -> QutritGraphLike:
    """Remove an interior N-spider; neighbours also get linear phase shifts."""
    _check_interior_family(g, x, SpiderFamily.N)
    out = g.copy()
    _Engine(out).eliminate_quad(x, "eliminate_N")
    return out


def eliminate_M_pair(g: QutritGraphLike, i: int, j: int) -> QutritGraphLike:
    """Remove two adjacent interior M-spiders via a proper pivot along ij."""
    _check_interior_family(g, i, SpiderFamily.M)
    _check_interior_family(g, j, SpiderFamily.M)
    if g.weight(i, j) == 0:
        raise NotAdjacentError(f"nodes {i} and {j} are not adjacent")
    out = g.copy()
    _Engine(out).eliminate_m_pair(i, j)
    return out


# ---------------------------------------------------------------------------
# Simplification loop


@dataclass
class SimplifyResult:
    diagram: Diagram
    scalar: ExactScalar
    partial: bool
    steps: int
    trace: list
    numeric: complex | None = None

    def __iter__(self):
        return iter((self.diagram, self.scalar))


def _family_masks(g: GraphLike) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    n = g.node_count()
    is_p = np.zeros(n, dtype=bool)
    is_n = np.zeros(n, dtype=bool)
    is_m = np.zeros(n, dtype=bool)
    for s in range(n):
        p = g.phases[s]
        if not p.stab:
            continue
        c1, c2 = qutrit_c_coords(p)
        if c2 == 0:
            is_m[s] = True
        elif c1 == 0:
            is_p[s] = True
        else:
            is_n[s] = True
    return is_p, is_n, is_m


def simplify_qutrit(diagram: Diagram, trace: bool = False,
                    oracle_finish: bool = True) -> SimplifyResult:
    """Eliminate P-, N-, and adjacent M-spiders until no rule matches.

    Closed stabilizer diagrams reduce to the empty diagram with the exact
    scalar they denote.  Open diagrams get interior-only elimination and a
    partial flag; non-stabilizer spiders are skipped, and if a closed
    residual is small enough the numeric value is filled in by the oracle.
    """
    if diagram.d != 3:
        raise RewriteError(f"simplify_qutrit needs d=3, got d={diagram.d}")
    g = to_graph_like(diagram)
    eng = _Engine(g)
    guard = g.node_count()
    while True:
        interior = np.array([g.is_interior(v) for v in g.ids], dtype=bool)
        is_p, is_n, is_m = _family_masks(g)
        cand = np.nonzero(is_p & interior)[0]
        if cand.size:
            eng.eliminate_quad(g.ids[int(cand[0])], "eliminate_P")
            continue
        cand = np.nonzero(is_n & interior)[0]
        if cand.size:
            eng.eliminate_quad(g.ids[int(cand[0])], "eliminate_N")
            continue
        mint = is_m & interior
        pair = None
        for si in np.nonzero(mint)[0]:
            row = g.weights[si]
            js = np.nonzero((row != 0) & mint)[0]
            js = js[js > si]
            if js.size:
                pair = (g.ids[int(si)], g.ids[int(js[0])])
                break
        if pair is None:
            break
        eng.eliminate_m_pair(*pair)
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
        if residual.wire_count() <= oracle_cap(3):
            try:
                numeric = contract_closed(residual)
            except TooLargeError:
                numeric = None
    return SimplifyResult(residual, g.scalar, partial, eng.steps,
                          eng.trace if trace else [], numeric)
