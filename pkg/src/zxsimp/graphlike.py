"""Graph-like diagram forms: all-green, H-edges only, simple, exact scalar.

A graph-like diagram is a simple weighted graph.  For d = 3 the weights live
in {1, 2} (H-edge, H-adjoint-edge); for d = 2 an edge is always a plain
Hadamard edge.  Each node holds a phase and at most one boundary attachment.
Instances are value-like: rewrite operations return new objects and never
mutate their input.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .diagram import Builder, Diagram, Phase
from .scalars import ExactScalar


class GraphLikeError(ValueError):
    pass


class UnknownNodeError(GraphLikeError):
    pass


def qutrit_c_coords(phase: Phase) -> tuple[int, int]:
    """Exponent pair (c1, c2) with leg weight w^(c1 s + c2 s^2) for stabilizer phases."""
    a, b = phase.values
    return ((b - a) % 3, (2 * a - b) % 3)


def qutrit_phase_from_c(c1: int, c2: int) -> Phase:
    return Phase.qutrit((c1 + c2) % 3, (2 * c1 + c2) % 3)


@dataclass
class GraphLike:
    """Shared representation for both dimensions.

    ids holds stable node identifiers in slot order; weights is the symmetric
    adjacency matrix over those slots (entries mod 2 or mod 3); boundary maps
    node id -> ("in"|"out", slot position).
    """

    d: int
    ids: list[int]
    phases: list[Phase]
    weights: np.ndarray
    boundary: dict[int, tuple[str, int]]
    n_inputs: int = 0
    n_outputs: int = 0
    scalar: ExactScalar = field(default_factory=ExactScalar.one)

    def __post_init__(self):
        self.weights = np.asarray(self.weights, dtype=np.int8)
        self._slot = {v: i for i, v in enumerate(self.ids)}

    # -- queries -----------------------------------------------------------

    def nodes(self) -> list[int]:
        return list(self.ids)

    def node_count(self) -> int:
        return len(self.ids)

    def slot(self, v: int) -> int:
        try:
            return self._slot[v]
        except KeyError:
            raise UnknownNodeError(f"no node {v}") from None

    def phase(self, v: int) -> Phase:
        return self.phases[self.slot(v)]

    def weight(self, u: int, v: int) -> int:
        return int(self.weights[self.slot(u), self.slot(v)])

    def neighbours(self, v: int) -> list[int]:
        row = self.weights[self.slot(v)]
        return [self.ids[i] for i in np.nonzero(row)[0]]

    def degree(self, v: int) -> int:
        return int(np.count_nonzero(self.weights[self.slot(v)]))

    def is_interior(self, v: int) -> bool:
        return v not in self.boundary

    def edge_count(self) -> int:
        return int(np.count_nonzero(np.triu(self.weights)))

    def fresh_id(self) -> int:
        return max(self.ids, default=-1) + 1

    def copy(self) -> "GraphLike":
        return type(self)(self.d, list(self.ids), list(self.phases),
                          self.weights.copy(), dict(self.boundary),
                          self.n_inputs, self.n_outputs, self.scalar)

    # -- invariants ----------------------------------------------------------

    def violations(self) -> list[str]:
        out = []
        w = self.weights
        if w.shape != (len(self.ids), len(self.ids)):
            out.append("adjacency shape mismatch")
            return out
        if np.any(w != w.T):
            out.append("adjacency not symmetric")
        if np.any(np.diag(w) != 0):
            out.append("self-loop present")
        lim = 2 if self.d == 2 else 3
        if np.any(w < 0) or np.any(w >= lim):
            out.append(f"edge weight out of range for d={self.d}")
        seen = set()
        for v, (side, pos) in self.boundary.items():
            if v not in self._slot:
                out.append(f"boundary attached to unknown node {v}")
            n = self.n_inputs if side == "in" else self.n_outputs
            if not (0 <= pos < n):
                out.append(f"boundary slot {side}:{pos} out of range")
            if (side, pos) in seen:
                out.append(f"boundary slot {side}:{pos} used twice")
            seen.add((side, pos))
        if len(seen) != self.n_inputs + self.n_outputs:
            out.append("boundary slot not attached to any node")
        for i, p in enumerate(self.phases):
            if p.d != self.d:
                out.append(f"node {self.ids[i]} has phase of wrong dimension")
        return out

    @property
    def is_graph_like(self) -> bool:
        return not self.violations()

    # -- export --------------------------------------------------------------

    def to_diagram(self) -> Diagram:
        """Rebuild an open Diagram (all-green spiders, H-boxed edges)."""
        b = Builder(self.d, scalar=self.scalar)
        out_used: dict[int, int] = {}
        n = len(self.ids)
        deg = {v: self.degree(v) for v in self.ids}
        for v in self.ids:
            side = self.boundary.get(v)
            b.spider("Z", self.phase(v),
                     n_in=1 if side and side[0] == "in" else 0,
                     n_out=deg[v] + (1 if side and side[0] == "out" else 0),
                     sid=v)
            out_used[v] = 0
        for i in range(n):
            for j in range(i + 1, n):
                w = int(self.weights[i, j])
                if w:
                    u, v = self.ids[i], self.ids[j]
                    b.wire(b.out(u, out_used[u]), b.out(v, out_used[v]),
                           h=w if self.d == 3 else 1)
                    out_used[u] += 1
                    out_used[v] += 1
        b._n_in = self.n_inputs
        b._n_out = self.n_outputs
        from .diagram import boundary_port
        for v, (side, pos) in self.boundary.items():
            if side == "in":
                b.wire(boundary_port("in", pos), b.inp(v, 0))
            else:
                b.wire(b.out(v, out_used[v]), boundary_port("out", pos))
                out_used[v] += 1
        return b.build()

    # -- internal rewrite helpers ---------------------------------------------

    def _phase_add(self, slot: int, delta: Phase) -> None:
        self.phases[slot] = self.phases[slot].plus(delta)

    def _drop_slots(self, slots: set[int]) -> None:
        keep = [i for i in range(len(self.ids)) if i not in slots]
        self.ids = [self.ids[i] for i in keep]
        self.phases = [self.phases[i] for i in keep]
        self.weights = self.weights[np.ix_(keep, keep)]
        self._slot = {v: i for i, v in enumerate(self.ids)}


class QubitGraphLike(GraphLike):
    """d = 2 specialization: weights in {0, 1}, phases multiples of pi/2 or generic."""

    def __init__(self, *args, **kwargs):
        super().__init__(*args, **kwargs)
        assert self.d == 2


class QutritGraphLike(GraphLike):
    """d = 3 specialization: weights in {0, 1, 2}, two-component phases."""

    def __init__(self, *args, **kwargs):
        super().__init__(*args, **kwargs)
        assert self.d == 3


def empty_graph_like(d: int, scalar: ExactScalar | None = None) -> GraphLike:
    cls = QubitGraphLike if d == 2 else QutritGraphLike
    return cls(d, [], [], np.zeros((0, 0), dtype=np.int8), {}, 0, 0,
               scalar if scalar is not None else ExactScalar.one())


def graph_like_from_data(d: int, phases: dict[int, Phase],
                         weights: dict[tuple[int, int], int],
                         boundary: dict[int, tuple[str, int]] | None = None,
                         n_inputs: int = 0, n_outputs: int = 0,
                         scalar: ExactScalar | None = None) -> GraphLike:
    """Convenience constructor from sparse data (mainly for tests)."""
    ids = sorted(phases)
    slot = {v: i for i, v in enumerate(ids)}
    w = np.zeros((len(ids), len(ids)), dtype=np.int8)
    for (u, v), wt in weights.items():
        mod = 2 if d == 2 else 3
        wt %= mod
        w[slot[u], slot[v]] = wt
        w[slot[v], slot[u]] = wt
    cls = QubitGraphLike if d == 2 else QutritGraphLike
    g = cls(d, ids, [phases[v] for v in ids], w, dict(boundary or {}),
            n_inputs, n_outputs, scalar if scalar is not None else ExactScalar.one())
    problems = g.violations()
    if problems:
        raise GraphLikeError("; ".join(problems))
    return g
