"""Counting proper graph colourings.

For d = 2 the edge constraint is the Pauli X matrix, so the count is a closed
qubit stabilizer diagram and the rewrite engine produces it exactly.  For
d >= 3 the edge tensor is provably outside the stabilizer fragment, so only a
desk-scale tensor-network contraction is offered (plus brute force for
cross-checks).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .diagram import Builder, Diagram, Phase
from .oracle import interpret
from .scalars import ExactScalar, snap_to_lattice

CONTRACTION_CAP = 14


class TooLargeError(ValueError):
    pass


@dataclass(frozen=True)
class Graph:
    """Simple undirected graph on vertices 0..n-1."""

    n_vertices: int
    edges: tuple[tuple[int, int], ...]

    def __post_init__(self):
        seen = set()
        for (u, v) in self.edges:
            if not (0 <= u < self.n_vertices and 0 <= v < self.n_vertices):
                raise ValueError(f"edge ({u},{v}) has a dangling endpoint")
            if u == v:
                raise ValueError("self-loops are not allowed")
            key = (min(u, v), max(u, v))
            if key in seen:
                raise ValueError(f"duplicate edge {key}")
            seen.add(key)

    @staticmethod
    def from_json(obj) -> "Graph":
        n = obj["vertices"] if isinstance(obj["vertices"], int) else len(obj["vertices"])
        return Graph(n, tuple((min(e[0], e[1]), max(e[0], e[1])) for e in obj["edges"]))


@dataclass(frozen=True)
class TensorNetworkSpec:
    """Raw network for the oracle: one d-dim index per vertex, one 0/1
    adjacency tensor per edge."""

    d: int
    n_vertices: int
    edges: tuple[tuple[int, int], ...]

    def x_matrix(self) -> np.ndarray:
        m = np.ones((self.d, self.d)) - np.eye(self.d)
        return m

    def contract(self) -> int:
        if self.n_vertices > CONTRACTION_CAP:
            raise TooLargeError(
                f"{self.n_vertices} vertices exceeds the contraction cap {CONTRACTION_CAP}")
        # eliminate vertices one at a time, lowest current degree first
        factors: list[tuple[np.ndarray, tuple[int, ...]]] = [
            (self.x_matrix(), (u, v)) for (u, v) in self.edges]
        remaining = set(range(self.n_vertices))
        count = 1.0
        while remaining:
            deg = {v: 0 for v in remaining}
            for _, idxs in factors:
                for v in idxs:
                    deg[v] += 1
            v = min(remaining, key=lambda x: (deg[x], x))
            touching = [f for f in factors if v in f[1]]
            rest = [f for f in factors if v not in f[1]]
            if not touching:
                count *= self.d
                remaining.discard(v)
                factors = rest
                continue
            merged, idxs = touching[0]
            for t, ti in touching[1:]:
                merged, idxs = _merge_factors(merged, idxs, t, ti)
            pos = idxs.index(v)
            merged = merged.sum(axis=pos)
            idxs = tuple(i for i in idxs if i != v)
            factors = rest + ([(merged, idxs)] if idxs else [])
            if not idxs:
                count *= float(merged)
            remaining.discard(v)
        return int(round(count))


def _merge_factors(a: np.ndarray, ai: tuple[int, ...],
                   b: np.ndarray, bi: tuple[int, ...]) -> tuple[np.ndarray, tuple[int, ...]]:
    """Pointwise-multiply two factors over their shared variables."""
    letters = "abcdefghijklmnopqrstuvwxyz"
    var_letter: dict[int, str] = {}
    for v in list(ai) + list(bi):
        if v not in var_letter:
            var_letter[v] = letters[len(var_letter)]
    sa = "".join(var_letter[v] for v in ai)
    sb = "".join(var_letter[v] for v in bi)
    out_vars = list(dict.fromkeys(list(ai) + list(bi)))
    so = "".join(var_letter[v] for v in out_vars)
    return np.einsum(f"{sa},{sb}->{so}", a, b), tuple(out_vars)


# ---------------------------------------------------------------------------
# Encoders and counters


def colouring_diagram(g: Graph, d: int) -> Diagram | TensorNetworkSpec:
    """d = 2: closed qubit diagram (edge box = Pauli X); d >= 3: raw network."""
    if d == 2:
        b = Builder(2)
        deg = [0] * g.n_vertices
        for (u, v) in g.edges:
            deg[u] += 1
            deg[v] += 1
        vids = [b.spider("Z", Phase.qubit(0), n_out=deg[k]) for k in range(g.n_vertices)]
        used = [0] * g.n_vertices
        for (u, v) in g.edges:
            box = b.spider("X", Phase.qubit(2), n_in=1, n_out=1)
            b.wire(b.out(vids[u], used[u]), b.inp(box, 0))
            b.wire(b.out(box, 0), b.out(vids[v], used[v]))
            used[u] += 1
            used[v] += 1
        return b.build()
    return TensorNetworkSpec(d, g.n_vertices, g.edges)


@dataclass(frozen=True)
class ColouringResult:
    d: int
    count: int
    method: str
    trace: list


def count_colourings(g: Graph, d: int, want_trace: bool = False) -> ColouringResult:
    """Exact number of proper d-colourings."""
    if d < 2:
        raise ValueError("counting needs d >= 2")
    if d == 2:
        from .qubit import simplify_qubit
        diagram = colouring_diagram(g, 2)
        res = simplify_qubit(diagram, trace=True)
        if res.partial:
            raise AssertionError("2-colouring diagram failed to fully reduce")
        stabilizer_rules = {"eliminate_clifford", "eliminate_pauli_pair", "absorb_isolated"}
        assert all(t["rule"] in stabilizer_rules for t in res.trace)
        value = res.scalar
        n = int(round(value.to_complex().real))
        if ExactScalar.from_int(n) != value:
            raise AssertionError(f"2-colouring count {value} is not a nonnegative integer")
        return ColouringResult(2, n, "stabilizer", res.trace if want_trace else [])
    spec = colouring_diagram(g, d)
    return ColouringResult(d, spec.contract(), "oracle", [])


def brute_force_colourings(g: Graph, d: int) -> int:
    """Direct enumeration over d^n assignments (test oracle)."""
    if d ** g.n_vertices > 50_000_000:
        raise TooLargeError("too many assignments for brute force")
    n = g.n_vertices
    assign = np.indices((d,) * n).reshape(n, -1) if n else np.zeros((0, 1), dtype=int)
    ok = np.ones(assign.shape[1], dtype=bool)
    for (u, v) in g.edges:
        ok &= assign[u] != assign[v]
    return int(np.count_nonzero(ok))


@lru_cache(maxsize=None)
def _chromatic_count(n: int, edges: frozenset, d: int) -> int:
    """Deletion-contraction evaluation of the chromatic polynomial at d."""
    if not edges:
        return d ** n
    u, v = min(edges)
    rest = edges - {(u, v)}
    deleted = _chromatic_count(n, rest, d)
    # contract v into u and relabel the last vertex down to keep keys canonical
    merged = set()
    for (a, b) in rest:
        a2 = u if a == v else a
        b2 = u if b == v else b
        a2 = v if a2 == n - 1 else a2
        b2 = v if b2 == n - 1 else b2
        if a2 != b2:
            merged.add((min(a2, b2), max(a2, b2)))
    contracted = _chromatic_count(n - 1, frozenset(merged), d)
    return deleted - contracted


def chromatic_count(g: Graph, d: int) -> int:
    """Independent deletion-contraction oracle for the number of colourings."""
    edges = frozenset((min(u, v), max(u, v)) for (u, v) in g.edges)
    return _chromatic_count(g.n_vertices, edges, d)


# ---------------------------------------------------------------------------
# Calibration


def calibrate_x_box():
    """Ratio of the pi X-spider to the 0-diagonal adjacency matrix (d = 2)."""
    from .ledger import RuleFactor
    from .potts import _plug_vectors, _snap_matrix_ratio

    b = Builder(2)
    box = b.spider("X", Phase.qubit(2), n_in=1, n_out=1)
    b.wire(b.input(), b.inp(box, 0))
    b.wire(b.out(box, 0), b.output())
    frag_t = interpret(b.build()).reshape(2, 2)
    ref = np.array([[0, 1], [1, 0]], dtype=complex)
    snapped = _snap_matrix_ratio(frag_t, ref, _plug_vectors(2), 1, "x box d=2")
    return RuleFactor("x_box", "d=2", snapped)
