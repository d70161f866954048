"""Potts partition functions of signed graphs via stabilizer simplification.

A signed graph's partition function Z = sum over d-state spin assignments of
the product over edges of the interaction entry (1 off the diagonal, -t or
-1/t for equal spins, where d = t + 1/t + 2).  For d in {2, 3, 4} the edge
interaction decomposes into a stabilizer phase gadget with an exact lattice
prefactor, so Z is computed exactly by graph rewriting; for d >= 5 only the
desk-scale direct sum is offered.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from . import factors
from .diagram import Builder, Diagram, Phase
from .oracle import interpret
from .scalars import ExactScalar, snap_to_lattice


class UnsupportedDimensionError(ValueError):
    pass


class TooLargeError(ValueError):
    pass


@dataclass(frozen=True)
class SignedGraph:
    """Vertices 0..n-1 and signed edges; parallel edges are allowed."""

    n_vertices: int
    edges: tuple[tuple[int, int, str], ...]

    def __post_init__(self):
        for (u, v, s) in self.edges:
            if not (0 <= u < self.n_vertices and 0 <= v < self.n_vertices):
                raise ValueError(f"edge ({u},{v}) has a dangling endpoint")
            if s not in ("+", "-"):
                raise ValueError(f"edge sign must be '+' or '-', got {s!r}")

    @staticmethod
    def from_json(obj) -> "SignedGraph":
        n = obj["vertices"] if isinstance(obj["vertices"], int) else len(obj["vertices"])
        return SignedGraph(n, tuple((e[0], e[1], e[2]) for e in obj["edges"]))


def t_of_d(d: int) -> complex:
    """Root of t^2 + (2-d)t + 1 = 0 with nonnegative imaginary part.

    For d in {1, 2, 3, 4} this lands on a lattice root of unity; for d >= 5
    both roots are real and the one >= 1 is returned.
    """
    if d < 1:
        raise ValueError("d must be >= 1")
    disc = (d - 2) ** 2 - 4
    if disc <= 0:
        return complex((d - 2) / 2, math.sqrt(-disc) / 2)
    return complex((d - 2 + math.sqrt(disc)) / 2, 0.0)


_T_EXACT = {1: ExactScalar.zeta(8), 2: ExactScalar.zeta(6),
            3: ExactScalar.zeta(4), 4: ExactScalar.one()}


def t_exact(d: int) -> ExactScalar:
    return _T_EXACT[d]


def pm_matrix(d: int, sign: str) -> np.ndarray:
    """Eq-style interaction matrix: 1 off-diagonal, -t^{-1} (plus) or -t (minus)."""
    t = t_of_d(d)
    diag = -1 / t if sign == "+" else -t
    m = np.ones((d, d), dtype=complex)
    np.fill_diagonal(m, diag)
    return m


# ---------------------------------------------------------------------------
# Diagram encoding


def _box_phase(d: int, sign: str) -> Phase:
    if d == 2:
        return Phase.qubit(1 if sign == "+" else 3)
    return Phase.qutrit(1, 1) if sign == "+" else Phase.qutrit(2, 2)


def potts_diagram(g: SignedGraph, d: int) -> Diagram:
    """Closed diagram whose scalar is Z: phaseless vertex spiders, one
    stabilizer box per signed edge, lattice prefactors on the global scalar."""
    if d not in (2, 3, 4):
        raise UnsupportedDimensionError(f"stabilizer encoding needs d in {{2,3,4}}, got {d}")
    if d in (2, 3):
        dim = d
        b = Builder(dim)
        out_deg = [0] * g.n_vertices
        in_deg = [0] * g.n_vertices
        for (u, v, s) in g.edges:
            out_deg[u] += 1
            in_deg[v] += 1
        vids = [b.spider("Z", Phase.zero(dim), n_in=in_deg[k], n_out=out_deg[k])
                for k in range(g.n_vertices)]
        out_used = [0] * g.n_vertices
        in_used = [0] * g.n_vertices
        for (u, v, s) in g.edges:
            box = b.spider("X", _box_phase(d, s), n_in=1, n_out=1)
            b.wire(b.out(vids[u], out_used[u]), b.inp(box, 0))
            b.wire(b.out(box, 0), b.inp(vids[v], 0 + in_used[v]))
            out_used[u] += 1
            in_used[v] += 1
            # the spider is prefactor times the interaction matrix, so the
            # global scalar carries the inverse to keep the contraction at Z
            b.scale(factors.rule_factor("pm_box", f"d={d},sign={s}").inverse_monomial())
        return b.build()
    # d = 4: every vertex becomes a pair of qubit spiders, every edge the
    # two-qubit box gadget (two pi X-spiders joined by a Hadamard edge).
    b = Builder(2)
    deg = [0] * g.n_vertices
    for (u, v, s) in g.edges:
        deg[u] += 1
        deg[v] += 1
    track_a = [b.spider("Z", Phase.qubit(0), n_out=deg[k]) for k in range(g.n_vertices)]
    track_b = [b.spider("Z", Phase.qubit(0), n_out=deg[k]) for k in range(g.n_vertices)]
    used = [0] * g.n_vertices
    for (u, v, s) in g.edges:
        bx = b.spider("X", Phase.qubit(2), n_in=1, n_out=2)
        by = b.spider("X", Phase.qubit(2), n_in=1, n_out=2)
        pu, used[u] = used[u], used[u] + 1
        pv, used[v] = used[v], used[v] + 1
        b.wire(b.out(track_a[u], pu), b.inp(bx, 0))
        b.wire(b.out(track_b[u], pu), b.inp(by, 0))
        b.wire(b.out(bx, 0), b.out(track_a[v], pv))
        b.wire(b.out(by, 0), b.out(track_b[v], pv))
        b.wire(b.out(bx, 1), b.out(by, 1), h=1)
        b.scale(factors.rule_factor("pm_box", f"d=4,sign={s}").inverse_monomial())
    return b.build()


# ---------------------------------------------------------------------------
# Evaluation


@dataclass(frozen=True)
class PottsResult:
    d: int
    value: complex
    exact: ExactScalar | None
    method: str


def _spin_counts(g: SignedGraph, d: int) -> dict[tuple[int, int], int]:
    """How many assignments have (a, b) same-spin plus- and minus-edges."""
    n = g.n_vertices
    if d ** n > 40_000_000:
        raise TooLargeError(f"{d}^{n} assignments is beyond the direct-sum cap")
    assign = np.indices((d,) * n).reshape(n, -1) if n else np.zeros((0, 1), dtype=int)
    aplus = np.zeros(assign.shape[1], dtype=np.int64)
    aminus = np.zeros(assign.shape[1], dtype=np.int64)
    for (u, v, s) in g.edges:
        same = assign[u] == assign[v]
        if s == "+":
            aplus += same
        else:
            aminus += same
    counts: dict[tuple[int, int], int] = {}
    for a, b in zip(aplus.tolist(), aminus.tolist()):
        counts[(a, b)] = counts.get((a, b), 0) + 1
    return counts


def potts_direct_exact(g: SignedGraph, d: int) -> ExactScalar:
    """Direct Potts sum in exact arithmetic (d <= 4)."""
    if d not in _T_EXACT:
        raise UnsupportedDimensionError("exact direct sum needs d in {1,2,3,4}")
    t = t_exact(d)
    minus_t = -t
    minus_t_inv = -(t.inverse_monomial())
    total = ExactScalar.zero()
    for (a, b), cnt in _spin_counts(g, d).items():
        total = total + ExactScalar.from_int(cnt) * (minus_t_inv ** a) * (minus_t ** b)
    return total


def potts_direct_numeric(g: SignedGraph, d: int) -> complex:
    t = t_of_d(d)
    total = 0j
    for (a, b), cnt in _spin_counts(g, d).items():
        total += cnt * (-1 / t) ** a * (-t) ** b
    return total


def evaluate_potts(g: SignedGraph, d: int) -> PottsResult:
    """Z of the signed graph: graph rewriting for d in {2,3,4}, direct sum above."""
    if d in (2, 3, 4):
        diagram = potts_diagram(g, d)
        if d == 3:
            from .qutrit import simplify_qutrit
            res = simplify_qutrit(diagram)
        else:
            from .qubit import simplify_qubit
            res = simplify_qubit(diagram)
        if res.partial:
            raise AssertionError("stabilizer Potts encoding failed to fully reduce")
        return PottsResult(d, res.scalar.to_complex(), res.scalar, "stabilizer")
    if d < 2:
        raise UnsupportedDimensionError("Potts evaluation needs d >= 2")
    return PottsResult(d, potts_direct_numeric(g, d), None, "oracle")


# ---------------------------------------------------------------------------
# Calibration of the box prefactors


def _plug_vectors(dim: int) -> list[np.ndarray]:
    """Interpretations of the basic single-wire plug spiders."""
    from .diagram import boundary_port

    if dim == 2:
        specs = [("Z", Phase.qubit(0)), ("X", Phase.qubit(0)), ("X", Phase.qubit(2))]
    else:
        specs = [("Z", Phase.qutrit(0, 0)), ("X", Phase.qutrit(0, 0)),
                 ("X", Phase.qutrit(1, 2)), ("X", Phase.qutrit(2, 1))]
    vecs = []
    for colour, ph in specs:
        b = Builder(dim)
        s = b.spider(colour, ph, n_out=1)
        b.wire(b.out(s, 0), b.output())
        vecs.append(interpret(b.build()).ravel())
    return vecs


def _box_fragment(d: int, sign: str) -> Diagram:
    """The open decomposition diagram of one interaction box (wires only)."""
    if d in (2, 3):
        dim = d
        b = Builder(dim)
        box = b.spider("X", _box_phase(d, sign), n_in=1, n_out=1)
        from .diagram import boundary_port
        b._n_in = 1
        b._n_out = 1
        b.wire(boundary_port("in", 0), b.inp(box, 0))
        b.wire(b.out(box, 0), boundary_port("out", 0))
        return b.build()
    b = Builder(2)
    bx = b.spider("X", Phase.qubit(2), n_in=1, n_out=2)
    by = b.spider("X", Phase.qubit(2), n_in=1, n_out=2)
    from .diagram import boundary_port
    b._n_in = 2
    b._n_out = 2
    b.wire(boundary_port("in", 0), b.inp(bx, 0))
    b.wire(boundary_port("in", 1), b.inp(by, 0))
    b.wire(b.out(bx, 0), boundary_port("out", 0))
    b.wire(b.out(by, 0), boundary_port("out", 1))
    b.wire(b.out(bx, 1), b.out(by, 1), h=1)
    return b.build()


def _snap_matrix_ratio(frag_t: np.ndarray, ref: np.ndarray, vecs: list[np.ndarray],
                       wires: int, what: str):
    """Snap <effect| frag |state> / <effect| ref |state> over many pluggings."""
    from .ledger import NoExactSnapError, ZeroWitnessError

    if wires == 1:
        states = effects = vecs
    else:
        states = effects = [np.kron(a, b) for a in vecs for b in vecs]
    snapped = None
    used = 0
    for sv in states:
        for ev in effects:
            lhs = ev.conjugate() @ frag_t @ sv
            rhs = ev.conjugate() @ ref @ sv
            if abs(lhs) < 1e-9 or abs(rhs) < 1e-9:
                continue
            used += 1
            cand = snap_to_lattice(lhs / rhs)
            if cand is None:
                raise NoExactSnapError(f"{what}: ratio off the exact lattice")
            if snapped is None:
                snapped = cand
            elif snapped != cand:
                raise NoExactSnapError(f"{what}: plug-dependent ratio")
    if snapped is None or used < 3:
        raise ZeroWitnessError(f"{what}: not enough nonzero pluggings")
    return snapped


def calibrate_pm_box(d: int, sign: str):
    """Measure the decomposition-to-matrix prefactor over several pluggings."""
    from .ledger import RuleFactor

    dim = 2 if d in (2, 4) else 3
    wires = 1 if d in (2, 3) else 2
    frag_t = interpret(_box_fragment(d, sign)).reshape(d, d)
    ref = pm_matrix(d, sign)
    snapped = _snap_matrix_ratio(frag_t, ref, _plug_vectors(dim), wires,
                                 f"pm box d={d} sign={sign}")
    return RuleFactor("pm_box", f"d={d},sign={sign}", snapped)
