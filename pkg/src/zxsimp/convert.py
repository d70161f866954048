"""Conversion of arbitrary diagrams to graph-like form.

The pipeline follows the usual order: recolour every X-spider green, collapse
H-box chains (boxes on a single wire compose mod 4), fuse along plain wires,
expand plain wires that cannot fuse, merge parallel H-edges mod 3 (mod 2 for
qubits), then repair boundary attachments.  Every step multiplies the exact
scalar by its calibrated factor, so the conversion preserves the tensor
exactly, not just proportionally.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import factors
from .diagram import Diagram, Phase
from .graphlike import GraphLike, QubitGraphLike, QutritGraphLike
from .scalars import ExactScalar

# H-box count along a wire, tracked mod 4 for qutrits (a net double Hadamard
# is not an edge kind and is re-expanded later), mod 2 for qubits.
_H_TO_T = {0: 0, 1: 1, 2: 3}


@dataclass
class _End:
    node: object  # spider id (int) or boundary key ("b", side, pos)
    side: str     # original port side, only consulted during recolouring


@dataclass
class _MEdge:
    a: _End
    b: _End
    t: int

    def other(self, node) -> _End:
        return self.b if self.a.node == node else self.a

    def touches(self, node) -> bool:
        return self.a.node == node or self.b.node == node

    def is_loop(self) -> bool:
        return self.a.node == self.b.node


@dataclass
class _Work:
    d: int
    phases: dict[int, Phase]
    edges: list[_MEdge]
    scalar: ExactScalar
    next_id: int
    mod_t: int = field(init=False)

    def __post_init__(self):
        self.mod_t = 4 if self.d == 3 else 2

    def fresh(self) -> int:
        nid = self.next_id
        self.next_id += 1
        self.phases[nid] = Phase.zero(self.d)
        return nid

    def scale(self, s: ExactScalar) -> None:
        self.scalar = self.scalar * s


def _load(diagram: Diagram) -> _Work:
    phases = {}
    colours = {}
    for s in diagram.spiders:
        phases[s.id] = s.phase
        colours[s.id] = s.colour
    edges = []
    for e in sorted(diagram.edges, key=lambda e: (tuple(e.a), tuple(e.b))):
        ends = []
        for p in e.endpoints():
            if p.kind == "s":
                ends.append(_End(p.owner, p.side))
            else:
                ends.append(_End(("b", p.side, p.owner), p.side))
        t = _H_TO_T[e.h] if diagram.d == 3 else e.h
        edges.append(_MEdge(ends[0], ends[1], t))
    w = _Work(diagram.d, phases, edges, diagram.scalar,
              diagram.max_spider_id() + 1)
    _recolour(w, colours, diagram)
    return w


def _recolour(w: _Work, colours: dict[int, str], diagram: Diagram) -> None:
    """Turn every X-spider green by pushing H-boxes onto its legs."""
    red = {sid for sid, c in colours.items() if c == "X"}
    if not red:
        return
    if w.d == 3:
        unit = factors.rule_factor("d3.cc_unit")
        unit_inv = unit.inverse_monomial()
        for s in diagram.spiders:
            if s.id in red:
                k = s.n_out - s.n_in
                w.scale((unit if k >= 0 else unit_inv) ** abs(k))
    else:
        unit = factors.rule_factor("d2.cc_unit")
        for s in diagram.spiders:
            if s.id in red:
                w.scale(unit ** (s.n_in + s.n_out))
    for e in w.edges:
        for end in (e.a, e.b):
            if isinstance(end.node, int) and end.node in red:
                if w.d == 2:
                    e.t = e.t + 1  # raw box count; reduced mod 2 next pass
                else:
                    e.t = (e.t + (1 if end.side == "out" else 3)) % 4
    if w.d == 2:
        _normalize_qubit_boxes(w)


def _normalize_qubit_boxes(w: _Work) -> None:
    """Reduce raw per-wire box counts mod 2; each dropped pair is worth I/4."""
    sq = factors.rule_factor("d2.box_square")
    for e in w.edges:
        pairs, e.t = divmod(e.t, 2)
        if pairs:
            w.scale(sq ** pairs)


def _loop_phase_shift(w: _Work, node: int, t: int) -> None:
    """Fold an H^t self-loop (t odd) into the node's phase."""
    if w.d == 2:
        w.phases[node] = w.phases[node].plus(Phase.qubit(2))
        w.scale(factors.edge_norm(2, 1))
    elif t == 1:
        w.phases[node] = w.phases[node].plus(Phase.qutrit(1, 1))
        w.scale(factors.edge_norm(3, 1))
    else:
        w.phases[node] = w.phases[node].plus(Phase.qutrit(2, 2))
        w.scale(factors.edge_norm(3, 2))


def _collapse_double_loop(w: _Work, node: int) -> None:
    """A net double Hadamard in a self-loop pins the node to its 0-component.

    The node disappears; each remaining leg is capped, which shows up as a
    fresh phaseless node joined by one extra Hadamard on that leg.
    """
    w.scale(factors.rule_factor("d3.collapse", "base"))
    keep = []
    for e in w.edges:
        if not e.touches(node):
            keep.append(e)
        elif e.is_loop():
            w.scale(factors.rule_factor("d3.collapse", f"loop_t={e.t}"))
        else:
            other = e.other(node)
            f = w.fresh()
            w.scale(factors.rule_factor("d3.collapse", "leg"))
            keep.append(_MEdge(_End(f, "out"), other, (e.t + 1) % 4))
    w.edges = keep
    del w.phases[node]


def _process_loops(w: _Work) -> None:
    changed = True
    while changed:
        changed = False
        for e in list(w.edges):
            if not e.is_loop() or not isinstance(e.a.node, int):
                continue
            w.edges.remove(e)
            changed = True
            if e.t == 0:
                continue
            if w.d == 3 and e.t == 2:
                _collapse_double_loop(w, e.a.node)
                break
            _loop_phase_shift(w, e.a.node, e.t)


def _mutual_edges(w: _Work, u: int, v: int) -> list[_MEdge]:
    return [e for e in w.edges
            if {x.node for x in (e.a, e.b)} == {u, v}]


def _fuse(w: _Work, u: int, v: int) -> None:
    """Merge v into u along plain wires.

    Plain mutual edges vanish (extra ones were plain self-loops); mutual
    edges carrying boxes become self-loops on the fused node, folded in by
    the caller's loop pass.
    """
    w.phases[u] = w.phases[u].plus(w.phases[v])
    out = []
    for e in w.edges:
        if {x.node for x in (e.a, e.b)} == {u, v} and e.t % w.mod_t == 0:
            continue
        for end in (e.a, e.b):
            if end.node == v:
                end.node = u
        out.append(e)
    w.edges = out
    del w.phases[v]


def _expand_plain(w: _Work, e: _MEdge) -> None:
    """Plain wire between H-connected spiders: insert a node between opposite boxes."""
    w.edges.remove(e)
    f = w.fresh()
    if w.d == 3:
        w.edges.append(_MEdge(_End(e.a.node, e.a.side), _End(f, "in"), 1))
        w.edges.append(_MEdge(_End(f, "out"), _End(e.b.node, e.b.side), 3))
    else:
        w.edges.append(_MEdge(_End(e.a.node, e.a.side), _End(f, "in"), 1))
        w.edges.append(_MEdge(_End(f, "out"), _End(e.b.node, e.b.side), 1))


def _fusion_pass(w: _Work) -> None:
    while True:
        plain = next((e for e in w.edges
                      if e.t == 0 and not e.is_loop()
                      and isinstance(e.a.node, int) and isinstance(e.b.node, int)), None)
        if plain is None:
            return
        u, v = plain.a.node, plain.b.node
        if w.d == 2 or all(m.t == 0 for m in _mutual_edges(w, u, v)):
            _fuse(w, u, v)
            _process_loops(w)
        else:
            _expand_plain(w, plain)


def _split_double_edges(w: _Work) -> None:
    for e in list(w.edges):
        if w.d == 3 and e.t == 2 and not e.is_loop():
            w.edges.remove(e)
            f = w.fresh()
            w.edges.append(_MEdge(e.a, _End(f, "in"), 1))
            w.edges.append(_MEdge(_End(f, "out"), e.b, 1))


def _t_to_w(d: int, t: int) -> int:
    if d == 2:
        return t % 2
    return {0: 0, 1: 1, 3: 2}[t]


def _merge_parallels(w: _Work) -> None:
    """Parallel H-edges between one pair sum mod 3 (mod 2 for qubits)."""
    groups: dict[tuple, list[_MEdge]] = {}
    for e in w.edges:
        if e.is_loop() or not (isinstance(e.a.node, int) and isinstance(e.b.node, int)):
            continue
        key = tuple(sorted((e.a.node, e.b.node)))
        groups.setdefault(key, []).append(e)
    for key, es in sorted(groups.items()):
        if len(es) < 2:
            continue
        mod = 2 if w.d == 2 else 3
        total = 0
        for e in es:
            wt = _t_to_w(w.d, e.t)
            total = (total + wt) % mod
            w.scale(factors.edge_norm(w.d, wt))
            w.edges.remove(e)
        if total:
            w.scale(factors.edge_norm(w.d, total).inverse_monomial())
            w.edges.append(_MEdge(_End(key[0], "out"), _End(key[1], "out"),
                                  total if w.d == 2 else {1: 1, 2: 3}[total]))


def _append_box_chain(w: _Work, u: int, v: int, t: int) -> None:
    """Add edges from u to v realizing a net run of t H-boxes, exactly.

    A lone plain wire or a double Hadamard cannot be a single graph-like
    edge, so those cases thread through one extra phaseless node.
    """
    if w.d == 2:
        seq = [1, 1] if t % 2 == 0 else [1]
        if t % 2 == 0:
            # two boxes in series are worth I/4; compensate exactly
            w.scale(factors.rule_factor("d2.box_square").inverse_monomial())
    else:
        seq = {0: [1, 3], 1: [1], 2: [1, 1], 3: [3]}[t % 4]
    cur = u
    for tt in seq[:-1]:
        f = w.fresh()
        w.edges.append(_MEdge(_End(cur, "out"), _End(f, "in"), tt))
        cur = f
    w.edges.append(_MEdge(_End(cur, "out"), _End(v, "in"), seq[-1]))


def _boundary_pass(w: _Work) -> dict[int, tuple[str, int]]:
    """Attach every boundary slot to a node by a plain wire, one slot per node."""
    boundary: dict[int, tuple[str, int]] = {}
    pending = [e for e in w.edges if not isinstance(e.a.node, int)
               or not isinstance(e.b.node, int)]
    for e in sorted(pending, key=lambda e: (str(e.a.node), str(e.b.node))):
        w.edges.remove(e)
        bends = [x.node for x in (e.a, e.b) if not isinstance(x.node, int)]
        nends = [x.node for x in (e.a, e.b) if isinstance(x.node, int)]
        if len(bends) == 1:
            (_, side, pos), node = bends[0], nends[0]
            if e.t == 0 and node not in boundary:
                boundary[node] = (side, pos)
                continue
            f = w.fresh()
            boundary[f] = (side, pos)
            _append_box_chain(w, f, node, e.t)
        else:
            (_, s1, p1), (_, s2, p2) = bends
            f1, f2 = w.fresh(), w.fresh()
            boundary[f1] = (s1, p1)
            boundary[f2] = (s2, p2)
            _append_box_chain(w, f1, f2, e.t)
    return boundary


def _finish(w: _Work, boundary: dict[int, tuple[str, int]],
            n_in: int, n_out: int) -> GraphLike:
    ids = sorted(w.phases)
    slot = {v: i for i, v in enumerate(ids)}
    mat = np.zeros((len(ids), len(ids)), dtype=np.int8)
    for e in w.edges:
        u, v = e.a.node, e.b.node
        wt = _t_to_w(w.d, e.t)
        mat[slot[u], slot[v]] = wt
        mat[slot[v], slot[u]] = wt
    cls = QubitGraphLike if w.d == 2 else QutritGraphLike
    g = cls(w.d, ids, [w.phases[v] for v in ids], mat, boundary, n_in, n_out, w.scalar)
    problems = g.violations()
    if problems:
        raise AssertionError("conversion produced non-graph-like output: "
                             + "; ".join(problems))
    return g


def to_graph_like(diagram: Diagram) -> GraphLike:
    """Convert any diagram to graph-like form; the tensor is preserved exactly."""
    diagram.check_valid()
    w = _load(diagram)
    _process_loops(w)
    _fusion_pass(w)
    _split_double_edges(w)
    _merge_parallels(w)
    boundary = _boundary_pass(w)
    return _finish(w, boundary, diagram.n_inputs, diagram.n_outputs)


def reduce_parallel_h_edges(d: int, phases: dict[int, Phase],
                            multi_edges: list[tuple[int, int, int]],
                            boundary: dict[int, tuple[str, int]] | None = None,
                            n_inputs: int = 0, n_outputs: int = 0,
                            scalar: ExactScalar | None = None) -> GraphLike:
    """Merge parallel H-edge multiplicities mod 3 (mod 2 for d = 2).

    Accepts a multigraph as an edge list with weights in {1, 2}; returns the
    simple graph-like diagram with the merge factors folded into the scalar.
    """
    from .graphlike import GraphLikeError

    w = _Work(d, dict(phases), [], scalar if scalar is not None else ExactScalar.one(),
              max(phases, default=-1) + 1)
    for (u, v, wt) in multi_edges:
        if u == v:
            raise GraphLikeError("self-loops are not part of the multigraph form")
        t = wt if d == 2 else {1: 1, 2: 3}[wt]
        w.edges.append(_MEdge(_End(u, "out"), _End(v, "out"), t))
    _merge_parallels(w)
    return _finish(w, dict(boundary or {}), n_inputs, n_outputs)


def reduce_h_box_chain(diagram: Diagram) -> Diagram:
    """Collapse runs of H-boxes threaded through phaseless pass-through spiders.

    Boxes on one wire compose mod 4: four vanish, three flip to the adjoint,
    and a net run of two stays separated by a single phaseless spider.  The
    result is exact (no scalar change).  Defined for d = 3 only (the qubit
    box is not self-inverse exactly under this oracle's normalization).
    """
    from .diagram import Edge, PortRef, Spider, spider_port, _resolve_junctions

    diagram.check_valid()
    if diagram.d != 3:
        raise ValueError("reduce_h_box_chain is a qutrit operation")
    spiders = {s.id: s for s in diagram.spiders}
    self_looped = {e.a.owner for e in diagram.edges
                   if e.a.kind == "s" and e.b.kind == "s" and e.a.owner == e.b.owner}
    removable = []
    for s in diagram.spiders:
        if not s.phase.is_zero or s.n_in + s.n_out != 2 or s.id in self_looped:
            continue
        if diagram.d == 3 and (s.colour != "Z" or (s.n_in, s.n_out) != (1, 1)):
            continue
        if diagram.d == 2 and s.colour not in ("Z", "X"):
            continue
        removable.append(s.id)
    junctions = set()
    edges = []
    for e in diagram.edges:
        def mv(p: PortRef) -> PortRef:
            if p.kind == "s" and p.owner in removable:
                return PortRef("j", p.owner, p.side, p.index)
            return p
        edges.append(Edge(mv(e.a), mv(e.b), e.h))
    for sid in removable:
        s = spiders[sid]
        for side, n in (("in", s.n_in), ("out", s.n_out)):
            for i in range(n):
                junctions.add(PortRef("j", sid, side, i))
    # merge the two ports of each removed spider into a single junction key
    unified = []
    for e in edges:
        def uni(p: PortRef) -> PortRef:
            return PortRef("j", p.owner, "x", 0) if p.kind == "j" else p
        unified.append(Edge(uni(e.a), uni(e.b), e.h))
    junction_keys = {PortRef("j", sid, "x", 0) for sid in removable}
    resolved, inserted, _ = _resolve_junctions(
        diagram.d, unified, junction_keys, diagram.max_spider_id() + 1)
    keep = tuple(s for s in diagram.spiders if s.id not in removable) + tuple(inserted)
    return Diagram(diagram.d, keep, frozenset(resolved),
                   diagram.n_inputs, diagram.n_outputs, diagram.scalar).check_valid()
