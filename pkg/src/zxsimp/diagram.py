"""Open ZX-diagrams for wire dimensions 2 and 3.

A diagram is an immutable port graph: spiders expose ordered input and output
ports, wires join exactly two endpoints (spider ports or boundary slots), and
each wire optionally carries a Hadamard box (h = 1) or, for qutrits, its
adjoint (h = 2).  Qutrit plain wires are directed: because the qutrit calculus
has no colour-neutral cup or cap, a plain wire must join an upstream face
(spider output or diagram input) to a downstream face (spider input or
diagram output).  H-wires may ignore that distinction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple

from .scalars import ExactScalar

TWO_PI = 2 * math.pi


class DiagramError(ValueError):
    """Base class for malformed-diagram errors."""
    code = "diagram-error"


class BadDimensionError(DiagramError):
    code = "bad-dimension"


class DanglingPortError(DiagramError):
    code = "dangling-port"


class DirectionViolationError(DiagramError):
    code = "direction-violation"


class ArityMismatchError(DiagramError):
    code = "arity-mismatch"


class DimensionMismatchError(DiagramError):
    code = "dimension-mismatch"


class NotClosedError(DiagramError):
    code = "not-closed"


# ---------------------------------------------------------------------------
# Phases


@dataclass(frozen=True)
class Phase:
    """Spider decoration: one angle for qubits, two for qutrits.

    Stabilizer phases are held exactly as integer residues (mod 4 in units of
    pi/2 for qubits, mod 3 in units of 2*pi/3 for qutrits); generic phases are
    radians normalized to [0, 2*pi).
    """

    d: int
    stab: bool
    values: tuple

    def __post_init__(self):
        if self.d not in (2, 3):
            raise BadDimensionError(f"phase dimension must be 2 or 3, got {self.d}")
        n = 1 if self.d == 2 else 2
        if len(self.values) != n:
            raise DiagramError(f"phase for d={self.d} needs {n} angles")
        if self.stab:
            mod = 4 if self.d == 2 else 3
            vals = tuple(int(v) % mod for v in self.values)
        else:
            vals = tuple(float(v) % TWO_PI for v in self.values)
        object.__setattr__(self, "values", vals)

    @staticmethod
    def qubit(k: int) -> "Phase":
        return Phase(2, True, (k,))

    @staticmethod
    def qubit_angle(alpha: float) -> "Phase":
        return Phase(2, False, (alpha,))

    @staticmethod
    def qutrit(a: int, b: int) -> "Phase":
        return Phase(3, True, (a, b))

    @staticmethod
    def qutrit_angles(alpha: float, beta: float) -> "Phase":
        return Phase(3, False, (alpha, beta))

    @staticmethod
    def zero(d: int) -> "Phase":
        return Phase.qubit(0) if d == 2 else Phase.qutrit(0, 0)

    def angles(self) -> tuple[float, ...]:
        if not self.stab:
            return self.values
        unit = math.pi / 2 if self.d == 2 else TWO_PI / 3
        return tuple(unit * v for v in self.values)

    def negated(self) -> "Phase":
        if self.stab:
            return Phase(self.d, True, tuple(-v for v in self.values))
        return Phase(self.d, False, tuple(-v for v in self.values))

    def plus(self, other: "Phase") -> "Phase":
        if other.d != self.d:
            raise DimensionMismatchError("cannot add phases of different dimension")
        if self.stab and other.stab:
            return Phase(self.d, True, tuple(a + b for a, b in zip(self.values, other.values)))
        a, b = self.angles(), other.angles()
        return Phase(self.d, False, tuple(x + y for x, y in zip(a, b)))

    @property
    def is_zero(self) -> bool:
        return all(v == 0 for v in self.values) if self.stab \
            else all(abs(v) < 1e-12 or abs(v - TWO_PI) < 1e-12 for v in self.values)

    def leg_factors(self) -> tuple[complex, ...]:
        """(1, e^{i alpha}) or (1, e^{i alpha}, e^{i beta}) for the oracle."""
        return (1.0,) + tuple(complex(math.cos(a), math.sin(a)) for a in self.angles())


# ---------------------------------------------------------------------------
# Ports, spiders, edges


class PortRef(NamedTuple):
    """Endpoint of a wire: a spider port or a boundary slot.

    kind is "s" (spider; owner = spider id, index = port index on that side)
    or "b" (boundary; owner = slot position, index unused).
    """

    kind: str
    owner: int
    side: str  # "in" | "out"
    index: int = 0

    def flow(self) -> int:
        """+1 for upstream faces (spider out / diagram in), -1 downstream."""
        if self.kind == "s":
            return 1 if self.side == "out" else -1
        return 1 if self.side == "in" else -1


def spider_port(sid: int, side: str, index: int) -> PortRef:
    return PortRef("s", sid, side, index)


def boundary_port(side: str, position: int) -> PortRef:
    return PortRef("b", position, side, 0)


@dataclass(frozen=True)
class Spider:
    id: int
    colour: str  # "Z" | "X"
    phase: Phase
    n_in: int
    n_out: int

    def __post_init__(self):
        if self.colour not in ("Z", "X"):
            raise DiagramError(f"spider colour must be Z or X, got {self.colour}")

    def ports(self) -> Iterable[PortRef]:
        for i in range(self.n_in):
            yield spider_port(self.id, "in", i)
        for i in range(self.n_out):
            yield spider_port(self.id, "out", i)


@dataclass(frozen=True)
class Edge:
    a: PortRef
    b: PortRef
    h: int = 0

    def __post_init__(self):
        if tuple(self.b) < tuple(self.a):
            a, b = self.b, self.a
            object.__setattr__(self, "a", a)
            object.__setattr__(self, "b", b)

    def endpoints(self) -> tuple[PortRef, PortRef]:
        return (self.a, self.b)


# ---------------------------------------------------------------------------
# Diagram


@dataclass(frozen=True)
class Diagram:
    """An open ZX-diagram with an exact global scalar."""

    d: int
    spiders: tuple[Spider, ...]
    edges: frozenset[Edge]
    n_inputs: int
    n_outputs: int
    scalar: ExactScalar = field(default_factory=ExactScalar.one)

    def __post_init__(self):
        object.__setattr__(self, "spiders", tuple(sorted(self.spiders, key=lambda s: s.id)))
        object.__setattr__(self, "edges", frozenset(self.edges))

    # -- lookups --

    def spider_map(self) -> dict[int, Spider]:
        return {s.id: s for s in self.spiders}

    @property
    def is_closed(self) -> bool:
        return self.n_inputs == 0 and self.n_outputs == 0

    def wire_count(self) -> int:
        return len(self.edges)

    def max_spider_id(self) -> int:
        return max((s.id for s in self.spiders), default=-1)

    # -- validation --

    def violations(self) -> list[str]:
        """List of invariant violations; empty iff the diagram is valid."""
        out: list[str] = []
        if self.d not in (2, 3):
            out.append(f"bad-dimension: d={self.d}")
            return out
        sp = self.spider_map()
        if len(sp) != len(self.spiders):
            out.append("duplicate spider ids")
        degree: dict[PortRef, int] = {}
        for e in self.edges:
            for p in e.endpoints():
                degree[p] = degree.get(p, 0) + 1
            if self.d == 2 and e.h not in (0, 1):
                out.append(f"bad edge kind h={e.h} for d=2")
            if self.d == 3 and e.h not in (0, 1, 2):
                out.append(f"bad edge kind h={e.h} for d=3")
            for p in e.endpoints():
                if p.kind == "s":
                    s = sp.get(p.owner)
                    if s is None:
                        out.append(f"edge references unknown spider {p.owner}")
                    else:
                        cap = s.n_in if p.side == "in" else s.n_out
                        if not (0 <= p.index < cap):
                            out.append(f"edge references missing port {p}")
                else:
                    cap = self.n_inputs if p.side == "in" else self.n_outputs
                    if not (0 <= p.owner < cap):
                        out.append(f"edge references missing boundary slot {p}")
            if self.d == 3 and e.h == 0 and e.a.flow() + e.b.flow() != 0:
                out.append(f"direction-violation: plain qutrit wire {e.a}--{e.b}")
        for s in self.spiders:
            if s.phase.d != self.d:
                out.append(f"spider {s.id} phase dimension mismatch")
            for p in s.ports():
                if degree.get(p, 0) != 1:
                    out.append(f"dangling-port: {p} has degree {degree.get(p, 0)}")
        for side, n in (("in", self.n_inputs), ("out", self.n_outputs)):
            for k in range(n):
                p = boundary_port(side, k)
                if degree.get(p, 0) != 1:
                    out.append(f"dangling-port: boundary {p} has degree {degree.get(p, 0)}")
        for p, deg in degree.items():
            if deg > 1:
                out.append(f"dangling-port: {p} has degree {deg}")
        return out

    def check_valid(self) -> "Diagram":
        problems = self.violations()
        if problems:
            first = problems[0]
            if "direction-violation" in first:
                raise DirectionViolationError("; ".join(problems))
            if "bad-dimension" in first:
                raise BadDimensionError("; ".join(problems))
            raise DanglingPortError("; ".join(problems))
        return self

    # -- structure helpers (used by compose/adjoint) --

    def shifted_ids(self, offset: int) -> "Diagram":
        def mv(p: PortRef) -> PortRef:
            return p._replace(owner=p.owner + offset) if p.kind == "s" else p
        return Diagram(
            self.d,
            tuple(Spider(s.id + offset, s.colour, s.phase, s.n_in, s.n_out) for s in self.spiders),
            frozenset(Edge(mv(e.a), mv(e.b), e.h) for e in self.edges),
            self.n_inputs, self.n_outputs, self.scalar)


def validate(diagram: Diagram) -> list[str]:
    """Report of invariant violations (empty iff valid)."""
    return diagram.violations()


# ---------------------------------------------------------------------------
# Builder and construct()


class Builder:
    """Incremental diagram assembly with validation at build time."""

    def __init__(self, d: int, scalar: ExactScalar | None = None):
        if d not in (2, 3):
            raise BadDimensionError(f"d must be 2 or 3, got {d}")
        self.d = d
        self._spiders: list[Spider] = []
        self._edges: list[Edge] = []
        self._n_in = 0
        self._n_out = 0
        self._next = 0
        self._scalar = scalar if scalar is not None else ExactScalar.one()

    def spider(self, colour: str, phase: Phase | None = None,
               n_in: int = 0, n_out: int = 0, sid: int | None = None) -> int:
        if phase is None:
            phase = Phase.zero(self.d)
        if sid is None:
            sid = self._next
        self._next = max(self._next, sid + 1)
        self._spiders.append(Spider(sid, colour, phase, n_in, n_out))
        return sid

    def inp(self, sid: int, index: int = 0) -> PortRef:
        return spider_port(sid, "in", index)

    def out(self, sid: int, index: int = 0) -> PortRef:
        return spider_port(sid, "out", index)

    def input(self) -> PortRef:
        p = boundary_port("in", self._n_in)
        self._n_in += 1
        return p

    def output(self) -> PortRef:
        p = boundary_port("out", self._n_out)
        self._n_out += 1
        return p

    def wire(self, a: PortRef, b: PortRef, h: int = 0) -> None:
        self._edges.append(Edge(a, b, h))

    def scale(self, s: ExactScalar) -> None:
        self._scalar = self._scalar * s

    def build(self) -> Diagram:
        return Diagram(self.d, tuple(self._spiders), frozenset(self._edges),
                       self._n_in, self._n_out, self._scalar).check_valid()


def construct(d: int, spec: dict) -> Diagram:
    """Build a validated diagram from declaration lists.

    spec keys: "spiders": [(id, colour, phase, n_in, n_out)], "edges":
    [(PortRef, PortRef, h)], "inputs"/"outputs": slot counts.
    """
    b = Builder(d)
    for sid, colour, phase, n_in, n_out in spec.get("spiders", ()):
        b.spider(colour, phase, n_in, n_out, sid=sid)
    b._n_in = spec.get("inputs", 0)
    b._n_out = spec.get("outputs", 0)
    for entry in spec.get("edges", ()):
        a, p, *rest = entry
        b.wire(a, p, rest[0] if rest else 0)
    return b.build()


# ---------------------------------------------------------------------------
# adjoint / compose


def adjoint(diagram: Diagram) -> Diagram:
    """Dagger: swap inputs and outputs, negate decorations, conjugate scalar."""

    def flip(p: PortRef) -> PortRef:
        return p._replace(side="out" if p.side == "in" else "in")

    spiders = tuple(
        Spider(s.id, s.colour, s.phase.negated(), s.n_out, s.n_in) for s in diagram.spiders)
    h_neg = (lambda h: h) if diagram.d == 2 else (lambda h: (-h) % 3)
    edges = frozenset(Edge(flip(e.a), flip(e.b), h_neg(e.h)) for e in diagram.edges)
    return Diagram(diagram.d, spiders, edges, diagram.n_outputs, diagram.n_inputs,
                   diagram.scalar.conjugate())


def _resolve_junctions(d: int, edges: list[Edge], junctions: set[PortRef],
                       fresh_id: int) -> tuple[list[Edge], list[Spider], int]:
    """Remove degree-2 junction endpoints by splicing their two wires.

    Qutrit H-boxes compose mod 4 on a wire; a net double Hadamard cannot sit
    on a single wire, so a phaseless spider is inserted for that case.
    """
    inserted: list[Spider] = []
    by_port: dict[PortRef, list[Edge]] = {}
    for e in edges:
        for p in e.endpoints():
            if p in junctions:
                by_port.setdefault(p, []).append(e)
    live = set(edges)
    for j in sorted(junctions):
        pair = by_port.get(j, [])
        pair = [e for e in pair if e in live]
        if len(pair) != 2:
            # self-edge through the junction or malformed; leave for validation
            continue
        e1, e2 = pair
        other1 = e1.b if e1.a == j else e1.a
        other2 = e2.b if e2.a == j else e2.a
        live.discard(e1)
        live.discard(e2)
        if d == 2:
            if e1.h and e2.h:
                # the d=2 box is not self-inverse exactly; keep one spider
                f = Spider(fresh_id, "Z", Phase.zero(2), 1, 1)
                fresh_id += 1
                inserted.append(f)
                new_edges = [Edge(other1, spider_port(f.id, "in", 0), 1),
                             Edge(spider_port(f.id, "out", 0), other2, 1)]
            else:
                new_edges = [Edge(other1, other2, e1.h + e2.h)]
        else:
            t = (_h_to_t(e1.h) + _h_to_t(e2.h)) % 4
            if t == 2 or (t == 0 and other1.flow() + other2.flow() != 0):
                # a net double Hadamard is not an edge kind, and a net plain
                # wire cannot join two same-side ports; keep one spider
                f = Spider(fresh_id, "Z", Phase.zero(3), 1, 1)
                fresh_id += 1
                inserted.append(f)
                hs = (1, 1) if t == 2 else (1, 2)
                new_edges = [Edge(other1, spider_port(f.id, "in", 0), hs[0]),
                             Edge(spider_port(f.id, "out", 0), other2, hs[1])]
            else:
                new_edges = [Edge(other1, other2, _t_to_h(t))]
        for ne in new_edges:
            live.add(ne)
            for p in ne.endpoints():
                if p in junctions:
                    by_port.setdefault(p, []).append(ne)
    return list(live), inserted, fresh_id


def _h_to_t(h: int) -> int:
    return {0: 0, 1: 1, 2: 3}[h]


def _t_to_h(t: int) -> int:
    return {0: 0, 1: 1, 3: 2}[t]


def compose(a: Diagram, b: Diagram, mode: str) -> Diagram:
    """Sequential composition a after b, or parallel juxtaposition.

    Sequential matches b's outputs to a's inputs positionally; scalars
    multiply in both modes.
    """
    if a.d != b.d:
        raise DimensionMismatchError(f"cannot compose d={a.d} with d={b.d}")
    if mode == "parallel":
        shift = a.max_spider_id() + 1
        b2 = b.shifted_ids(shift)

        def mv(p: PortRef) -> PortRef:
            if p.kind == "b":
                off = a.n_inputs if p.side == "in" else a.n_outputs
                return p._replace(owner=p.owner + off)
            return p

        edges = set(a.edges) | {Edge(mv(e.a), mv(e.b), e.h) for e in b2.edges}
        return Diagram(a.d, a.spiders + b2.spiders, frozenset(edges),
                       a.n_inputs + b.n_inputs, a.n_outputs + b.n_outputs,
                       a.scalar * b.scalar).check_valid()
    if mode != "sequential":
        raise ValueError(f"unknown composition mode {mode!r}")
    if b.n_outputs != a.n_inputs:
        raise ArityMismatchError(
            f"sequential needs |outputs(b)| == |inputs(a)|, got {b.n_outputs} != {a.n_inputs}")
    shift = a.max_spider_id() + 1
    b2 = b.shifted_ids(shift)
    junctions: set[PortRef] = set()

    def mv_a(p: PortRef) -> PortRef:
        # a's input slot k becomes junction J_k
        if p.kind == "b" and p.side == "in":
            return PortRef("j", p.owner, "x", 0)
        return p

    def mv_b(p: PortRef) -> PortRef:
        if p.kind == "b" and p.side == "out":
            return PortRef("j", p.owner, "x", 0)
        if p.kind == "b" and p.side == "in":
            return p
        return p

    edges = [Edge(mv_a(e.a), mv_a(e.b), e.h) for e in a.edges]
    edges += [Edge(mv_b(e.a), mv_b(e.b), e.h) for e in b2.edges]
    junctions = {PortRef("j", k, "x", 0) for k in range(a.n_inputs)}
    resolved, inserted, _ = _resolve_junctions(
        a.d, edges, junctions, max(a.max_spider_id(), b2.max_spider_id()) + 1)
    return Diagram(a.d, a.spiders + b2.spiders + tuple(inserted), frozenset(resolved),
                   b.n_inputs, a.n_outputs, a.scalar * b.scalar).check_valid()
