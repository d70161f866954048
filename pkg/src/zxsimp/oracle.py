"""Dense tensor semantics: the brute-force oracle every rewrite answers to.

interpret() contracts a diagram's generators into a dense complex tensor with
axes ordered outputs-then-inputs in declared boundary order.  Desk scale only:
the wire count is capped (ZXSIMP_ORACLE_CAP overrides) and the contraction
order is a greedy smallest-intermediate heuristic.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple

import numpy as np

from .diagram import Diagram, NotClosedError, Phase, PortRef, boundary_port

DEFAULT_CAPS = {2: 12, 3: 9}


class TooLargeError(ValueError):
    """Raised when a diagram exceeds the oracle's wire cap."""
    code = "too-large"


class ShapeMismatchError(ValueError):
    code = "shape-mismatch"


def oracle_cap(d: int) -> int:
    env = os.environ.get("ZXSIMP_ORACLE_CAP")
    if env:
        return int(env)
    return DEFAULT_CAPS[d]


# ---------------------------------------------------------------------------
# Generator tensors


def _basis(d: int) -> list[np.ndarray]:
    """X-basis kets (normalized)."""
    if d == 2:
        r = 1 / math.sqrt(2)
        return [np.array([r, r]), np.array([r, -r])]
    w = np.exp(2j * np.pi / 3)
    r = 1 / math.sqrt(3)
    return [r * np.array([1, 1, 1]),
            r * np.array([1, w, w.conjugate()]),
            r * np.array([1, w.conjugate(), w])]


def spider_tensor(d: int, colour: str, phase: Phase, n_in: int, n_out: int) -> np.ndarray:
    """Standard interpretation of a spider; axes are outputs then inputs."""
    legs = n_in + n_out
    factors = phase.leg_factors()
    if colour == "Z":
        t = np.zeros((d,) * legs, dtype=complex) if legs else np.zeros((), dtype=complex)
        if legs == 0:
            return np.array(sum(factors), dtype=complex).reshape(())
        for k in range(d):
            t[(k,) * legs] = factors[k]
        return t
    kets = _basis(d)
    t = np.zeros((d,) * legs, dtype=complex) if legs else None
    if legs == 0:
        return np.array(sum(factors), dtype=complex).reshape(())
    for k in range(d):
        term = np.array([1.0 + 0j])
        for _ in range(n_out):
            term = np.tensordot(term, kets[k], axes=0)
        for _ in range(n_in):
            term = np.tensordot(term, kets[k].conjugate(), axes=0)
        t = t + factors[k] * term.reshape(t.shape)
    return t


@lru_cache(maxsize=None)
def hadamard_matrix(d: int, h: int) -> np.ndarray:
    """H-box matrix.

    d = 2: (1/(2*sqrt(2))) [[1, 1], [1, -1]].  This normalization makes the
    two-qubit minus-t-box decomposition carry the exact sqrt(2)/8 prefactor;
    the box squares to I/4, which the rewrite machinery accounts for.
    d = 3: the contraction of the Euler decomposition Z(2,2) X(2,2) Z(2,2),
    which is -i/sqrt(3) times the Fourier matrix [w^{jk}]; h = 2 is the
    adjoint, and the two compose to the identity exactly.
    """
    if d == 2:
        if h == 0:
            return np.eye(2, dtype=complex)
        return np.array([[1, 1], [1, -1]], dtype=complex) / (2 * math.sqrt(2))
    if h == 0:
        return np.eye(3, dtype=complex)
    z = spider_tensor(3, "Z", Phase.qutrit(2, 2), 1, 1)
    x = spider_tensor(3, "X", Phase.qutrit(2, 2), 1, 1)
    h1 = z @ x @ z
    if h == 1:
        return h1
    return h1.conjugate().T


# ---------------------------------------------------------------------------
# Contraction


class _Node(NamedTuple):
    tensor: np.ndarray
    indices: tuple[int, ...]


def _greedy_contract(nodes: list[_Node], open_indices: list[int]) -> np.ndarray:
    """Contract all shared indices, greedy smallest-intermediate first."""
    nodes = list(nodes)
    while True:
        counts: dict[int, list[int]] = {}
        for pos, nd in enumerate(nodes):
            for ix in nd.indices:
                counts.setdefault(ix, []).append(pos)
        pairs: dict[tuple[int, int], list[int]] = {}
        for ix, ps in counts.items():
            if ix in open_indices:
                continue
            if len(ps) == 2 and ps[0] != ps[1]:
                pairs.setdefault((ps[0], ps[1]), []).append(ix)
            elif len(ps) == 2:
                pairs.setdefault((ps[0], ps[0]), []).append(ix)  # trace
        if not pairs:
            break
        best, shared = None, None
        for (i, j), idxs in sorted(pairs.items()):
            a, b = nodes[i], nodes[j]
            dim = a.tensor.shape[0] if a.tensor.ndim else 1
            if i == j:
                size = max(a.tensor.size // dim ** (2 * len(idxs)), 1)
            else:
                size = a.tensor.size * b.tensor.size // dim ** (2 * len(idxs))
            if best is None or size < best[0]:
                best, shared = ((size, i, j), idxs)
        _, i, j = best
        if i == j:
            nd = nodes[i]
            t, idxs = nd.tensor, list(nd.indices)
            for ix in shared:
                p1 = idxs.index(ix)
                p2 = idxs.index(ix, p1 + 1)
                t = np.trace(t, axis1=p1, axis2=p2)
                del idxs[p2], idxs[p1]
            nodes[i] = _Node(t, tuple(idxs))
            continue
        a, b = nodes[i], nodes[j]
        ax_a = [a.indices.index(ix) for ix in shared]
        ax_b = [b.indices.index(ix) for ix in shared]
        t = np.tensordot(a.tensor, b.tensor, axes=(ax_a, ax_b))
        rem_a = [ix for ix in a.indices if ix not in shared]
        rem_b = [ix for ix in b.indices if ix not in shared]
        merged = _Node(t, tuple(rem_a + rem_b))
        nodes = [nd for pos, nd in enumerate(nodes) if pos not in (i, j)] + [merged]
    # multiply disconnected pieces, ordering open axes
    scalar = complex(1.0)
    open_parts: list[_Node] = []
    for nd in nodes:
        if nd.indices:
            open_parts.append(nd)
        else:
            scalar *= complex(nd.tensor.reshape(()))
    if not open_parts:
        return np.array(scalar)
    t = np.array([scalar])
    idxs: list[int] = [-1]
    for nd in open_parts:
        t = np.tensordot(t, nd.tensor, axes=0)
        idxs += list(nd.indices)
    t = t.reshape(t.shape[1:])
    idxs = idxs[1:]
    perm = [idxs.index(ix) for ix in open_indices]
    return np.transpose(t, perm)


def interpret(diagram: Diagram, cap: int | None = None) -> np.ndarray:
    """Dense tensor of the diagram, including its scalar field.

    Axis order: outputs in declared order, then inputs in declared order.
    Raises TooLargeError above the wire cap.
    """
    limit = cap if cap is not None else oracle_cap(diagram.d)
    if diagram.wire_count() > limit:
        raise TooLargeError(
            f"{diagram.wire_count()} wires exceeds oracle cap {limit} for d={diagram.d}")
    d = diagram.d
    port_index: dict[PortRef, int] = {}
    nodes: list[_Node] = []
    next_ix = 0

    def ix_of(p: PortRef) -> int:
        nonlocal next_ix
        if p not in port_index:
            port_index[p] = next_ix
            next_ix += 1
        return port_index[p]

    for s in diagram.spiders:
        idxs = [ix_of(p) for p in
                [PortRef("s", s.id, "out", i) for i in range(s.n_out)]
                + [PortRef("s", s.id, "in", i) for i in range(s.n_in)]]
        nodes.append(_Node(spider_tensor(d, s.colour, s.phase, s.n_in, s.n_out), tuple(idxs)))
    for e in sorted(diagram.edges, key=lambda e: (tuple(e.a), tuple(e.b))):
        ia, ib = ix_of(e.a), ix_of(e.b)
        if e.h == 0:
            nodes.append(_Node(np.eye(d, dtype=complex), (ia, ib)))
        else:
            nodes.append(_Node(hadamard_matrix(d, e.h), (ia, ib)))
    open_idx = [ix_of(boundary_port("out", k)) for k in range(diagram.n_outputs)]
    open_idx += [ix_of(boundary_port("in", k)) for k in range(diagram.n_inputs)]
    result = _greedy_contract(nodes, open_idx)
    return result * diagram.scalar.to_complex()


def contract_closed(diagram: Diagram, cap: int | None = None) -> complex:
    """The scalar a closed diagram denotes (includes the scalar field)."""
    if not diagram.is_closed:
        raise NotClosedError("contract_closed requires a closed diagram")
    return complex(interpret(diagram, cap=cap).reshape(()))


# ---------------------------------------------------------------------------
# Proportionality


@dataclass(frozen=True)
class Proportionality:
    status: str  # "ratio" | "not-proportional" | "both-zero"
    ratio: complex | None = None

    @property
    def ok(self) -> bool:
        return self.status in ("ratio", "both-zero")


def proportional_ratio(x: np.ndarray, y: np.ndarray, tol: float = 1e-9) -> Proportionality:
    """Decide x = lambda * y entrywise within a relative tolerance.

    The pivot is the largest-magnitude entry of y, which avoids dividing by
    near-zeros; if both tensors vanish the result is "both-zero".
    """
    if x.shape != y.shape:
        raise ShapeMismatchError(f"shapes {x.shape} != {y.shape}")
    mx = float(np.max(np.abs(x))) if x.size else 0.0
    my = float(np.max(np.abs(y))) if y.size else 0.0
    if mx < tol and my < tol:
        return Proportionality("both-zero")
    if my < tol or mx < tol:
        return Proportionality("not-proportional")
    pivot = np.unravel_index(np.argmax(np.abs(y)), y.shape)
    lam = complex(x[pivot] / y[pivot])
    if np.max(np.abs(x - lam * y)) <= tol * max(mx, abs(lam) * my):
        return Proportionality("ratio", lam)
    return Proportionality("not-proportional")
