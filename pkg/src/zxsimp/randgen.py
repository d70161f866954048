"""Seeded random diagram generators for the verification suites."""

from __future__ import annotations

import random

from .diagram import Builder, Diagram, Phase, boundary_port, spider_port
from .graphlike import GraphLike, graph_like_from_data


def random_phase(rng: random.Random, d: int, stabilizer: bool = True) -> Phase:
    if d == 2:
        if stabilizer:
            return Phase.qubit(rng.randrange(4))
        return Phase.qubit_angle(rng.uniform(0, 6.28))
    if stabilizer:
        return Phase.qutrit(rng.randrange(3), rng.randrange(3))
    return Phase.qutrit_angles(rng.uniform(0, 6.28), rng.uniform(0, 6.28))


def random_graph_like(rng: random.Random, d: int, n: int,
                      edge_prob: float = 0.5, n_outputs: int = 0) -> GraphLike:
    """Random graph-like diagram with stabilizer phases."""
    phases = {i: random_phase(rng, d) for i in range(n)}
    weights = {}
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < edge_prob:
                weights[(i, j)] = rng.randrange(1, 3) if d == 3 else 1
    boundary = {i: ("out", i) for i in range(min(n_outputs, n))}
    return graph_like_from_data(d, phases, weights, boundary,
                                n_outputs=min(n_outputs, n))


def random_closed_graph_state_diagram(rng: random.Random, d: int, n: int,
                                      edge_prob: float = 0.5) -> Diagram:
    return random_graph_like(rng, d, n, edge_prob).to_diagram()


def random_closed_diagram(rng: random.Random, d: int, n_spiders: int,
                          stabilizer: bool = True) -> Diagram:
    """Random closed diagram with mixed colours, plain wires, and H-kinds.

    Spider arities are sampled and every port is paired off: qutrit pairings
    respect the plain-wire direction rule by switching unmatched same-side
    pairs to Hadamard edges.
    """
    b = Builder(d)
    ports: list = []
    for _ in range(n_spiders):
        n_in = rng.randrange(0, 3)
        n_out = rng.randrange(0, 3)
        if n_in + n_out == 0:
            n_out = 1
        colour = rng.choice("ZX")
        sid = b.spider(colour, random_phase(rng, d, stabilizer), n_in, n_out)
        ports += [spider_port(sid, "in", i) for i in range(n_in)]
        ports += [spider_port(sid, "out", i) for i in range(n_out)]
    if len(ports) % 2:
        extra = b.spider("Z", Phase.zero(d), 0, 1)
        ports.append(spider_port(extra, "out", 0))
    rng.shuffle(ports)
    while ports:
        p = ports.pop()
        q = ports.pop()
        if d == 3:
            if p.flow() + q.flow() == 0 and rng.random() < 0.5:
                h = 0
            else:
                h = rng.randrange(1, 3)
        else:
            h = rng.randrange(0, 2)
        b.wire(p, q, h)
    return b.build()


def random_open_diagram(rng: random.Random, d: int, n_spiders: int,
                        n_in: int, n_out: int, stabilizer: bool = True) -> Diagram:
    """Open variant: boundary slots are wired into the random port pairing."""
    b = Builder(d)
    ports: list = []
    for _ in range(n_spiders):
        ni = rng.randrange(0, 3)
        no = rng.randrange(0, 3)
        if ni + no == 0:
            no = 1
        colour = rng.choice("ZX")
        sid = b.spider(colour, random_phase(rng, d, stabilizer), ni, no)
        ports += [spider_port(sid, "in", i) for i in range(ni)]
        ports += [spider_port(sid, "out", i) for i in range(no)]
    bports = [b.input() for _ in range(n_in)] + [b.output() for _ in range(n_out)]
    if (len(ports) + len(bports)) % 2:
        extra = b.spider("Z", Phase.zero(d), 0, 1)
        ports.append(spider_port(extra, "out", 0))
    rng.shuffle(ports)
    ports = bports + ports  # boundary first so they pair with spiders mostly
    rng.shuffle(ports)
    while ports:
        p = ports.pop()
        q = ports.pop()
        if d == 3:
            if p.flow() + q.flow() == 0 and rng.random() < 0.5:
                h = 0
            else:
                h = rng.randrange(1, 3)
        else:
            h = rng.randrange(0, 2)
        b.wire(p, q, h)
    return b.build()


def random_signed_graph(rng: random.Random, max_vertices: int = 8,
                        max_edges: int = 12):
    from .potts import SignedGraph

    n = rng.randrange(1, max_vertices + 1)
    m = rng.randrange(0, max_edges + 1)
    edges = tuple((rng.randrange(n), rng.randrange(n), rng.choice("+-"))
                  for _ in range(m))
    return SignedGraph(n, edges)


def random_simple_graph(rng: random.Random, max_vertices: int = 8,
                        edge_prob: float = 0.4):
    from .colouring import Graph

    n = rng.randrange(1, max_vertices + 1)
    edges = tuple((i, j) for i in range(n) for j in range(i + 1, n)
                  if rng.random() < edge_prob)
    return Graph(n, edges)
