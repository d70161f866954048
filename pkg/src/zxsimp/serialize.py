"""JSON serialization for diagrams (schema version "zxsimp-v1").

The schema is strict: unknown fields raise SchemaVersionError so that future
revisions cannot be silently misread.  Round trips are exact; stabilizer
phases serialize as integers and the global scalar as its cyclotomic
coefficient vector.
"""

from __future__ import annotations

import json
from typing import Any

from .diagram import Diagram, Edge, Phase, PortRef, Spider, boundary_port, spider_port
from .scalars import ExactScalar

SCHEMA_VERSION = "zxsimp-v1"


class ParseError(ValueError):
    def __init__(self, message: str, location: str = "$"):
        super().__init__(f"{message} (at {location})")
        self.location = location


class SchemaVersionError(ParseError):
    pass


def _phase_to_json(p: Phase) -> dict:
    if p.stab:
        return {"kind": "stab", "values": list(p.values)}
    return {"kind": "gen", "values": list(p.values)}


def _phase_from_json(obj: Any, d: int, loc: str) -> Phase:
    if not isinstance(obj, dict):
        raise ParseError("phase must be an object", loc)
    extra = set(obj) - {"kind", "values"}
    if extra:
        raise SchemaVersionError(f"unknown phase fields {sorted(extra)}", loc)
    kind = obj.get("kind")
    vals = obj.get("values")
    if kind not in ("stab", "gen") or not isinstance(vals, list):
        raise ParseError("phase needs kind stab|gen and values list", loc)
    try:
        return Phase(d, kind == "stab", tuple(vals))
    except Exception as exc:
        raise ParseError(f"bad phase: {exc}", loc) from exc


def _port_to_json(p: PortRef) -> list:
    if p.kind == "s":
        return [p.owner, p.index, p.side]
    return ["boundary", p.side, p.owner]


def _port_from_json(obj: Any, loc: str) -> PortRef:
    if not isinstance(obj, list) or len(obj) != 3:
        raise ParseError("port must be a 3-element list", loc)
    if obj[0] == "boundary":
        side, pos = obj[1], obj[2]
        if side not in ("in", "out") or not isinstance(pos, int):
            raise ParseError("bad boundary port", loc)
        return boundary_port(side, pos)
    sid, idx, side = obj
    if not isinstance(sid, int) or not isinstance(idx, int) or side not in ("in", "out"):
        raise ParseError("bad spider port", loc)
    return spider_port(sid, side, idx)


def diagram_to_json(diagram: Diagram) -> dict:
    spiders = [{"id": s.id, "colour": s.colour, "phase": _phase_to_json(s.phase),
                "in": s.n_in, "out": s.n_out} for s in diagram.spiders]
    edges = [{"a": _port_to_json(e.a), "b": _port_to_json(e.b), "h": e.h}
             for e in sorted(diagram.edges, key=lambda e: (tuple(e.a), tuple(e.b)))]
    return {
        "version": SCHEMA_VERSION,
        "d": diagram.d,
        "spiders": spiders,
        "edges": edges,
        "inputs": list(range(diagram.n_inputs)),
        "outputs": list(range(diagram.n_outputs)),
        "scalar": diagram.scalar.to_json(),
    }


def diagram_from_json(obj: Any) -> Diagram:
    if not isinstance(obj, dict):
        raise ParseError("top level must be an object")
    extra = set(obj) - {"version", "d", "spiders", "edges", "inputs", "outputs", "scalar"}
    if extra:
        raise SchemaVersionError(f"unknown fields {sorted(extra)}")
    if obj.get("version") != SCHEMA_VERSION:
        raise SchemaVersionError(f"expected version {SCHEMA_VERSION!r}, got {obj.get('version')!r}")
    d = obj.get("d")
    if d not in (2, 3):
        raise ParseError("d must be 2 or 3", "$.d")
    spiders = []
    for i, s in enumerate(obj.get("spiders", [])):
        loc = f"$.spiders[{i}]"
        if not isinstance(s, dict):
            raise ParseError("spider must be an object", loc)
        extra = set(s) - {"id", "colour", "phase", "in", "out"}
        if extra:
            raise SchemaVersionError(f"unknown spider fields {sorted(extra)}", loc)
        try:
            spiders.append(Spider(s["id"], s["colour"],
                                  _phase_from_json(s["phase"], d, loc + ".phase"),
                                  s["in"], s["out"]))
        except KeyError as exc:
            raise ParseError(f"missing spider field {exc}", loc) from exc
    edges = []
    for i, e in enumerate(obj.get("edges", [])):
        loc = f"$.edges[{i}]"
        if not isinstance(e, dict):
            raise ParseError("edge must be an object", loc)
        extra = set(e) - {"a", "b", "h"}
        if extra:
            raise SchemaVersionError(f"unknown edge fields {sorted(extra)}", loc)
        edges.append(Edge(_port_from_json(e.get("a"), loc + ".a"),
                          _port_from_json(e.get("b"), loc + ".b"),
                          e.get("h", 0)))
    scalar = ExactScalar.from_json(obj["scalar"]) if "scalar" in obj else ExactScalar.one()
    diag = Diagram(d, tuple(spiders), frozenset(edges),
                   len(obj.get("inputs", [])), len(obj.get("outputs", [])), scalar)
    problems = diag.violations()
    if problems:
        raise ParseError("invalid diagram: " + "; ".join(problems))
    return diag


def dumps(diagram: Diagram) -> str:
    return json.dumps(diagram_to_json(diagram), sort_keys=True)


def loads(text: str) -> Diagram:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"malformed JSON: {exc.msg}", f"line {exc.lineno} col {exc.colno}") from exc
    return diagram_from_json(obj)
