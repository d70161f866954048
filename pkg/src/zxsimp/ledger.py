"""Empirical calibration of rewrite-rule scalar factors.

Rule scalars are never taken from closed-form theory: each factor is measured
as contract_closed(before) / contract_closed(after-without-scalar-update) on
minimal witness diagrams, snapped to the exact monomial lattice
zeta^k 2^(a/2) 3^(b/2), and cached in a checked-in table that runtime
rewriting looks up.

Elimination cores are swept over neighbour counts k = 0..5 and fitted to the
model  total(k) = core * (edge-norm bookkeeping of the instance), where the
bookkeeping exponent is affine in k on the witness families (plus the
complement-toggle term for qubit rules); the fit must extrapolate exactly to
the k = 6 and 7 witnesses or calibration fails loudly.
"""

from __future__ import annotations

import hashlib
import json
import random
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .diagram import Builder, Diagram, Phase
from .graphlike import GraphLike, graph_like_from_data
from .oracle import contract_closed
from .scalars import ExactScalar, snap_to_lattice


class CalibrationError(RuntimeError):
    pass


class ZeroWitnessError(CalibrationError):
    pass


class NoExactSnapError(CalibrationError):
    pass


@dataclass(frozen=True)
class RuleFactor:
    rule: str
    params: str
    factor: ExactScalar


def _snap_ratio(lhs: complex, rhs: complex, what: str) -> ExactScalar:
    scale = max(abs(lhs), abs(rhs), 1.0)
    if abs(rhs) < 1e-6 * scale or abs(lhs) < 1e-6 * scale:
        raise ZeroWitnessError(f"witness for {what} contracts to zero")
    snapped = snap_to_lattice(lhs / rhs)
    if snapped is None or snapped.is_zero:
        raise NoExactSnapError(f"ratio {lhs / rhs} for {what} is off the exact lattice")
    return snapped


def _measure(lhs: Diagram, rhs: Diagram, what: str, cap: int = 16) -> ExactScalar:
    return _snap_ratio(contract_closed(lhs, cap=cap), contract_closed(rhs, cap=cap), what)


# Deterministic pool of neighbour phases tried until a witness is nonzero.
_D3_PHASE_POOL = [(0, 0), (1, 1), (0, 1), (2, 2), (1, 0), (0, 2), (2, 0), (1, 2)]
_D2_PHASE_POOL = [0, 1, 3, 2]


# ---------------------------------------------------------------------------
# Edge-norm and conversion-step factors


def _self_loop_witness_d3(w: int) -> tuple[Diagram, Diagram]:
    b = Builder(3)
    s = b.spider("Z", Phase.qutrit(0, 0), n_out=2)
    b.wire(b.out(s, 0), b.out(s, 1), h=w)
    lhs = b.build()
    b = Builder(3)
    b.spider("Z", Phase.qutrit(w, w))
    return lhs, b.build()


def calibrate_edge_norm_d3(w: int) -> RuleFactor:
    lhs, rhs = _self_loop_witness_d3(w)
    return RuleFactor("d3.edge_norm", f"w={w}", _measure(lhs, rhs, f"d3 edge norm w={w}"))


def calibrate_edge_norm_d2() -> RuleFactor:
    b = Builder(2)
    s = b.spider("Z", Phase.qubit(1), n_out=2)
    b.wire(b.out(s, 0), b.out(s, 1), h=1)
    lhs = b.build()
    b = Builder(2)
    b.spider("Z", Phase.qubit(3))
    return RuleFactor("d2.edge_norm", "w=1", _measure(lhs, b.build(), "d2 edge norm"))


def calibrate_cc_unit_d2() -> RuleFactor:
    b = Builder(2)
    x = b.spider("X", Phase.qubit(0), n_out=1)
    e = b.spider("Z", Phase.qubit(0), n_in=1)
    b.wire(b.out(x, 0), b.inp(e, 0))
    lhs = b.build()
    b = Builder(2)
    z = b.spider("Z", Phase.qubit(0), n_out=1)
    e = b.spider("Z", Phase.qubit(0), n_in=1)
    b.wire(b.out(z, 0), b.inp(e, 0), h=1)
    return RuleFactor("d2.cc_unit", "", _measure(lhs, b.build(), "d2 colour change unit"))


def calibrate_box_square_d2() -> RuleFactor:
    # a self-loop through two boxes against the bare spider
    b = Builder(2)
    s = b.spider("Z", Phase.qubit(1), n_out=2)
    f = b.spider("Z", Phase.qubit(0), n_in=1, n_out=1)
    b.wire(b.out(s, 0), b.inp(f, 0), h=1)
    b.wire(b.out(f, 0), b.out(s, 1), h=1)
    lhs = b.build()
    b = Builder(2)
    b.spider("Z", Phase.qubit(1))
    return RuleFactor("d2.box_square", "", _measure(lhs, b.build(), "d2 box square"))


def calibrate_cc_unit_d3() -> RuleFactor:
    # X-state against its recoloured form: one extra output leg, so the
    # measured ratio is the per-leg unit of the colour change law.
    b = Builder(3)
    x = b.spider("X", Phase.qutrit(0, 0), n_out=1)
    e = b.spider("Z", Phase.qutrit(0, 0), n_in=1)
    b.wire(b.out(x, 0), b.inp(e, 0))
    lhs = b.build()
    b = Builder(3)
    z = b.spider("Z", Phase.qutrit(0, 0), n_out=1)
    e = b.spider("Z", Phase.qutrit(0, 0), n_in=1)
    b.wire(b.out(z, 0), b.inp(e, 0), h=1)
    return RuleFactor("d3.cc_unit", "", _measure(lhs, b.build(), "d3 colour change unit"))


def _collapse_pair_diagram(extra_loop_t: int | None = None,
                           with_leg: bool = False) -> Diagram:
    """Node with a net double-Hadamard self-loop, optionally extra loop or leg."""
    b = Builder(3)
    extra = 2 if with_leg else 0
    loop_ports = 2 + (2 if extra_loop_t is not None else 0)
    n_in = 1 if extra_loop_t == 0 else 0
    s = b.spider("Z", Phase.qutrit(0, 0), n_in=n_in,
                 n_out=loop_ports - n_in + (1 if with_leg else 0))
    f = b.spider("Z", Phase.qutrit(0, 0), n_in=1, n_out=1)
    b.wire(b.out(s, 0), b.inp(f, 0), h=1)
    b.wire(b.out(f, 0), b.out(s, 1), h=1)
    nxt = 2
    if extra_loop_t is not None:
        if extra_loop_t == 0:
            b.wire(b.out(s, nxt), b.inp(s, 0), h=0)
            nxt += 1
        elif extra_loop_t == 2:
            f2 = b.spider("Z", Phase.qutrit(0, 0), n_in=1, n_out=1)
            b.wire(b.out(s, nxt), b.inp(f2, 0), h=1)
            b.wire(b.out(f2, 0), b.out(s, nxt + 1), h=1)
            nxt += 2
        else:
            b.wire(b.out(s, nxt), b.out(s, nxt + 1), h={1: 1, 3: 2}[extra_loop_t])
            nxt += 2
    if with_leg:
        y = b.spider("Z", Phase.qutrit(0, 0), n_out=1)
        b.wire(b.out(s, nxt), b.out(y, 0), h=1)
    return b.build()


def calibrate_collapse() -> list[RuleFactor]:
    out = []
    empty = Builder(3).build()
    base = _measure(_collapse_pair_diagram(), empty, "collapse base")
    out.append(RuleFactor("d3.collapse", "base", base))
    # leg factor: collapsed leg becomes a fresh node with one extra Hadamard
    b = Builder(3)
    f = b.spider("Z", Phase.qutrit(0, 0), n_out=1)
    g_ = b.spider("Z", Phase.qutrit(0, 0), n_in=1, n_out=1)
    y = b.spider("Z", Phase.qutrit(0, 0), n_in=1)
    b.wire(b.out(f, 0), b.inp(g_, 0), h=1)
    b.wire(b.out(g_, 0), b.inp(y, 0), h=1)
    rhs = b.build()
    leg_total = _measure(_collapse_pair_diagram(with_leg=True), rhs, "collapse leg")
    out.append(RuleFactor("d3.collapse", "leg", leg_total * base.inverse_monomial()))
    for t in (0, 1, 2, 3):
        ratio = _measure(_collapse_pair_diagram(extra_loop_t=t), empty, f"collapse loop t={t}")
        out.append(RuleFactor("d3.collapse", f"loop_t={t}", ratio * base.inverse_monomial()))
    return out


# ---------------------------------------------------------------------------
# Elimination cores with neighbour-count sweeps


def _stable_rng(*key) -> random.Random:
    digest = hashlib.sha256(repr(key).encode()).digest()
    return random.Random(int.from_bytes(digest[:8], "big"))


def _phases_pool(d: int):
    if d == 3:
        return [Phase.qutrit(*p) for p in _D3_PHASE_POOL]
    return [Phase.qubit(k) for k in _D2_PHASE_POOL]


def _quad_witness(c1: int, c2: int, k: int, variant: int) -> GraphLike:
    rng = _stable_rng(("quad", c1, c2, k, variant))
    pool = _phases_pool(3)
    phases = {0: Phase.qutrit((c1 + c2) % 3, (2 * c1 + c2) % 3)}
    weights = {}
    for i in range(1, k + 1):
        phases[i] = rng.choice(pool)
        weights[(0, i)] = rng.choice((1, 2))
        for j in range(1, i):
            wt = rng.choice((0, 1, 2))
            if wt:
                weights[(j, i)] = wt
    return graph_like_from_data(3, phases, weights)


def _mpair_witness(w: int, mi: int, mj: int, k: int, variant: int) -> GraphLike:
    rng = _stable_rng(("mpair", w, mi, mj, k, variant))
    pool = _phases_pool(3)
    phases = {0: Phase.qutrit(mi % 3, (2 * mi) % 3),
              1: Phase.qutrit(mj % 3, (2 * mj) % 3)}
    weights = {(0, 1): w}
    for i in range(2, k + 2):
        phases[i] = rng.choice(pool)
        weights[(0, i)] = rng.choice((1, 2))
        weights[(1, i)] = rng.choice((1, 2))
        for j in range(2, i):
            wt = rng.choice((0, 1, 2))
            if wt:
                weights[(j, i)] = wt
    return graph_like_from_data(3, phases, weights)


def _clifford_witness(kphase: int, k: int, variant: int) -> GraphLike:
    rng = _stable_rng(("cliff", kphase, k, variant))
    pool = _phases_pool(2)
    phases = {0: Phase.qubit(kphase)}
    weights = {}
    for i in range(1, k + 1):
        phases[i] = rng.choice(pool)
        weights[(0, i)] = 1
        for j in range(1, i):
            if rng.random() < 0.5:
                weights[(j, i)] = 1
    return graph_like_from_data(2, phases, weights)


def _pauli_witness(ju: int, jv: int, k: int, variant: int) -> GraphLike:
    rng = _stable_rng(("pauli", ju, jv, k, variant))
    pool = _phases_pool(2)
    phases = {0: Phase.qubit(2 * ju), 1: Phase.qubit(2 * jv)}
    weights = {(0, 1): 1}
    for i in range(2, k + 2):
        phases[i] = rng.choice(pool)
        weights[(0, i)] = 1
        if rng.random() < 0.7:
            weights[(1, i)] = 1
        for j in range(2, i):
            if rng.random() < 0.4:
                weights[(j, i)] = 1
    return graph_like_from_data(2, phases, weights)


def _dry_apply(g: GraphLike, rule: str, nodes: tuple[int, ...]):
    """Graph transform with the scalar left untouched; returns (result, tallies).

    Tallies hold the edge-norm bookkeeping the engine would apply: counts of
    removed edges by weight and of pair-weight transitions.
    """
    out = g.copy()
    removed: dict[int, int] = {}
    trans: dict[tuple[int, int], int] = {}
    W = out.weights

    def log_removed(vec):
        for w in (1, 2):
            c = int(np.count_nonzero(vec == w))
            if c:
                removed[w] = removed.get(w, 0) + c

    if rule in ("quad", "clifford"):
        xs = out.slot(nodes[0])
        vec = W[xs].copy()
        vec[xs] = 0
        log_removed(vec)
    else:
        si, sj = out.slot(nodes[0]), out.slot(nodes[1])
        vec_i, vec_j = W[si].copy(), W[sj].copy()
        vec_i[[si, sj]] = 0
        vec_j[[si, sj]] = 0
        log_removed(vec_i)
        log_removed(vec_j)
        removed[int(W[si, sj])] = removed.get(int(W[si, sj]), 0) + 1
    before = W.copy()
    if g.d == 3:
        from .qutrit import _Engine
        eng = _Engine(out, dry=True)
        if rule == "quad":
            eng.eliminate_quad(nodes[0], "calibration")
        else:
            eng.eliminate_m_pair(*nodes)
    else:
        from .qubit import _Engine
        eng = _Engine(out, dry=True)
        if rule == "clifford":
            eng.eliminate_clifford(nodes[0])
        else:
            eng.eliminate_pauli_pair(*nodes)
    keep_ids = out.ids
    sl_before = {v: i for i, v in enumerate(g.ids)}
    for a in range(len(keep_ids)):
        for b in range(a + 1, len(keep_ids)):
            o = int(before[sl_before[keep_ids[a]], sl_before[keep_ids[b]]])
            n = int(out.weights[a, b])
            if o != n:
                trans[(o, n)] = trans.get((o, n), 0) + 1
    return out, removed, trans


def _edge_census(g: GraphLike) -> dict[int, int]:
    import numpy as np

    out: dict[int, int] = {}
    tri = np.triu(g.weights)
    for wt in (1, 2):
        cnt = int(np.count_nonzero(tri == wt))
        if cnt:
            out[wt] = cnt
    return out


def _norm_model(removed: dict[int, int], trans: dict[tuple[int, int], int],
                table: dict[str, ExactScalar]) -> ExactScalar:
    def norm(w: int) -> ExactScalar:
        return table[f"w={w}"] if w else ExactScalar.one()

    f = ExactScalar.one()
    for w, c in removed.items():
        f = f * norm(w) ** c
    for (o, n), c in trans.items():
        step = norm(o) * (norm(n).inverse_monomial() if n else ExactScalar.one())
        f = f * step ** c
    return f


def _sweep_core(rule_name: str, key: str, make_witness, apply_rule,
                norm_table: dict[str, ExactScalar],
                ks=range(0, 8), fit_upto: int = 5) -> RuleFactor:
    """Measure total factors over neighbour counts, divide off the edge-norm
    model, require one constant monomial core, and check extrapolation."""
    core = None
    for k in ks:
        measured = None
        for variant in range(10):
            g = make_witness(k, variant)
            lhs = g.to_diagram()
            out, removed, trans = apply_rule(g)
            rhs = out.to_diagram()
            model = _norm_model(removed, trans, norm_table)
            mc = model.to_complex()
            lv = contract_closed(lhs, cap=60)
            rv = contract_closed(rhs, cap=60)
            # a nonzero graph-like value has magnitude at least the product of
            # its edge norms (the residual lattice sum is at least 1);
            # anything below that is a vanishing witness, not a small one
            floor_l = 1.0
            for wt, cnt in _edge_census(g).items():
                floor_l *= abs(norm_table[f"w={wt}"].to_complex()) ** cnt
            floor_r = floor_l / abs(mc)
            if abs(lv) < 0.5 * floor_l or abs(rv) < 0.5 * floor_r:
                continue
            cand = snap_to_lattice(lv / (rv * mc))
            if cand is None or cand.is_zero:
                raise NoExactSnapError(
                    f"core ratio {lv / (rv * mc)} for {rule_name}[{key}] k={k} off lattice")
            measured = cand
            break
        if measured is None:
            raise ZeroWitnessError(f"all witness pluggings vanish for {rule_name}[{key}] k={k}")
        if core is None:
            core = measured
            if core.is_monomial() is None:
                raise NoExactSnapError(f"core for {rule_name}[{key}] is not a lattice monomial")
        elif measured != core:
            stage = "fit" if k <= fit_upto else "extrapolation"
            raise CalibrationError(
                f"{stage} failure for {rule_name}[{key}] at k={k}: {measured} != {core}")
    return RuleFactor(rule_name, key, core)


def calibrate_rule_factor(rule: str, params) -> RuleFactor:
    """Calibrate one rule factor from oracle witnesses (see module docstring)."""
    norm3 = {f"w={w}": calibrate_edge_norm_d3(w).factor for w in (1, 2)}
    norm2 = {"w=1": calibrate_edge_norm_d2().factor}
    if rule == "d3.edge_norm":
        return calibrate_edge_norm_d3(params["w"])
    if rule == "d2.edge_norm":
        return calibrate_edge_norm_d2()
    if rule == "d3.quad_core":
        c1, c2 = params["c1"], params["c2"]
        return _sweep_core(rule, f"c2={c2},c1={c1}",
                           lambda k, v: _quad_witness(c1, c2, k, v),
                           lambda g: _dry_apply(g, "quad", (0,)), norm3)
    if rule == "d3.mpair_core":
        w, mi, mj = params["w"], params["mi"], params["mj"]
        return _sweep_core(rule, f"w={w},mm={(mi * mj) % 3}",
                           lambda k, v: _mpair_witness(w, mi, mj, k, v),
                           lambda g: _dry_apply(g, "mpair", (0, 1)), norm3)
    if rule == "d2.clifford_core":
        kphase = params["k"]
        return _sweep_core(rule, f"k={kphase}",
                           lambda k, v: _clifford_witness(kphase, k, v),
                           lambda g: _dry_apply(g, "clifford", (0,)), norm2)
    if rule == "d2.pauli_core":
        ju, jv = params["ju"], params["jv"]
        return _sweep_core(rule, f"jj={ju * jv}",
                           lambda k, v: _pauli_witness(ju, jv, k, v),
                           lambda g: _dry_apply(g, "pauli", (0, 1)), norm2)
    if rule == "d3.cc_unit":
        return calibrate_cc_unit_d3()
    if rule == "pm_box":
        from .potts import calibrate_pm_box
        return calibrate_pm_box(params["d"], params["sign"])
    if rule == "x_box":
        from .colouring import calibrate_x_box
        return calibrate_x_box()
    if rule == "euler":
        return calibrate_euler(params["d"])
    raise CalibrationError(f"unknown rule {rule!r}")


def calibrate_euler(d: int) -> RuleFactor:
    """Ratio of the Hadamard box to its three-phase-gate decomposition."""
    if d == 2:
        b = Builder(2)
        st = b.spider("X", Phase.qubit(0), n_out=1)
        h_in = b.spider("Z", Phase.qubit(0), n_in=1, n_out=1)
        eff = b.spider("Z", Phase.qubit(1), n_in=1)
        b.wire(b.out(st, 0), b.inp(h_in, 0), h=1)
        b.wire(b.out(h_in, 0), b.inp(eff, 0))
        lhs = b.build()
        b = Builder(2)
        st = b.spider("X", Phase.qubit(0), n_out=1)
        z1 = b.spider("Z", Phase.qubit(1), n_in=1, n_out=1)
        x1 = b.spider("X", Phase.qubit(1), n_in=1, n_out=1)
        z2 = b.spider("Z", Phase.qubit(1), n_in=1, n_out=1)
        eff = b.spider("Z", Phase.qubit(1), n_in=1)
        b.wire(b.out(st, 0), b.inp(z1, 0))
        b.wire(b.out(z1, 0), b.inp(x1, 0))
        b.wire(b.out(x1, 0), b.inp(z2, 0))
        b.wire(b.out(z2, 0), b.inp(eff, 0))
        return RuleFactor("euler", "d=2", _measure(lhs, b.build(), "qubit euler"))
    b = Builder(3)
    st = b.spider("X", Phase.qutrit(0, 0), n_out=1)
    mid = b.spider("Z", Phase.qutrit(0, 0), n_in=1, n_out=1)
    eff = b.spider("Z", Phase.qutrit(1, 0), n_in=1)
    b.wire(b.out(st, 0), b.inp(mid, 0), h=1)
    b.wire(b.out(mid, 0), b.inp(eff, 0))
    lhs = b.build()
    b = Builder(3)
    st = b.spider("X", Phase.qutrit(0, 0), n_out=1)
    z1 = b.spider("Z", Phase.qutrit(2, 2), n_in=1, n_out=1)
    x1 = b.spider("X", Phase.qutrit(2, 2), n_in=1, n_out=1)
    z2 = b.spider("Z", Phase.qutrit(2, 2), n_in=1, n_out=1)
    eff = b.spider("Z", Phase.qutrit(1, 0), n_in=1)
    b.wire(b.out(st, 0), b.inp(z1, 0))
    b.wire(b.out(z1, 0), b.inp(x1, 0))
    b.wire(b.out(x1, 0), b.inp(z2, 0))
    b.wire(b.out(z2, 0), b.inp(eff, 0))
    return RuleFactor("euler", "d=3", _measure(lhs, b.build(), "qutrit euler"))


# ---------------------------------------------------------------------------
# Table assembly


def build_table() -> dict:
    """Run the full calibration suite; returns the JSON-ready table."""
    entries: list[RuleFactor] = []
    entries.append(calibrate_edge_norm_d2())
    for w in (1, 2):
        entries.append(calibrate_edge_norm_d3(w))
    entries.append(calibrate_cc_unit_d2())
    entries.append(calibrate_box_square_d2())
    entries.append(calibrate_cc_unit_d3())
    entries.extend(calibrate_collapse())
    for c2 in (1, 2):
        for c1 in (0, 1, 2):
            entries.append(calibrate_rule_factor("d3.quad_core", {"c1": c1, "c2": c2}))
    for w in (1, 2):
        for mm_rep in ((0, 0), (1, 1), (1, 2)):
            entries.append(calibrate_rule_factor(
                "d3.mpair_core", {"w": w, "mi": mm_rep[0], "mj": mm_rep[1]}))
    for k in (1, 3):
        entries.append(calibrate_rule_factor("d2.clifford_core", {"k": k}))
    for ju, jv in ((0, 0), (1, 1)):
        entries.append(calibrate_rule_factor("d2.pauli_core", {"ju": ju, "jv": jv}))
    for d in (2, 3):
        entries.append(calibrate_euler(d))
    from .colouring import calibrate_x_box
    from .potts import calibrate_pm_box
    for d in (2, 3, 4):
        for sign in ("+", "-"):
            entries.append(calibrate_pm_box(d, sign))
    entries.append(calibrate_x_box())
    table: dict[str, dict[str, dict]] = {}
    for rf in entries:
        table.setdefault(rf.rule, {})[rf.params] = rf.factor.to_json()
    return {"rules": table}


def write_table(path: str | Path | None = None) -> Path:
    if path is None:
        path = Path(__file__).parent / "data" / "calibration.json"
    path = Path(path)
    path.write_text(json.dumps(build_table(), indent=1, sort_keys=True) + "\n")
    from . import factors
    factors.clear_cache()
    return path
