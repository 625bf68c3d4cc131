"""Rewrite-system synthesis by redex-eliminating enumeration.

A run of size (M, N, P, Q) enumerates the wire-reduced string graphs
with M inputs and N outputs buildable from up to Q generator instances
and up to P pluggings, skipping every graph reducible by the current
reduction set.  Saved graphs are evaluated against the model, classed
up to scalar and boundary permutation, and each class mints reductions
pointing at its measure-least representative.  Re-running with larger
sizes grows the system while the guard keeps enumeration small.
"""
from __future__ import annotations

import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterator, Optional

from .errors import DimensionOverflow, ValidationError
from .graph import StringGraph, disjoint_union, normalize_wires, plug_with_vertex
from .iso import canonical_form, similar_pluggings
from .rewrite import (
    CONGRUENCE,
    REDUCTION,
    RewriteRule,
    RewriteSystem,
    is_redex,
    is_redex_local,
    make_rule,
)
from .signature import Signature, Valuation, generator_graph, identity_generator
from .tensor import Tensor, class_scalar_permutation, equiv_key, evaluate

log = logging.getLogger(__name__)

REDEX_ELIMINATING = "redex-eliminating"
NAIVE = "naive"

MeasureValue = tuple[int, int, int, bytes]


def reduction_measure(g: StringGraph) -> MeasureValue:
    """Strict, isomorphism-invariant well-founded measure on reduced graphs.

    Lexicographic (node-vertices, wire-vertices, edges, canonical form):
    isomorphic graphs agree, non-isomorphic reduced graphs always differ.
    """
    return (len(g.node_vertices), len(g.wire_vertices), len(g.edges),
            canonical_form(g))


def validate_system_measure(system: RewriteSystem) -> None:
    """Reductions must strictly decrease the measure, congruences tie."""
    for r in system.rules:
        ml, mr = reduction_measure(r.lhs), reduction_measure(r.rhs)
        if r.role == REDUCTION and not ml > mr:
            raise ValidationError(
                f"reduction {r.name or '?'} does not decrease the measure")
        if r.role == CONGRUENCE and ml == mr and canonical_form(r.lhs) == canonical_form(r.rhs):
            raise ValidationError(
                f"congruence {r.name or '?'} relates isomorphic graphs")


@dataclass(frozen=True)
class SynthesisParams:
    n_inputs: int
    n_outputs: int
    max_pluggings: int
    max_nodes: int

    def __post_init__(self):
        if min(self.n_inputs, self.n_outputs,
               self.max_pluggings, self.max_nodes) < 0:
            raise ValidationError("synthesis parameters must be non-negative")

    def as_tuple(self) -> tuple[int, int, int, int]:
        return (self.n_inputs, self.n_outputs, self.max_pluggings, self.max_nodes)


@dataclass
class RunReport:
    params: SynthesisParams
    enumerated: int = 0
    classes: int = 0
    reductions: int = 0
    congruences: int = 0
    overflowed: int = 0
    naive_enumerated: Optional[int] = None
    naive_reductions: Optional[int] = None
    naive_congruences: Optional[int] = None
    wall_time: float = 0.0

    @property
    def naive_rules(self) -> Optional[int]:
        if self.naive_reductions is None:
            return None
        return self.naive_reductions + (self.naive_congruences or 0)


@dataclass
class SynthesisResult:
    system: RewriteSystem
    reports: list[RunReport]
    saved_by_run: list[list[StringGraph]]
    snapshots: list[RewriteSystem]
    provenance: dict[str, int]  # rule name -> run index
    naive_system: Optional[RewriteSystem] = None


# -- base graphs -----------------------------------------------------------


def _palette(sig: Signature) -> list[tuple[StringGraph, int, int, int]]:
    """(component graph, inputs, outputs, nodes): one identity wire per
    object type, then every generator, all wire-reduced."""
    out = [(normalize_wires(identity_generator(sig, o.name)), 1, 1, 0)
           for o in sorted(sig.objects, key=lambda o: o.name)]
    for m in sorted(sig.morphisms, key=lambda m: m.name):
        out.append((generator_graph(sig, m.name), len(m.dom), len(m.cod), 1))
    return out


def base_graphs(sig: Signature, n_inputs: int, n_outputs: int,
                max_nodes: int) -> Iterator[StringGraph]:
    """All disconnected unions of generators (one per multiset, reduced)
    with the given boundary arities and at most max_nodes node-vertices."""
    palette = _palette(sig)

    def rec(i: int, m: int, n: int, q: int, counts: list[int]):
        if i == len(palette):
            if m == 0 and n == 0:
                yield list(counts)
            return
        _, gi, go, gq = palette[i]
        top = None
        if gi:
            top = m // gi
        if go:
            t2 = n // go
            top = t2 if top is None else min(top, t2)
        if gq:
            t3 = q // gq
            top = t3 if top is None else min(top, t3)
        if top is None:  # scalar generator with no boundary: bounded by nodes
            top = q
        for c in range(top + 1):
            counts.append(c)
            yield from rec(i + 1, m - c * gi, n - c * go, q - c * gq, counts)
            counts.pop()

    for counts in rec(0, n_inputs, n_outputs, max_nodes, []):
        g = StringGraph.empty(sig)
        for (component, *_), c in zip(palette, counts):
            for _ in range(c):
                g = disjoint_union(g, component)
        yield g


def _compatible_pairs(g: StringGraph) -> list[tuple[int, int]]:
    return sorted((x, y) for x in g.inputs for y in g.outputs
                  if g.vertex_type(x) == g.vertex_type(y))


# -- ENUM ------------------------------------------------------------------


def _enum_from_base(system: RewriteSystem, base: StringGraph, pluggings: int,
                    mode: str, saved: list[StringGraph]) -> None:
    """Explore do/don't-plug branches; save at zero pluggings left."""

    def rec(pi: list[tuple[int, int]], g: StringGraph, p: int) -> None:
        if p == 0:
            saved.append(g)
            return
        if not pi:
            return
        x, y = pi[0]
        plugged, merged = plug_with_vertex(g, x, y)
        if mode == NAIVE or not is_redex_local(system, plugged, merged):
            rest = [(a, b) for (a, b) in pi
                    if a not in (x, y) and b not in (x, y)]
            rec(rest, plugged, p - 1)
        similar = similar_pluggings(g, x, y)
        rec([pb for pb in pi if pb not in similar], g, p)

    rec(_compatible_pairs(base), base, pluggings)


def _bases_for(sig: Signature, params: SynthesisParams):
    """(base graph, pluggings) tasks for one run, in deterministic order."""
    tasks = []
    for p in range(params.max_pluggings + 1):
        for base in base_graphs(sig, params.n_inputs + p, params.n_outputs + p,
                                params.max_nodes):
            tasks.append((base, p))
    return tasks


def _enum_task(args):
    system, tasks, mode = args
    saved: list[StringGraph] = []
    for base, p in tasks:
        if mode == REDEX_ELIMINATING and is_redex(system, base):
            continue  # every descendant of a redex base stays a redex
        _enum_from_base(system, base, p, mode, saved)
    return saved


def enum_irreducible(system: RewriteSystem, sig: Signature,
                     params: SynthesisParams,
                     mode: str = REDEX_ELIMINATING,
                     workers: int = 1) -> list[StringGraph]:
    """All irreducible reduced graphs of the given size, one per
    isomorphism class; naive mode skips only the redex guard."""
    if mode not in (REDEX_ELIMINATING, NAIVE):
        raise ValidationError(f"unknown enumeration mode {mode!r}")
    tasks = _bases_for(sig, params)
    if workers <= 1 or len(tasks) < 2 * workers:
        produced = [_enum_task((system, tasks, mode))]
    else:
        chunk = max(1, len(tasks) // (workers * 4))
        batches = [tasks[i:i + chunk] for i in range(0, len(tasks), chunk)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            produced = list(pool.map(
                _enum_task, [(system, b, mode) for b in batches]))
    out: list[StringGraph] = []
    seen: set[bytes] = set()
    for saves in produced:
        for g in saves:
            assert len(g.inputs) == params.n_inputs
            assert len(g.outputs) == params.n_outputs
            cf = canonical_form(g)
            if cf not in seen:
                seen.add(cf)
                out.append(g)
    return out


# -- classing and minting ----------------------------------------------------


def group_classes(graphs: list[StringGraph], val: Valuation,
                  tol: float = 1e-9) -> tuple[list[tuple[bytes, list[tuple[StringGraph, Tensor]]]], int]:
    """Group by tensor class key; returns (classes, overflow count)."""
    classes: dict[bytes, list[tuple[StringGraph, Tensor]]] = {}
    overflowed = 0
    for g in graphs:
        try:
            t = evaluate(g, val)
        except DimensionOverflow as exc:
            overflowed += 1
            log.warning("skipping graph over index cap: %s", exc)
            continue
        classes.setdefault(equiv_key(t, tol), []).append((g, t))
    return sorted(classes.items(), key=lambda kv: kv[0]), overflowed


def mint_rules(classes, tol: float = 1e-9, name_start: int = 0,
               name_prefix: str = "r"):
    """Mint reductions to each class's measure-least member and
    congruences among tied minima (none when the measure is strict)."""
    reductions: list[RewriteRule] = []
    congruences: list[RewriteRule] = []
    counter = name_start

    def next_name() -> str:
        nonlocal counter
        counter += 1
        return f"{name_prefix}{counter:05d}"

    for _key, members in classes:
        uniq: dict[bytes, tuple[StringGraph, Tensor]] = {}
        for g, t in members:
            uniq.setdefault(canonical_form(g), (g, t))
        ranked = sorted(uniq.values(),
                        key=lambda gt: reduction_measure(gt[0]))
        if len(ranked) < 2:
            continue
        g0, t0 = ranked[0]
        m0 = reduction_measure(g0)
        for g, t in ranked[1:]:
            found = class_scalar_permutation(t, t0, tol)
            if found is None:
                raise ValidationError(
                    "classed tensors fail the scalar/permutation match")
            lam, sigma, tau = found
            in_map = [(g.inputs[k], g0.inputs[sigma[k]])
                      for k in range(len(g.inputs))]
            out_map = [(g.outputs[j], g0.outputs[tau[j]])
                       for j in range(len(g.outputs))]
            if reduction_measure(g) > m0:
                reductions.append(make_rule(
                    g, g0, in_map, out_map, lam, REDUCTION, next_name()))
            else:  # a measure tie: mint congruences both ways
                lam2, sigma2, tau2 = class_scalar_permutation(t0, t, tol)
                congruences.append(make_rule(
                    g, g0, in_map, out_map, lam, CONGRUENCE, next_name()))
                congruences.append(make_rule(
                    g0, g,
                    [(g0.inputs[k], g.inputs[sigma2[k]]) for k in range(len(g0.inputs))],
                    [(g0.outputs[j], g.outputs[tau2[j]]) for j in range(len(g0.outputs))],
                    lam2, CONGRUENCE, next_name()))
    return reductions, congruences


def rule_identity(rule: RewriteRule) -> tuple:
    """Schedule-independent identity of a rule, up to vertex renaming."""
    from .iso import canonical_labeling

    ll = canonical_labeling(rule.lhs)
    rl = canonical_labeling(rule.rhs)
    return (canonical_form(rule.lhs), canonical_form(rule.rhs), rule.role,
            (round(rule.scalar.real, 9), round(rule.scalar.imag, 9)),
            tuple(sorted((ll[a], rl[b]) for a, b in rule.in_map)),
            tuple(sorted((ll[a], rl[b]) for a, b in rule.out_map)))


def check_generators_irreducible(system: RewriteSystem, sig: Signature) -> None:
    """The enumeration guard is only sound for irreducible generators."""
    gens = [generator_graph(sig, m.name) for m in sig.morphisms]
    gens += [normalize_wires(identity_generator(sig, o.name)) for o in sig.objects]
    for g in gens:
        if is_redex(system, g):
            raise ValidationError(
                "a generator became reducible; enumeration guard unsound")


def run_synthesis(schedule: list[SynthesisParams],
                  initial: RewriteSystem,
                  sig: Signature,
                  val: Valuation,
                  *,
                  compare: bool = False,
                  workers: int = 1,
                  tol: float = 1e-9) -> SynthesisResult:
    """Run the schedule, growing the system run by run.

    With compare=True a second, independent pipeline re-runs every size
    with the redex guard disabled, so rule counts with and without
    redex elimination can be compared.
    """
    validate_system_measure(initial)
    system = initial
    naive_system = initial if compare else None
    reports: list[RunReport] = []
    saved_by_run: list[list[StringGraph]] = []
    snapshots: list[RewriteSystem] = []
    provenance: dict[str, int] = {}
    seen_rules = {rule_identity(r) for r in initial.rules}
    seen_naive = set(seen_rules)

    def fresh(minted, seen: set) -> list[RewriteRule]:
        out = []
        for r in minted:
            key = rule_identity(r)
            if key not in seen:
                seen.add(key)
                out.append(r)
        return out

    for run_idx, params in enumerate(schedule):
        t0 = time.perf_counter()
        check_generators_irreducible(system, sig)
        snapshots.append(system)
        saved = enum_irreducible(system, sig, params,
                                 REDEX_ELIMINATING, workers)
        classes, overflowed = group_classes(saved, val, tol)
        minted_red, minted_cong = mint_rules(
            classes, tol, name_start=len(system.rules))
        reductions = fresh(minted_red, seen_rules)
        congruences = fresh(minted_cong, seen_rules)
        system = system.extended(reductions + congruences)
        for r in reductions + congruences:
            provenance[r.name] = run_idx
        report = RunReport(
            params=params,
            enumerated=len(saved),
            classes=len(classes),
            reductions=len(reductions),
            congruences=len(congruences),
            overflowed=overflowed,
        )
        if compare:
            assert naive_system is not None
            naive_saved = enum_irreducible(naive_system, sig, params,
                                           NAIVE, workers)
            naive_classes, _ = group_classes(naive_saved, val, tol)
            n_red, n_cong = mint_rules(
                naive_classes, tol, name_start=len(naive_system.rules),
                name_prefix="n")
            n_red = fresh(n_red, seen_naive)
            n_cong = fresh(n_cong, seen_naive)
            naive_system = naive_system.extended(n_red + n_cong)
            report.naive_enumerated = len(naive_saved)
            report.naive_reductions = len(n_red)
            report.naive_congruences = len(n_cong)
        report.wall_time = time.perf_counter() - t0
        reports.append(report)
        saved_by_run.append(saved)
        log.info("run %d %s: enumerated=%d classes=%d rules=%d",
                 run_idx, params.as_tuple(), report.enumerated,
                 report.classes, report.reductions + report.congruences)
    return SynthesisResult(
        system=system,
        reports=reports,
        saved_by_run=saved_by_run,
        snapshots=snapshots,
        provenance=provenance,
        naive_system=naive_system,
    )


def default_schedule(bound: int = 3) -> list[SynthesisParams]:
    """One run per boundary pair with inputs+outputs <= bound, ascending
    by total size then lexicographically; pluggings and node count both
    capped at the bound."""
    pairs = [(m, n) for m in range(bound + 1) for n in range(bound + 1)
             if m + n <= bound]
    pairs.sort(key=lambda mn: (mn[0] + mn[1], mn))
    return [SynthesisParams(m, n, bound, bound) for m, n in pairs]
