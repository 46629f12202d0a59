"""Choice and sequential composition of STSs, the master model, and pruning."""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

from .sts import Sts, Switch, free_vars, sink_locations
from .symbolic import DomainCache, Solver, empty_path, solve
from .values import SamplingPlan, decimal_paths

DEFAULT_DEPTH = 3


class CompositionError(ValueError):
    pass


class CompositionWarning(UserWarning):
    pass


def _check_compatible(stss: Sequence[Sts]):
    first = stss[0]
    seen: set = set()
    for s in stss:
        overlap = seen & set(s.locations)
        if overlap:
            raise CompositionError(f"location sets overlap: {sorted(overlap)}")
        seen |= set(s.locations)
        if (s.variables != first.variables or set(s.input_gates) != set(first.input_gates)
                or set(s.output_gates) != set(first.output_gates)
                or dict(s.interactions) != dict(first.interactions)):
            raise CompositionError(f"STS {s.name or s.initial!r} does not share the variables, gates "
                                   "and interactions of the others")


def _fresh(taken: set, stem: str = "c") -> str:
    i = 0
    while f"{stem}{i}" in taken:
        i += 1
    return f"{stem}{i}"


def _merge_annotations(stss):
    out: dict = {}
    for s in stss:
        out.update(s.annotations)
    return out


def choice(*stss: Sts, fresh: Optional[str] = None) -> Sts:
    """Offer the initial switches of every operand from one fresh initial location.

    With two operands this is the binary operator; more operands give the
    n-ary form with a single fresh location. Operand locations are kept,
    including their former initial locations.
    """
    if not stss:
        raise CompositionError("choice needs at least one STS")
    _check_compatible(stss)
    taken = {loc for s in stss for loc in s.locations}
    l0 = fresh or _fresh(taken)
    if l0 in taken:
        raise CompositionError(f"location {l0!r} is not fresh")
    switches = []
    for s in stss:
        for r in s.switches:
            switches.append(replace(r, source=l0) if r.source == s.initial else r)
    locations = (l0,) + tuple(loc for s in stss for loc in s.locations)
    return replace(stss[0], locations=locations, initial=l0, switches=tuple(switches),
                   annotations=_merge_annotations(stss), name="choice")


def sequential(s1: Sts, s2: Sts) -> Sts:
    """Glue every sink of ``s1`` to the initial switches of ``s2``."""
    _check_compatible([s1, s2])
    if any(r.target == s2.initial for r in s2.switches):
        raise CompositionError(f"initial location {s2.initial!r} of the second STS has incoming switches")
    sinks = sink_locations(s1)
    if not sinks:
        warnings.warn("first STS has no sink location; the second STS is unreachable",
                      CompositionWarning, stacklevel=2)
    initial_switches = [r for r in s2.switches if r.source == s2.initial]
    glued = []
    for sink in sinks:
        for r in initial_switches:
            glued.append(replace(r, id=f"{r.id}~{sink}", source=sink))
    rest = [r for r in s2.switches if r.source != s2.initial]
    locations = s1.locations + tuple(loc for loc in s2.locations if loc != s2.initial)
    return replace(s1, locations=locations, switches=s1.switches + tuple(glued) + tuple(rest),
                   annotations=_merge_annotations([s1, s2]), name="sequential")


def rename(sts: Sts, suffix: str) -> Sts:
    """Copy of ``sts`` with every location and switch id suffixed."""
    def loc(name):
        return f"{name}{suffix}"

    switches = tuple(replace(r, id=f"{r.id}{suffix}", source=loc(r.source), target=loc(r.target))
                     for r in sts.switches)
    return replace(sts, locations=tuple(loc(x) for x in sts.locations), initial=loc(sts.initial),
                   switches=switches)


def relabel(sts: Sts) -> Sts:
    """Rename locations to l0, l1, ... in breadth-first order and switches to r_i_j.

    Unreachable locations are numbered after the reachable ones, in their
    existing order. Switches are listed by (source, target) number.
    """
    order = sts.reachable()
    order += [loc for loc in sts.locations if loc not in set(order)]
    index = {loc: i for i, loc in enumerate(order)}
    switches = sorted(sts.switches, key=lambda r: (index[r.source], index[r.target]))
    used: dict[str, int] = {}
    out = []
    for r in switches:
        base = f"r_{index[r.source]}_{index[r.target]}"
        n = used.get(base, 0)
        used[base] = n + 1
        out.append(replace(r, id=base if n == 0 else f"{base}_{n}",
                           source=f"l{index[r.source]}", target=f"l{index[r.target]}"))
    return replace(sts, locations=tuple(f"l{i}" for i in range(len(order))),
                   initial=f"l{index[sts.initial]}", switches=tuple(out))


def master(primary: Sequence[Sts], every: Sequence[Sts], depth: int = DEFAULT_DEPTH) -> Sts:
    """``S_ini ▷ (S_sys ▷ (… ▷ S_sys))`` with ``depth - 1`` copies of ``S_sys``."""
    if not primary:
        raise CompositionError("no primary scenario: an initial scenario must be executed before any other")
    if depth < 1:
        raise CompositionError("depth must be at least 1")
    s_ini = rename(choice(*primary), "#0")
    copies = [rename(choice(*every), f"#{k}") for k in range(1, depth)]
    tail = None
    for copy in reversed(copies):
        tail = copy if tail is None else sequential(copy, tail)
    result = s_ini if tail is None else sequential(s_ini, tail)
    return replace(relabel(result), name="master")


# -- pruning ------------------------------------------------------------------


@dataclass
class PruneReport:
    removed: list[dict] = field(default_factory=list)  # {"switch", "reason", "scenario"}
    removed_locations: list[str] = field(default_factory=list)
    unreachable_scenarios: list[str] = field(default_factory=list)
    decimal_flagged: list[str] = field(default_factory=list)
    kept: int = 0

    def as_dict(self) -> dict:
        return {
            "kept": self.kept,
            "removed": self.removed,
            "removed_locations": self.removed_locations,
            "unreachable_scenarios": self.unreachable_scenarios,
            "decimal_flagged": self.decimal_flagged,
        }

    def lines(self) -> list[str]:
        out = [f"kept {self.kept} switches, removed {len(self.removed)}"]
        for r in self.removed:
            out.append(f"  removed {r['switch']} ({r['scenario']}): {r['reason']}")
        for sc in self.unreachable_scenarios:
            out.append(f"  scenario never reachable: {sc}")
        if self.decimal_flagged:
            out.append("  removed switches whose guards involve decimal variables "
                       "(a larger sample set may revive them): " + ", ".join(self.decimal_flagged))
        return out


def _decimal_vars(sts: Sts) -> set[str]:
    return {b.id for b in sts.variables if any(True for _ in decimal_paths(b.domain, b.id))}


def prune(sts: Sts, ctx, plan: Optional[SamplingPlan] = None, solver: Optional[Solver] = None,
          max_steps: Optional[int] = None) -> tuple[Sts, PruneReport]:
    """Drop switches that lie on no satisfiable path from the initial location."""
    domains = DomainCache(ctx.bindings, plan)
    limit = max_steps if max_steps is not None else len(sts.switches)
    outgoing: dict[str, list[Switch]] = {}
    for r in sts.switches:
        outgoing.setdefault(r.source, []).append(r)
    kept: set[str] = set()
    attempted: set[str] = set()

    def walk(path):
        if len(path.switches) >= limit:
            return
        loc = path.switches[-1].target if path.switches else sts.initial
        for r in outgoing.get(loc, ()):
            attempted.add(r.id)
            longer = path.extend(r)
            if solve(longer, ctx, plan, solver, domains) is not None:
                kept.add(r.id)
                walk(longer)

    walk(empty_path(list(ctx.bindings)))

    decimals = _decimal_vars(sts)
    report = PruneReport()
    for r in sts.switches:
        if r.id in kept:
            continue
        reason = "unsatisfiable path condition" if r.id in attempted else "unreachable"
        report.removed.append({"switch": r.id, "reason": reason, "scenario": r.scenario})
        if reason != "unreachable" and any(v.name in decimals for v in free_vars(r.guard)):
            report.decimal_flagged.append(r.id)
    switches = [r for r in sts.switches if r.id in kept]
    pruned = replace(sts, switches=tuple(switches))
    reachable = set(pruned.reachable())
    locations = [loc for loc in sts.locations if loc in reachable]
    report.removed_locations = [loc for loc in sts.locations if loc not in reachable]
    scenarios = list(dict.fromkeys(r.scenario for r in sts.switches))
    surviving = {r.scenario for r in switches}
    report.unreachable_scenarios = [sc for sc in scenarios if sc not in surviving]
    report.kept = len(switches)
    return replace(pruned, locations=tuple(locations)), report
