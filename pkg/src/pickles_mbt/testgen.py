"""Switch-coverage test generation over a (pruned) master model."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from .sts import Sts, Switch
from .symbolic import (
    DomainCache,
    PathError,
    Solution,
    Solver,
    SymbolicPath,
    empty_path,
    path_condition,
    satisfies,
    solve,
)
from .values import SamplingPlan, Value, domain_contains

DEFAULT_SCENARIO_DEPTH = 3


class GenerationError(RuntimeError):
    pass


@dataclass(frozen=True)
class FormalTestCase:
    """A switch path of the master model with an initial valuation and input/output values.

    Nothing is checked on construction; use :func:`check_test` to validate a
    test against its model.
    """

    __test__ = False  # keep pytest from collecting it

    switches: tuple[str, ...]
    ini: dict[str, Value]
    values: tuple[tuple[Value, ...], ...]


def path_of(tc: FormalTestCase, master: Sts) -> list[Switch]:
    by_id = {r.id: r for r in master.switches}
    try:
        return [by_id[s] for s in tc.switches]
    except KeyError as exc:
        raise KeyError(f"switch {exc.args[0]!r} is not in the model") from None


def check_test(tc: FormalTestCase, master: Sts, ctx) -> list[str]:
    """Problems with ``tc`` as a test of ``master``; empty when the test is valid."""
    problems = []
    try:
        path = path_of(tc, master)
    except KeyError as exc:
        return [str(exc.args[0])]
    if set(tc.ini) != set(ctx.bindings):
        problems.append(f"initial valuation covers {sorted(tc.ini)}, expected every location variable")
    for k, v in tc.ini.items():
        if k in ctx.bindings and not domain_contains(ctx.bindings[k].domain, v):
            problems.append(f'initial value of "{k}" lies outside its domain')
    if len(tc.values) != len(path):
        problems.append(f"{len(tc.values)} value sequences for {len(path)} switches")
        return problems
    for j, (r, vals) in enumerate(zip(path, tc.values)):
        if len(vals) != len(r.params):
            problems.append(f"switch {j} ({r.id}) expects {len(r.params)} values, got {len(vals)}")
            continue
        for p, v in zip(r.params, vals):
            if not domain_contains(ctx.bindings[p].domain, v):
                problems.append(f'value of "{p}" at switch {j} lies outside its domain')
    try:
        sp = path_condition(path, list(ctx.bindings), master.initial)
    except PathError as exc:
        problems.append(str(exc))
        return problems
    if not problems and not satisfies(sp, Solution(dict(tc.ini), tuple(tuple(v) for v in tc.values))):
        problems.append("values do not satisfy the path condition")
    return problems


@dataclass
class CoverageReport:
    covered: set[str]
    total: set[str]
    traces: list[list[str]] = field(default_factory=list)

    @property
    def ratio(self) -> float:
        return len(self.covered) / len(self.total) if self.total else 0.0

    def as_dict(self) -> dict:
        return {"covered": sorted(self.covered), "total": len(self.total), "ratio": self.ratio,
                "tests": len(self.traces)}


def coverage_of(tests: Iterable[FormalTestCase], master: Sts) -> CoverageReport:
    ids = {r.id for r in master.switches}
    covered: set[str] = set()
    traces = []
    for tc in tests:
        for s in tc.switches:
            if s not in ids:
                raise KeyError(f"switch {s!r} is not in the model")
        covered.update(tc.switches)
        traces.append(list(tc.switches))
    return CoverageReport(covered, ids, traces)


def maximal_paths(master: Sts, ctx, plan: Optional[SamplingPlan] = None,
                  depth: int = DEFAULT_SCENARIO_DEPTH, solver: Optional[Solver] = None,
                  domains: Optional[DomainCache] = None) -> list[SymbolicPath]:
    """Satisfiable paths from the initial location that cannot be extended.

    A path is also complete once starting another scenario would exceed
    ``depth`` scenarios. Order is depth-first in switch order.
    """
    domains = domains or DomainCache(ctx.bindings, plan)
    outgoing: dict[str, list[Switch]] = {}
    for r in master.switches:
        outgoing.setdefault(r.source, []).append(r)
    out: list[SymbolicPath] = []

    def walk(sp: SymbolicPath, scenarios: int):
        loc = sp.switches[-1].target if sp.switches else master.initial
        extended = False
        for r in outgoing.get(loc, ()):
            started = scenarios + (1 if r.step == 0 else 0)
            if started > depth:
                continue
            longer = sp.extend(r)
            if solve(longer, ctx, plan, solver, domains) is not None:
                extended = True
                walk(longer, started)
        if not extended and sp.switches:
            out.append(sp)

    walk(empty_path(list(ctx.bindings)), 0)
    return out


def _to_test(sp: SymbolicPath, sol: Solution) -> FormalTestCase:
    return FormalTestCase(tuple(r.id for r in sp.switches), dict(sol.ini), sol.values)


def generate_switch_coverage(master: Sts, ctx, plan: Optional[SamplingPlan] = None,
                             depth: int = DEFAULT_SCENARIO_DEPTH,
                             solver: Optional[Solver] = None) -> list[FormalTestCase]:
    """Greedy cover of all switches by maximal satisfiable paths, one test per chosen path."""
    domains = DomainCache(ctx.bindings, plan)
    candidates = maximal_paths(master, ctx, plan, depth, solver, domains)
    uncovered = {r.id for r in master.switches}
    chosen: list[SymbolicPath] = []
    while uncovered:
        best, gain = None, 0
        for sp in candidates:
            g = len(uncovered & {r.id for r in sp.switches})
            if g > gain:
                best, gain = sp, g
        if best is None:
            missing = sorted(uncovered)
            raise GenerationError(f"switches {missing} lie on no satisfiable path; prune the model first")
        chosen.append(best)
        uncovered -= {r.id for r in best.switches}
    tests = []
    for sp in chosen:
        sol = solve(sp, ctx, plan, solver, domains)
        if sol is None:  # pragma: no cover - candidates were solved during enumeration
            raise GenerationError("a candidate path became unsatisfiable")
        tests.append(_to_test(sp, sol))
    return tests


def scenario_path(master: Sts, first: Switch) -> list[Switch]:
    """The switches of one scenario run, starting with ``first``."""
    path = [first]
    while True:
        nxt = [r for r in master.switches
               if r.source == path[-1].target and r.scenario == first.scenario and r.step == path[-1].step + 1]
        if not nxt:
            return path
        path.append(nxt[0])


def isolated_tests(master: Sts, ctx, plan: Optional[SamplingPlan] = None,
                   solver: Optional[Solver] = None) -> list[FormalTestCase]:
    """One test per scenario executed alone from the initial location."""
    tests = []
    for r in master.switches:
        if r.source != master.initial:
            continue
        sp = path_condition(scenario_path(master, r), list(ctx.bindings), master.initial)
        sol = solve(sp, ctx, plan, solver)
        if sol is not None:
            tests.append(_to_test(sp, sol))
    return tests


def find_path(master: Sts, scenarios: Sequence[str]) -> list[Switch]:
    """The master path running the given scenarios (by title prefix) in order."""
    loc, path = master.initial, []
    for wanted in scenarios:
        starts = [r for r in master.switches if r.source == loc and r.step == 0
                  and r.scenario.startswith(wanted)]
        if not starts:
            raise KeyError(f"no scenario {wanted!r} from location {loc}")
        run = scenario_path(master, starts[0])
        path += run
        loc = run[-1].target
    return path
