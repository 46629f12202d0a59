"""Path conditions, a bounded finite-domain solver, and input counting.

Path conditions are built by forward substitution: each location variable
starts as its initial copy ``name@ini`` and is replaced by whatever term the
assignments along the path store into it. Parameters of the ``j``-th switch
become the instances ``name@j``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Mapping, Optional, Protocol, Sequence

from .sts import (
    TRUE,
    BoolOp,
    EvaluationError,
    LocVar,
    Param,
    Switch,
    Term,
    conjuncts,
    evaluate,
    free_vars,
    normalize,
    substitute,
)
from .values import SamplingPlan, Value, enumerate_domain

INI = "ini"


class PathError(ValueError):
    """The switches do not form a connected path."""


def ini_var(name: str) -> LocVar:
    return LocVar(f"{name}@{INI}")


def param_instance(name: str, step: int) -> Param:
    return Param(f"{name}@{step}")


def base_name(instance) -> str:
    return instance.name.rsplit("@", 1)[0]


@dataclass(frozen=True)
class SymbolicPath:
    switches: tuple[Switch, ...]
    step_conditions: tuple[Term, ...]
    final_state: tuple[tuple[str, Term], ...]

    @property
    def condition(self) -> Term:
        if not self.step_conditions:
            return TRUE
        return normalize(BoolOp("and", self.step_conditions))

    def extend(self, switch: Switch) -> "SymbolicPath":
        if self.switches and self.switches[-1].target != switch.source:
            raise PathError(f"switch {switch.id} does not start where {self.switches[-1].id} ends")
        j = len(self.switches)
        sigma: dict = {LocVar(v): t for v, t in self.final_state}
        sigma.update({Param(p): param_instance(p, j) for p in switch.params})
        cond = normalize(substitute(switch.guard, sigma))
        state = dict(self.final_state)
        for v, t in switch.assignment:
            state[v] = substitute(t, sigma)
        return SymbolicPath(self.switches + (switch,), self.step_conditions + (cond,),
                            tuple(state.items()))


def empty_path(var_names: Sequence[str]) -> SymbolicPath:
    return SymbolicPath((), (), tuple((v, ini_var(v)) for v in var_names))


def path_condition(switches: Sequence[Switch], var_names: Sequence[str],
                   initial: Optional[str] = None) -> SymbolicPath:
    """Symbolic path for ``switches``; ``initial`` optionally pins the first source."""
    if switches and initial is not None and switches[0].source != initial:
        raise PathError(f"path starts at {switches[0].source}, not at the initial location {initial}")
    sp = empty_path(var_names)
    for s in switches:
        sp = sp.extend(s)
    return sp


# -- solving ------------------------------------------------------------------


@dataclass(frozen=True)
class Solution:
    ini: dict[str, Value]
    values: tuple[tuple[Value, ...], ...]

    def valuation(self, switches: Sequence[Switch]) -> dict:
        """Instance valuation (``name@ini`` / ``name@j``) for replaying a path condition."""
        out: dict = {ini_var(k): v for k, v in self.ini.items()}
        for j, (s, vals) in enumerate(zip(switches, self.values)):
            for p, v in zip(s.params, vals):
                out[param_instance(p, j)] = v
        return out


@dataclass
class Problem:
    """Finite constraint problem: ordered variables with candidate lists, boolean constraints."""

    variables: list
    domains: dict
    constraints: list[Term]


class Solver(Protocol):
    def solve(self, problem: Problem) -> Optional[dict]:
        """A total assignment satisfying every constraint, or None."""


@dataclass
class BacktrackingSolver:
    """Deterministic search with forward checking, MRV ordering and component splitting."""

    calls: int = field(default=0)

    def solve(self, problem: Problem) -> Optional[dict]:
        self.calls += 1
        order = {v: i for i, v in enumerate(problem.variables)}
        cons = [(c, frozenset(free_vars(c))) for c in problem.constraints]
        by_var: dict = {v: [] for v in problem.variables}
        for c, vs in cons:
            for v in vs:
                if v not in by_var:
                    raise EvaluationError(f"constraint mentions unknown variable {v}")
                by_var[v].append((c, vs))
        domains = {v: list(problem.domains[v]) for v in problem.variables}
        assignment: dict = {}
        for c, vs in cons:
            if not vs:
                if not _holds(c, {}):
                    return None
            elif len(vs) == 1:
                (v,) = vs
                domains[v] = [x for x in domains[v] if _holds(c, {v: x})]
                if not domains[v]:
                    return None
        ok = _search(set(problem.variables), domains, assignment, by_var, order)
        return assignment if ok else None


def _holds(term: Term, valuation) -> bool:
    try:
        return evaluate(term, valuation) is True
    except EvaluationError:
        return False


def _components(unassigned: set, by_var, assignment) -> list[set]:
    comps, seen = [], set()
    for start in unassigned:
        if start in seen:
            continue
        comp, stack = set(), [start]
        while stack:
            v = stack.pop()
            if v in comp:
                continue
            comp.add(v)
            for _, vs in by_var[v]:
                for w in vs:
                    if w in unassigned and w not in comp:
                        stack.append(w)
        seen |= comp
        comps.append(comp)
    return comps


def _search(unassigned: set, domains: dict, assignment, by_var, order) -> bool:
    if not unassigned:
        return True
    comps = _components(unassigned, by_var, assignment)
    if len(comps) > 1:
        comps.sort(key=lambda c: min(order[v] for v in c))
        for comp in comps:
            if not _search(comp, domains, assignment, by_var, order):
                for v in unassigned:
                    assignment.pop(v, None)
                return False
        return True
    var = min(unassigned, key=lambda v: (len(domains[v]), order[v]))
    rest = unassigned - {var}
    for value in domains[var]:
        assignment[var] = value
        pruned = _forward_check(var, rest, domains, assignment, by_var)
        if pruned is not None and _search(rest, {**domains, **pruned}, assignment, by_var, order):
            return True
        del assignment[var]
    return False


def _forward_check(var, rest: set, domains, assignment, by_var) -> Optional[dict]:
    """Check constraints made ground by ``var``; narrow those left with one open variable."""
    narrowed: dict = {}
    for c, vs in by_var[var]:
        open_vars = [w for w in vs if w in rest]
        if not open_vars:
            if not _holds(c, assignment):
                return None
        elif len(open_vars) == 1:
            w = open_vars[0]
            current = narrowed.get(w, domains[w])
            keep = []
            for x in current:
                assignment[w] = x
                if _holds(c, assignment):
                    keep.append(x)
            del assignment[w]
            if not keep:
                return None
            narrowed[w] = keep
    return narrowed


DEFAULT_SOLVER = BacktrackingSolver()


class DomainCache:
    """Enumerated finitized domains per declared variable, computed once."""

    def __init__(self, bindings: Mapping, plan: Optional[SamplingPlan] = None):
        self.bindings = bindings
        self.plan = plan if plan is not None else SamplingPlan()
        self._cache: dict[str, list] = {}

    def values(self, var_id: str) -> list:
        if var_id not in self._cache:
            b = self.bindings[var_id]
            self._cache[var_id] = enumerate_domain(b.domain, self.plan, b.id)
        return self._cache[var_id]


def solve(sp: SymbolicPath, ctx, plan: Optional[SamplingPlan] = None,
          solver: Optional[Solver] = None, domains: Optional[DomainCache] = None) -> Optional[Solution]:
    """Values for the initial copies and every parameter instance satisfying ``sp``."""
    solver = solver or DEFAULT_SOLVER
    domains = domains or DomainCache(ctx.bindings, plan)
    variables: list = [ini_var(v) for v in ctx.bindings]
    for j, s in enumerate(sp.switches):
        variables += [param_instance(p, j) for p in s.params]
    constraints = []
    for c in sp.step_conditions:
        constraints.extend(conjuncts(c))
    problem = Problem(variables, {v: domains.values(base_name(v)) for v in variables}, constraints)
    found = solver.solve(problem)
    if found is None:
        return None
    ini = {v: found[ini_var(v)] for v in ctx.bindings}
    values = tuple(tuple(found[param_instance(p, j)] for p in s.params)
                   for j, s in enumerate(sp.switches))
    return Solution(ini, values)


def satisfies(sp: SymbolicPath, solution: Solution) -> bool:
    """Replay ``solution`` against the path condition with the plain evaluator."""
    try:
        return evaluate(sp.condition, solution.valuation(sp.switches)) is True
    except EvaluationError:
        return False


def count_satisfying_inputs(switch: Switch, fixed: Mapping[str, Value], ctx,
                            plan: Optional[SamplingPlan] = None,
                            domains: Optional[DomainCache] = None) -> int:
    """Number of parameter tuples from the finitized domains that satisfy the guard."""
    domains = domains or DomainCache(ctx.bindings, plan)
    valuation: dict = {}
    for v in free_vars(switch.guard):
        if isinstance(v, LocVar):
            if v.name not in fixed:
                raise KeyError(f'no fixed value for location variable "{v.name}"')
            valuation[v] = fixed[v.name]
    columns = [domains.values(p) for p in switch.params]
    count = 0
    for combo in itertools.product(*columns):
        for p, x in zip(switch.params, combo):
            valuation[Param(p)] = x
        if evaluate(switch.guard, valuation) is True:
            count += 1
    return count
