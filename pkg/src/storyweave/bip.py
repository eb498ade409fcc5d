"""Exact 0/1 linear programming infrastructure.

Provides the model containers shared by every optimization in this package,
a deterministic depth-first branch-and-bound solver with timeout and bound
reporting, and CPLEX-style LP text export so large models can be handed to
an external solver.

The solver works in exact integer arithmetic: coefficients, right-hand
sides and objective weights are integers (scale rationals while building
the model).  Bounding uses the partial objective plus 0/1 bound
propagation; there is deliberately no LP relaxation.
"""

from __future__ import annotations

import re
import time
from dataclasses import dataclass
from typing import Iterable, Literal, Sequence

Op = Literal["<=", ">=", "="]

_NAME_RE = re.compile(r"[A-Za-z0-9_]+\Z")

OPTIMAL = "optimal"
FEASIBLE_TIMEOUT = "feasible-timeout"
INFEASIBLE = "infeasible"

_TIMEOUT_CHECK_NODES = 1000


@dataclass(frozen=True)
class VarId:
    index: int
    name: str


@dataclass(frozen=True)
class LinearConstraint:
    terms: tuple[tuple[int, VarId], ...]
    op: Op
    rhs: int


@dataclass(frozen=True)
class BinaryProgram:
    variables: tuple[VarId, ...]
    constraints: tuple[LinearConstraint, ...]
    objective: tuple[tuple[int, VarId], ...]


@dataclass(frozen=True)
class SolveResult:
    """Outcome of one solve.

    ``assignment`` is indexed by variable index and is None only when no
    feasible point was found.  ``best_lower_bound`` equals the objective
    exactly when the status is ``optimal``; on timeout it is the best bound
    proven for the unexplored part of the tree.
    """

    status: str
    assignment: tuple[int, ...] | None
    objective_value: int | None
    best_lower_bound: int | None
    elapsed: float
    nodes: int = 0

    def value(self, var: VarId) -> int:
        assert self.assignment is not None
        return self.assignment[var.index]


def gap_percent(upper: int, lower: int) -> float:
    """Relative optimality gap (UB-LB)/UB in percent; requires UB > 0."""
    if upper <= 0:
        raise ValueError("gap is only defined for a positive upper bound")
    return 100.0 * (upper - lower) / upper


class ModelBuilder:
    """Incremental construction of a :class:`BinaryProgram`."""

    def __init__(self) -> None:
        self._vars: list[VarId] = []
        self._names: set[str] = set()
        self._constraints: list[LinearConstraint] = []
        self._objective: list[tuple[int, VarId]] = []

    def new_var(self, name: str) -> VarId:
        if not _NAME_RE.match(name):
            raise ValueError(f"variable name {name!r} must match [A-Za-z0-9_]+")
        if name in self._names:
            raise ValueError(f"duplicate variable name {name!r}")
        var = VarId(len(self._vars), name)
        self._vars.append(var)
        self._names.add(name)
        return var

    def add(self, terms: Iterable[tuple[int, VarId]], op: Op, rhs: int) -> None:
        self._constraints.append(LinearConstraint(tuple(terms), op, rhs))

    def minimize(self, terms: Iterable[tuple[int, VarId]]) -> None:
        self._objective = list(terms)

    def add_objective_term(self, coef: int, var: VarId) -> None:
        self._objective.append((coef, var))

    def build(self) -> BinaryProgram:
        program = BinaryProgram(
            tuple(self._vars), tuple(self._constraints), tuple(self._objective)
        )
        validate_program(program)
        return program


def validate_program(p: BinaryProgram) -> None:
    """Raise ValueError on malformed programs (bad names, dangling vars, ...)."""
    names = set()
    for i, v in enumerate(p.variables):
        if v.index != i:
            raise ValueError(f"variable {v.name!r} has index {v.index}, expected {i}")
        if not _NAME_RE.match(v.name):
            raise ValueError(f"variable name {v.name!r} must match [A-Za-z0-9_]+")
        if v.name in names:
            raise ValueError(f"duplicate variable name {v.name!r}")
        names.add(v.name)
    n = len(p.variables)

    def check_ref(v: VarId) -> None:
        if not (0 <= v.index < n) or p.variables[v.index] != v:
            raise ValueError(f"unknown variable {v.name!r}")

    for k, c in enumerate(p.constraints):
        if not c.terms:
            raise ValueError(f"constraint {k} has no terms")
        if c.op not in ("<=", ">=", "="):
            raise ValueError(f"constraint {k} has unknown operator {c.op!r}")
        seen: set[int] = set()
        for coef, v in c.terms:
            check_ref(v)
            if not isinstance(coef, int) or isinstance(coef, bool):
                raise ValueError(f"constraint {k}: coefficient {coef!r} is not an integer")
            if v.index in seen:
                raise ValueError(f"constraint {k}: duplicate variable {v.name!r}")
            seen.add(v.index)
        if not isinstance(c.rhs, int) or isinstance(c.rhs, bool):
            raise ValueError(f"constraint {k}: right-hand side must be an integer")
    seen = set()
    for coef, v in p.objective:
        check_ref(v)
        if not isinstance(coef, int) or isinstance(coef, bool) or coef < 0:
            raise ValueError("objective coefficients must be non-negative integers")
        if v.index in seen:
            raise ValueError(f"objective lists variable {v.name!r} twice")
        seen.add(v.index)


def solve(
    program: BinaryProgram, timeout: float = 3600.0, seed: int = 0
) -> SolveResult:
    """Depth-first branch and bound over 0/1 assignments.

    Branching follows a fixed static order (largest objective coefficient
    first, ties by variable index) and tries value 0 before 1; together with
    exact integer arithmetic this makes every run reproducible, so ``seed``
    is accepted for interface stability but has no effect on the search.
    A single greedy dive runs first to seed the incumbent, so interrupted
    solves still report an upper bound.  A node is pruned as soon as the
    objective of its forced-one variables reaches the incumbent.  The wall
    clock is checked every 1000 nodes against a monotonic timer; on timeout
    the best incumbent is returned together with the lower bound proven so
    far.
    """
    del seed
    validate_program(program)
    t0 = time.monotonic()
    nvars = len(program.variables)

    obj = [0] * nvars
    for coef, v in program.objective:
        obj[v.index] = coef

    # Flattened constraint storage for the hot loop.  Assigning a variable
    # shifts a constraint's reachable [lo, hi] interval by a precomputed
    # delta: value 1 adds the positive part of the coefficient to lo and the
    # negative part to hi, value 0 removes the opposite parts.
    cons_terms: list[tuple[tuple[int, int], ...]] = []  # ((coef, var index), ...)
    cons_op: list[str] = []
    cons_rhs: list[int] = []
    lo: list[int] = []  # current minimum of the left-hand side
    hi: list[int] = []  # current maximum of the left-hand side
    var_cons: list[list[tuple[int, int, int]]] = [[] for _ in range(nvars)]
    for k, c in enumerate(program.constraints):
        terms = tuple((coef, v.index) for coef, v in c.terms)
        cons_terms.append(terms)
        cons_op.append(c.op)
        cons_rhs.append(c.rhs)
        lo.append(sum(min(0, coef) for coef, _ in terms))
        hi.append(sum(max(0, coef) for coef, _ in terms))
        for coef, vi in terms:
            var_cons[vi].append((k, max(0, coef), min(0, coef)))

    value = [-1] * nvars
    trail: list[int] = []
    cur_obj = 0
    queued = bytearray(len(cons_terms))

    def assign(vi: int, val: int) -> None:
        nonlocal cur_obj
        value[vi] = val
        trail.append(vi)
        if val:
            cur_obj += obj[vi]
            for k, pos, neg in var_cons[vi]:
                lo[k] += pos
                hi[k] += neg
        else:
            for k, pos, neg in var_cons[vi]:
                lo[k] -= neg
                hi[k] -= pos

    def undo_to(mark: int) -> None:
        nonlocal cur_obj
        while len(trail) > mark:
            vi = trail.pop()
            if value[vi]:
                cur_obj -= obj[vi]
                for k, pos, neg in var_cons[vi]:
                    lo[k] -= pos
                    hi[k] -= neg
            else:
                for k, pos, neg in var_cons[vi]:
                    lo[k] += neg
                    hi[k] += pos
            value[vi] = -1

    def run_queue(pending: list[int]) -> bool:
        """Propagate forced values until fixpoint; False on conflict.

        Forcing a variable re-queues every constraint it appears in
        (including the current one), so each constraint is re-examined
        under the tightened bounds; the queue is deduplicated.
        """
        for k in pending:
            queued[k] = 1
        while pending:
            k = pending.pop()
            queued[k] = 0
            op = cons_op[k]
            rhs = cons_rhs[k]
            clo = lo[k]
            chi = hi[k]
            conflict = (op != ">=" and clo > rhs) or (op != "<=" and chi < rhs)
            if not conflict:
                for coef, u in cons_terms[k]:
                    if value[u] != -1:
                        continue
                    force = -1
                    if op != ">=":  # <= or =
                        if coef > 0 and clo + coef > rhs:
                            force = 0
                        elif coef < 0 and clo - coef > rhs:
                            force = 1
                    if force == -1 and op != "<=":  # >= or =
                        if coef > 0 and chi - coef < rhs:
                            force = 1
                        elif coef < 0 and chi + coef < rhs:
                            force = 0
                    if force != -1:
                        assign(u, force)
                        for k2, _pos, _neg in var_cons[u]:
                            if not queued[k2]:
                                queued[k2] = 1
                                pending.append(k2)
                        clo = lo[k]
                        chi = hi[k]
                        if (op != ">=" and clo > rhs) or (op != "<=" and chi < rhs):
                            conflict = True
                            break
            if conflict:
                for k2 in pending:
                    queued[k2] = 0
                return False
        return True

    def propagate(vi: int, val: int) -> bool:
        assign(vi, val)
        return run_queue([k for k, _pos, _neg in var_cons[vi]])

    order = sorted(range(nvars), key=lambda i: (-obj[i], i))

    def next_unassigned(start: int) -> int:
        while start < nvars and value[order[start]] != -1:
            start += 1
        return start

    best_assignment: list[int] | None = None
    best_obj: int | None = None
    nodes = 0
    timed_out = False

    # Initial propagation pass over every constraint (catches units).
    root_ok = run_queue(list(range(len(cons_terms))))

    def dive() -> None:
        """Greedy pass seeding the incumbent before the systematic search.

        Visits cheap (zero-objective) variables first so the costly
        indicator variables are mostly forced by propagation; tries 0, then
        1, and gives up at the first variable that survives neither (or
        when the deadline passes).  Runs on its own trail segment and
        leaves the state untouched.
        """
        nonlocal best_assignment, best_obj
        mark = len(trail)
        dive_order = sorted(range(nvars), key=lambda i: (obj[i], i))
        for steps, vi in enumerate(dive_order):
            if value[vi] != -1:
                continue
            if steps % 256 == 0 and time.monotonic() - t0 > timeout:
                undo_to(mark)
                return
            step = len(trail)
            if propagate(vi, 0):
                continue
            undo_to(step)
            if propagate(vi, 1):
                continue
            undo_to(mark)
            return
        best_assignment = list(value)
        best_obj = cur_obj
        undo_to(mark)

    if root_ok:
        dive()

    # Frames: [order position of the branch var, next value, trail mark, entry bound]
    frames: list[list[int]] = []
    if root_ok:
        pos = next_unassigned(0)
        if pos == nvars:
            best_assignment = list(value)
            best_obj = cur_obj
        else:
            frames.append([pos, 0, -1, cur_obj])

    open_bound: int | None = None
    while frames:
        f = frames[-1]
        if f[2] >= 0:
            undo_to(f[2])
            f[2] = -1
        if f[1] > 1:
            frames.pop()
            continue
        if timed_out:
            # Everything still on the stack is unexplored search space.
            for g in frames:
                if g[1] <= 1:
                    if open_bound is None or g[3] < open_bound:
                        open_bound = g[3]
            break
        val = f[1]
        f[1] += 1
        nodes += 1
        if nodes % _TIMEOUT_CHECK_NODES == 0 and time.monotonic() - t0 > timeout:
            timed_out = True
        vi = order[f[0]]
        mark = len(trail)
        f[2] = mark
        if not propagate(vi, val):
            continue
        if best_obj is not None and cur_obj >= best_obj:
            continue
        pos = next_unassigned(f[0] + 1)
        if pos == nvars:
            best_assignment = list(value)
            best_obj = cur_obj
            continue
        frames.append([pos, 0, -1, cur_obj])

    elapsed = time.monotonic() - t0
    # open_bound is None exactly when no subtree was left unexplored, in
    # which case the search completed despite the timeout flag.
    if best_obj is None:
        if timed_out and open_bound is not None:
            return SolveResult(FEASIBLE_TIMEOUT, None, None, open_bound, elapsed, nodes)
        return SolveResult(INFEASIBLE, None, None, None, elapsed, nodes)
    if timed_out and open_bound is not None and open_bound < best_obj:
        return SolveResult(
            FEASIBLE_TIMEOUT,
            tuple(best_assignment or ()),
            best_obj,
            open_bound,
            elapsed,
            nodes,
        )
    return SolveResult(
        OPTIMAL, tuple(best_assignment or ()), best_obj, best_obj, elapsed, nodes
    )


# ---------------------------------------------------------------------------
# LP text format
# ---------------------------------------------------------------------------


def _format_terms(terms: Sequence[tuple[int, str]]) -> str:
    parts: list[str] = []
    for coef, name in terms:
        mag = abs(coef)
        body = name if mag == 1 else f"{mag} {name}"
        if not parts:
            parts.append(body if coef >= 0 else f"- {body}")
        else:
            parts.append(f"+ {body}" if coef >= 0 else f"- {body}")
    return " ".join(parts)


def _wrap(line: str, width: int = 240) -> list[str]:
    if len(line) <= width:
        return [line]
    out: list[str] = []
    words = line.split(" ")
    cur = words[0]
    for w in words[1:]:
        if len(cur) + 1 + len(w) > width:
            out.append(cur)
            cur = " " + w
        else:
            cur += " " + w
    out.append(cur)
    return out


def export_lp(p: BinaryProgram, name: str = "storyweave") -> str:
    """Serialize a program in CPLEX-style LP text.

    Sections emitted: ``Minimize``, ``Subject To``, ``Binary``, ``End``.
    Output is deterministic; :func:`parse_lp` reads it back into an
    equivalent program.
    """
    validate_program(p)
    out: list[str] = [f"\\ {name}", "Minimize"]
    obj_terms = [(coef, v.name) for coef, v in p.objective if coef != 0]
    out.extend(_wrap(" obj: " + _format_terms(obj_terms) if obj_terms else " obj:"))
    out.append("Subject To")
    for k, c in enumerate(p.constraints):
        body = _format_terms([(coef, v.name) for coef, v in c.terms])
        out.extend(_wrap(f" c{k}: {body} {c.op} {c.rhs}"))
    out.append("Binary")
    for v in p.variables:
        out.append(f" {v.name}")
    out.append("End")
    return "\n".join(out) + "\n"


_TERM_RE = re.compile(r"([+-])?\s*(\d+)?\s*([A-Za-z0-9_]+)")


def _parse_terms(text: str) -> list[tuple[int, str]]:
    terms: list[tuple[int, str]] = []
    pos = 0
    while pos < len(text):
        m = _TERM_RE.match(text, pos)
        if not m:
            if text[pos].isspace():
                pos += 1
                continue
            raise ValueError(f"cannot parse linear expression at {text[pos:]!r}")
        sign, coef, name = m.groups()
        n = int(coef) if coef else 1
        terms.append((-n if sign == "-" else n, name))
        pos = m.end()
    return terms


def parse_lp(text: str) -> BinaryProgram:
    """Parse the LP subset produced by :func:`export_lp`."""
    lines = [ln for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("\\")]
    section = None
    statements: dict[str, list[str]] = {"objective": [], "constraints": [], "binary": []}
    for ln in lines:
        stripped = ln.strip()
        lowered = stripped.lower()
        if lowered in ("minimize", "minimise"):
            section = "objective"
            continue
        if lowered in ("subject to", "st", "s.t."):
            section = "constraints"
            continue
        if lowered in ("binary", "binaries", "bin"):
            section = "binary"
            continue
        if lowered == "end":
            break
        if section is None:
            raise ValueError(f"statement before any section: {stripped!r}")
        bucket = statements[section]
        # A new labelled statement starts a fresh entry; bare lines continue
        # the previous one (long rows are wrapped on export).
        if section in ("objective", "constraints") and ":" in stripped.split(" ", 1)[0]:
            bucket.append(stripped)
        elif section == "binary":
            bucket.extend(stripped.split())
        elif bucket:
            bucket[-1] += " " + stripped
        else:
            bucket.append(stripped)

    names = statements["binary"]
    builder = ModelBuilder()
    by_name: dict[str, VarId] = {}
    for nm in names:
        by_name[nm] = builder.new_var(nm)

    def resolve(terms: list[tuple[int, str]]) -> list[tuple[int, VarId]]:
        out = []
        for coef, nm in terms:
            if nm not in by_name:
                raise ValueError(f"variable {nm!r} missing from Binary section")
            out.append((coef, by_name[nm]))
        return out

    if statements["objective"]:
        body = statements["objective"][0].split(":", 1)[1].strip()
        if body:
            builder.minimize(resolve(_parse_terms(body)))
    for stmt in statements["constraints"]:
        body = stmt.split(":", 1)[1].strip()
        m = re.search(r"(<=|>=|=)\s*(-?\d+)\s*$", body)
        if not m:
            raise ValueError(f"constraint without comparison: {stmt!r}")
        op = m.group(1)
        rhs = int(m.group(2))
        builder.add(resolve(_parse_terms(body[: m.start()])), op, rhs)  # type: ignore[arg-type]
    return builder.build()
