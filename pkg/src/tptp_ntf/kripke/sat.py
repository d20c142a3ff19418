"""Ground propositional formulae, clause conversion and a small DPLL solver.

Ground formulae are in negation normal form: ``True``/``False``, a literal
(a non-zero ``int``, negative for negation), or ``("&", parts)`` /
``("|", parts)``.  The solver is deterministic: variables are decided in
increasing order, ``False`` first, with chronological backtracking.
"""
from __future__ import annotations

from collections import defaultdict

AND = "&"
OR = "|"


class BudgetExceeded(Exception):
    pass


class Budget:
    """Counts work units and raises :class:`BudgetExceeded` past the limit."""

    def __init__(self, limit: int | None):
        self.limit = limit
        self.used = 0

    def tick(self, n: int = 1) -> None:
        self.used += n
        if self.limit is not None and self.used > self.limit:
            raise BudgetExceeded(self.used)


def conj(parts) -> object:
    out = []
    for p in parts:
        if p is False:
            return False
        if p is True:
            continue
        if isinstance(p, tuple) and p[0] == AND:
            out.extend(p[1])
        else:
            out.append(p)
    if not out:
        return True
    if len(out) == 1:
        return out[0]
    return (AND, out)


def disj(parts) -> object:
    out = []
    for p in parts:
        if p is True:
            return True
        if p is False:
            continue
        if isinstance(p, tuple) and p[0] == OR:
            out.extend(p[1])
        else:
            out.append(p)
    if not out:
        return False
    if len(out) == 1:
        return out[0]
    return (OR, out)


class ClauseSet:
    """Plaisted-Greenbaum clause conversion for NNF ground formulae."""

    def __init__(self, first_free: int):
        self.next_var = first_free
        self.clauses: list[list[int]] = []
        self.unsat = False

    def assert_formula(self, f) -> None:
        if f is True:
            return
        if f is False:
            self.unsat = True
            return
        if isinstance(f, int):
            self.clauses.append([f])
            return
        op, parts = f
        if op == AND:
            for p in parts:
                self.assert_formula(p)
        else:
            self.clauses.append([self.literal(p) for p in parts])

    def literal(self, f) -> int:
        if isinstance(f, int) and not isinstance(f, bool):
            return f
        op, parts = f
        x = self.next_var
        self.next_var += 1
        if op == AND:
            for p in parts:
                self.clauses.append([-x, self.literal(p)])
        else:
            self.clauses.append([-x, *(self.literal(p) for p in parts)])
        return x


def solve(nvars: int, clauses: list[list[int]], budget: Budget | None = None) -> dict[int, bool] | None:
    """A satisfying assignment for *clauses*, or None when unsatisfiable."""
    value = [0] * (nvars + 1)
    watches: dict[int, list[int]] = defaultdict(list)
    store: list[list[int]] = []
    units: list[int] = []
    for c in clauses:
        c = list(dict.fromkeys(c))
        if any(-lit in c for lit in c):
            continue
        if not c:
            return None
        if len(c) == 1:
            units.append(c[0])
            continue
        watches[c[0]].append(len(store))
        watches[c[1]].append(len(store))
        store.append(c)

    def val(lit: int) -> int:
        v = value[abs(lit)]
        return v if lit > 0 else -v

    trail: list[int] = []

    def assign(lit: int) -> None:
        value[abs(lit)] = 1 if lit > 0 else -1
        trail.append(lit)

    def propagate(head: int) -> bool:
        while head < len(trail):
            false_lit = -trail[head]
            head += 1
            ws = watches[false_lit]
            keep: list[int] = []
            i = 0
            conflict = False
            while i < len(ws):
                ci = ws[i]
                i += 1
                if budget is not None:
                    budget.tick()
                c = store[ci]
                if c[0] == false_lit:
                    c[0], c[1] = c[1], c[0]
                if val(c[0]) == 1:
                    keep.append(ci)
                    continue
                for k in range(2, len(c)):
                    if val(c[k]) != -1:
                        c[1], c[k] = c[k], c[1]
                        watches[c[1]].append(ci)
                        break
                else:
                    keep.append(ci)
                    if val(c[0]) == -1:
                        conflict = True
                        keep.extend(ws[i:])
                        break
                    assign(c[0])
            watches[false_lit] = keep
            if conflict:
                return False
        return True

    for u in units:
        if val(u) == -1:
            return None
        if val(u) == 0:
            assign(u)
    if not propagate(0):
        return None

    decisions: list[tuple[int, int]] = []  # (trail length before, decided literal)
    var = 1
    while True:
        while var <= nvars and value[var] != 0:
            var += 1
        if var > nvars:
            return {v: value[v] == 1 for v in range(1, nvars + 1)}
        start = len(trail)
        decisions.append((start, -var))
        assign(-var)
        ok = propagate(start)
        while not ok:
            while decisions:
                start, lit = decisions.pop()
                for undo in trail[start:]:
                    value[abs(undo)] = 0
                del trail[start:]
                if lit < 0:
                    decisions.append((start, -lit))
                    assign(-lit)
                    break
            else:
                return None
            var = min(var, abs(decisions[-1][1]))
            ok = propagate(start)
        if budget is not None:
            budget.tick()
