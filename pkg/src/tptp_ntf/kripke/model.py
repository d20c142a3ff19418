"""Finite first-order Kripke structures."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

from ..errors import InterpretationError

Element = str
World = str


@dataclass(frozen=True)
class FiniteKripkeModel:
    """A finite Kripke structure with per-world domains.

    ``accessibility`` is keyed by connective index (``None`` for the
    mono-modal relation).  ``functions`` and ``predicates`` are keyed by
    ``(symbol, world)``; function tables map argument tuples to elements.
    Element identifiers are shared across worlds, so equality between
    worlds is identity of identifiers.
    """

    worlds: tuple[World, ...]
    local_world: World
    accessibility: Mapping[str | None, frozenset[tuple[World, World]]]
    domains: Mapping[tuple[World, str], frozenset[Element]]
    functions: Mapping[tuple[str, World], Mapping[tuple[Element, ...], Element]] = field(
        default_factory=dict
    )
    predicates: Mapping[tuple[str, World], frozenset[tuple[Element, ...]]] = field(
        default_factory=dict
    )

    def __post_init__(self) -> None:
        if not self.worlds:
            raise InterpretationError("a Kripke model needs at least one world")
        if len(set(self.worlds)) != len(self.worlds):
            raise InterpretationError("duplicate world names")
        ws = set(self.worlds)
        if self.local_world not in ws:
            raise InterpretationError(f"local world {self.local_world} is not a world")
        for idx, rel in self.accessibility.items():
            for u, v in rel:
                if u not in ws or v not in ws:
                    raise InterpretationError(f"accessibility pair ({u},{v}) outside the worlds")
        for (w, sort), dom in self.domains.items():
            if w not in ws:
                raise InterpretationError(f"domain for unknown world {w}")
            if not dom:
                raise InterpretationError(f"empty domain for {sort} in world {w}")

    @property
    def sorts(self) -> frozenset[str]:
        return frozenset(s for _, s in self.domains)

    def domain(self, w: World, sort: str) -> frozenset[Element]:
        try:
            return self.domains[(w, sort)]
        except KeyError:
            raise InterpretationError(f"no domain for sort {sort} in world {w}") from None

    def union_domain(self, sort: str) -> frozenset[Element]:
        out: set[Element] = set()
        for w in self.worlds:
            out |= self.domains.get((w, sort), frozenset())
        return frozenset(out)

    def relation(self, index: str | None) -> frozenset[tuple[World, World]]:
        try:
            return self.accessibility[index]
        except KeyError:
            shown = "mono-modal" if index is None else index
            raise InterpretationError(f"model has no accessibility relation for index {shown}") from None

    def successors(self, index: str | None, w: World) -> list[World]:
        rel = self.relation(index)
        return [v for v in self.worlds if (w, v) in rel]

    def extension(self, predicate: str, w: World) -> frozenset[tuple[Element, ...]]:
        return self.predicates.get((predicate, w), frozenset())

    def table(self, function: str, w: World) -> Mapping[tuple[Element, ...], Element]:
        try:
            return self.functions[(function, w)]
        except KeyError:
            raise InterpretationError(f"no interpretation of {function} in world {w}") from None

    def rename(self, worlds: Mapping[World, World], elements: Mapping[Element, Element]) -> FiniteKripkeModel:
        """An isomorphic copy under the given world and element renamings."""
        rw = lambda w: worlds.get(w, w)  # noqa: E731
        re_ = lambda e: elements.get(e, e)  # noqa: E731
        return FiniteKripkeModel(
            tuple(rw(w) for w in self.worlds),
            rw(self.local_world),
            {i: frozenset((rw(u), rw(v)) for u, v in r) for i, r in self.accessibility.items()},
            {(rw(w), s): frozenset(re_(e) for e in d) for (w, s), d in self.domains.items()},
            {
                (f, rw(w)): {tuple(re_(a) for a in k): re_(v) for k, v in t.items()}
                for (f, w), t in self.functions.items()
            },
            {
                (p, rw(w)): frozenset(tuple(re_(a) for a in tup) for tup in ext)
                for (p, w), ext in self.predicates.items()
            },
        )

    def describe(self) -> list[str]:
        lines = [f"worlds: {', '.join(self.worlds)} (local {self.local_world})"]
        for idx in sorted(self.accessibility, key=lambda i: (i is not None, i or "")):
            pairs = " ".join(f"{u}->{v}" for u, v in sorted(self.accessibility[idx]))
            lines.append(f"access{'' if idx is None else ' ' + idx}: {pairs or '(none)'}")
        for (w, s) in sorted(self.domains):
            lines.append(f"D({w},{s}) = {{{', '.join(sorted(self.domains[(w, s)]))}}}")
        return lines
