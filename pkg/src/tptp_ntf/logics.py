"""Modal logic specifications: families, systems, axiom schemes, frame conditions."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Mapping

from .errors import LogicSpecError
from .syntax import ast as A

MONO = None  # the index of the un-indexed {$box}/{$dia}


class ModalFamily(Enum):
    MODAL = ("$modal", "$box", "$dia")
    ALETHIC = ("$alethic_modal", "$necessary", "$possible")
    DEONTIC = ("$deontic_modal", "$obligatory", "$permissible")
    EPISTEMIC = ("$epistemic_modal", "$knows", "$canKnow")
    DOXASTIC = ("$doxastic_modal", "$believes", "$canBelieve")

    def __init__(self, logic: str, box: str, dia: str):
        self.logic = logic
        self.box = box
        self.dia = dia

    @classmethod
    def from_logic(cls, name: str) -> ModalFamily:
        for fam in cls:
            if fam.logic == name:
                return fam
        raise LogicSpecError(f"unsupported logic {name}")


def _box(phi: A.Formula) -> A.Formula:
    return A.NonClassicalApp(A.NCConnective("$box"), (phi,))


def _dia(phi: A.Formula) -> A.Formula:
    return A.NonClassicalApp(A.NCConnective("$dia"), (phi,))


PHI = A.Atom("phi")
PSI = A.Atom("psi")


class FrameCondition(Enum):
    REFLEXIVE = "reflexive"
    SYMMETRIC = "symmetric"
    SERIAL = "serial"
    TRANSITIVE = "transitive"
    EUCLIDEAN = "euclidean"
    AT_MOST_ONE_SUCCESSOR = "at-most-one-successor"
    SHIFT_REFLEXIVE = "shift-reflexive"
    DENSE = "dense"
    CONFLUENT = "confluent"

    def holds(self, worlds: Iterable, rel: Iterable[tuple]) -> bool:
        """Decide the condition on a finite relation by direct evaluation."""
        W = list(worlds)
        R = set(rel)
        succ = {w: {v for v in W if (w, v) in R} for w in W}
        if self is FrameCondition.REFLEXIVE:
            return all((w, w) in R for w in W)
        if self is FrameCondition.SYMMETRIC:
            return all((v, w) in R for w, v in R)
        if self is FrameCondition.SERIAL:
            return all(succ[w] for w in W)
        if self is FrameCondition.TRANSITIVE:
            return all(succ[v] <= succ[w] for w in W for v in succ[w])
        if self is FrameCondition.EUCLIDEAN:
            return all(v in succ[u] for w in W for u in succ[w] for v in succ[w])
        if self is FrameCondition.AT_MOST_ONE_SUCCESSOR:
            return all(len(succ[w]) <= 1 for w in W)
        if self is FrameCondition.SHIFT_REFLEXIVE:
            return all((v, v) in R for w in W for v in succ[w])
        if self is FrameCondition.DENSE:
            return all(any(v in succ[u] for u in succ[w]) for w in W for v in succ[w])
        # confluent
        return all(
            succ[u] & succ[v] for w in W for u in succ[w] for v in succ[w]
        )


class ModalAxiom(Enum):
    K = "K"
    M = "M"
    B = "B"
    D = "D"
    FOUR = "4"
    FIVE = "5"
    CD = "CD"
    BOX_M = "BoxM"
    C4 = "C4"
    C = "C"

    @property
    def tptp_name(self) -> str:
        return f"$modal_axiom_{self.value}"

    @classmethod
    def from_name(cls, name: str) -> ModalAxiom:
        key = name.removeprefix("$modal_axiom_")
        for ax in cls:
            if ax.value == key or (key == "T" and ax is ModalAxiom.M):
                return ax
        raise LogicSpecError(f"unknown modal axiom {name}")

    @property
    def scheme(self) -> A.Formula:
        """The axiom scheme over metavariables ``phi`` and ``psi``."""
        return _SCHEMES[self]

    @property
    def frame_condition(self) -> FrameCondition | None:
        return _CONDITIONS[self]


_SCHEMES = {
    ModalAxiom.K: A.Implies(_box(A.Implies(PHI, PSI)), A.Implies(_box(PHI), _box(PSI))),
    ModalAxiom.M: A.Implies(_box(PHI), PHI),
    ModalAxiom.B: A.Implies(PHI, _box(_dia(PHI))),
    ModalAxiom.D: A.Implies(_box(PHI), _dia(PHI)),
    ModalAxiom.FOUR: A.Implies(_box(PHI), _box(_box(PHI))),
    ModalAxiom.FIVE: A.Implies(_dia(PHI), _box(_dia(PHI))),
    ModalAxiom.CD: A.Implies(_dia(PHI), _box(PHI)),
    ModalAxiom.BOX_M: _box(A.Implies(_box(PHI), PHI)),
    ModalAxiom.C4: A.Implies(_box(_box(PHI)), _box(PHI)),
    ModalAxiom.C: A.Implies(_dia(_box(PHI)), _box(_dia(PHI))),
}

_CONDITIONS = {
    ModalAxiom.K: None,
    ModalAxiom.M: FrameCondition.REFLEXIVE,
    ModalAxiom.B: FrameCondition.SYMMETRIC,
    ModalAxiom.D: FrameCondition.SERIAL,
    ModalAxiom.FOUR: FrameCondition.TRANSITIVE,
    ModalAxiom.FIVE: FrameCondition.EUCLIDEAN,
    ModalAxiom.CD: FrameCondition.AT_MOST_ONE_SUCCESSOR,
    ModalAxiom.BOX_M: FrameCondition.SHIFT_REFLEXIVE,
    ModalAxiom.C4: FrameCondition.DENSE,
    ModalAxiom.C: FrameCondition.CONFLUENT,
}

_K, _M, _B, _D, _4, _5 = (ModalAxiom.K, ModalAxiom.M, ModalAxiom.B, ModalAxiom.D,
                          ModalAxiom.FOUR, ModalAxiom.FIVE)

SYSTEMS: Mapping[str, frozenset[ModalAxiom]] = {
    "K": frozenset({_K}),
    "KB": frozenset({_K, _B}),
    "K4": frozenset({_K, _4}),
    "K5": frozenset({_K, _5}),
    "K45": frozenset({_K, _4, _5}),
    "KB5": frozenset({_K, _B, _5}),
    "D": frozenset({_K, _D}),
    "DB": frozenset({_K, _D, _B}),
    "D4": frozenset({_K, _D, _4}),
    "D5": frozenset({_K, _D, _5}),
    "D45": frozenset({_K, _D, _4, _5}),
    "M": frozenset({_K, _M}),
    "B": frozenset({_K, _B}),
    "S4": frozenset({_K, _M, _4}),
    "S5": frozenset({_K, _M, _B, _5}),
}


def system_axioms(name: str) -> frozenset[ModalAxiom]:
    key = name.removeprefix("$modal_system_")
    if key == "T":
        key = "M"
    try:
        return SYSTEMS[key]
    except KeyError:
        raise LogicSpecError(f"unknown modal system {name}") from None


def frame_conditions(axioms: Iterable[ModalAxiom]) -> frozenset[FrameCondition]:
    return frozenset(c for a in axioms if (c := a.frame_condition) is not None)


DOMAINS = ("$constant", "$varying", "$cumulative", "$decreasing")
DESIGNATIONS = ("$rigid", "$flexible")
TERMS = ("$global", "$local")
PROPERTIES = ("$domains", "$designation", "$terms", "$modalities")


@dataclass(frozen=True)
class NormalizedModalLogic:
    family: ModalFamily
    domains: str
    designation: str
    terms: str
    default: frozenset[ModalAxiom] | None
    per_index: Mapping[str, frozenset[ModalAxiom]] = field(default_factory=dict)

    def axioms_for(self, index: str | None) -> frozenset[ModalAxiom]:
        if index is not None and index in self.per_index:
            return self.per_index[index]
        if self.default is None:
            shown = "mono-modal" if index is None else index
            raise LogicSpecError(f"unspecified modality for index {shown}")
        return self.default

    def frame_conditions(self, index: str | None) -> frozenset[FrameCondition]:
        return frame_conditions(self.axioms_for(index))

    @property
    def constant_domains(self) -> bool:
        return self.domains == "$constant"

    @property
    def rigid(self) -> bool:
        return self.designation == "$rigid"

    @property
    def local_terms(self) -> bool:
        return self.terms == "$local"

    def to_specification(self) -> A.LogicSpecification:
        entries: list[A.SpecEntry] = []
        if self.default is not None:
            entries.append(A.SpecEntry(None, _axioms_value(self.default)))
        for idx in sorted(self.per_index):
            entries.append(A.SpecEntry(A.NCConnective("$box", idx), _axioms_value(self.per_index[idx])))
        if len(entries) == 1 and entries[0].key is None:
            modalities = entries[0].value
        else:
            modalities = A.SpecList(tuple(entries))
        props = (
            A.SpecEntry("$domains", A.Atom(self.domains)),
            A.SpecEntry("$designation", A.Atom(self.designation)),
            A.SpecEntry("$terms", A.Atom(self.terms)),
            A.SpecEntry("$modalities", modalities),
        )
        return A.LogicSpecification(self.family.logic, props)

    def describe(self) -> list[str]:
        lines = [
            f"logic: {self.family.logic} ({self.family.box}/{self.family.dia})",
            f"domains: {self.domains}",
            f"designation: {self.designation}",
            f"terms: {self.terms}",
        ]
        if self.default is not None:
            lines.append(f"default: {format_axioms(self.default)}")
        for idx in sorted(self.per_index):
            lines.append(f"{idx}: {format_axioms(self.per_index[idx])}")
        return lines


_AXIOM_ORDER = list(ModalAxiom)


def format_axioms(axioms: Iterable[ModalAxiom]) -> str:
    ordered = sorted(axioms, key=_AXIOM_ORDER.index)
    return "{" + ",".join(a.value for a in ordered) + "}"


def _axioms_value(axioms: frozenset[ModalAxiom]) -> A.Formula | A.SpecList:
    for name, axs in SYSTEMS.items():
        if axs == axioms:
            return A.Atom(f"$modal_system_{name}")
    ordered = sorted(axioms, key=_AXIOM_ORDER.index)
    return A.SpecList(tuple(A.SpecEntry(None, A.Atom(a.tptp_name)) for a in ordered))


def _word(value: A.SpecList | A.Formula, prop: str) -> str:
    if isinstance(value, A.Atom) and not value.args:
        return value.predicate
    raise LogicSpecError(f"value of {prop} must be a defined constant")


def _mono_spec(value: A.SpecList | A.Formula) -> frozenset[ModalAxiom]:
    if isinstance(value, A.Atom) and not value.args:
        name = value.predicate
        if name.startswith("$modal_system_"):
            return system_axioms(name)
        if name.startswith("$modal_axiom_"):
            return frozenset({ModalAxiom.K, ModalAxiom.from_name(name)})
        raise LogicSpecError(f"expected a modal system or axiom list, got {name}")
    if isinstance(value, A.SpecList):
        if not value.entries:
            raise LogicSpecError("empty axiom list")
        axioms = {ModalAxiom.K}
        for e in value.entries:
            if e.key is not None or not isinstance(e.value, A.Atom) or e.value.args:
                raise LogicSpecError("axiom lists contain only $modal_axiom_X names")
            if not e.value.predicate.startswith("$modal_axiom_"):
                raise LogicSpecError(f"unknown modal axiom {e.value.predicate}")
            axioms.add(ModalAxiom.from_name(e.value.predicate))
        return frozenset(axioms)
    raise LogicSpecError("malformed modalities specification")


def _modal_key(c: A.NCConnective, family: ModalFamily) -> str | None:
    names = {"$box", "$dia", family.box, family.dia}
    if c.name not in names:
        raise LogicSpecError(f"{c.name} is not a modal connective of {family.logic}")
    if c.params:
        raise LogicSpecError(f"modal connective key {c.name} takes no parameters")
    return c.index


def _modalities(value: A.SpecList | A.Formula, family: ModalFamily):
    is_multi = isinstance(value, A.SpecList) and any(e.key is not None for e in value.entries)
    if not is_multi:
        return _mono_spec(value), {}
    default: frozenset[ModalAxiom] | None = None
    per_index: dict[str, frozenset[ModalAxiom]] = {}
    for pos, e in enumerate(value.entries):
        if e.key is None:
            if pos != 0:
                raise LogicSpecError("only the first modalities entry may omit its key")
            default = _mono_spec(e.value)
            continue
        if not isinstance(e.key, A.NCConnective):
            raise LogicSpecError(f"unexpected key {e.key} in modalities")
        idx = _modal_key(e.key, family)
        if idx is None:
            if default is not None:
                raise LogicSpecError("duplicate default modality")
            default = _mono_spec(e.value)
        elif idx in per_index:
            raise LogicSpecError(f"duplicate modality for index {idx}")
        else:
            per_index[idx] = _mono_spec(e.value)
    return default, per_index


def normalize_spec(spec: A.LogicSpecification) -> NormalizedModalLogic:
    if spec.logic.startswith("$$"):
        raise LogicSpecError(f"unsupported logic {spec.logic}")
    family = ModalFamily.from_logic(spec.logic)
    props: dict[str, A.SpecList | A.Formula] = {}
    for e in spec.properties:
        if not isinstance(e.key, str):
            raise LogicSpecError("logic properties must be keyed by $property ==")
        if e.key.startswith("$$"):
            continue  # system-specific extensions carry no meaning here
        if e.key not in PROPERTIES:
            raise LogicSpecError(f"unknown property {e.key}")
        if e.key in props:
            raise LogicSpecError(f"duplicate property {e.key}")
        props[e.key] = e.value
    for prop in PROPERTIES:
        if prop not in props:
            raise LogicSpecError(f"missing {prop}")
    allowed = {"$domains": DOMAINS, "$designation": DESIGNATIONS, "$terms": TERMS}
    values = {}
    for prop, options in allowed.items():
        v = _word(props[prop], prop)
        if v not in options:
            raise LogicSpecError(f"invalid value {v} for {prop}")
        values[prop] = v
    default, per_index = _modalities(props["$modalities"], family)
    return NormalizedModalLogic(
        family, values["$domains"], values["$designation"], values["$terms"], default, per_index
    )


def logic_of(problem: A.Problem, required: bool = False) -> NormalizedModalLogic | None:
    """Normalize the problem's logic statement.

    With *required*, or when the problem uses non-classical connectives, a
    missing logic statement is an error.
    """
    stmt = problem.logic_statement
    if stmt is None:
        if required or _uses_connectives(problem):
            raise LogicSpecError("non-classical connectives used without a logic specification")
        return None
    return normalize_spec(stmt.body)


def _uses_connectives(problem: A.Problem) -> bool:
    for s in problem.statements:
        if isinstance(s.body, (A.TypeDeclaration, A.LogicSpecification, A.RawFormula)):
            continue
        if any(isinstance(n, A.NonClassicalApp) for n in A.subformulas(s.body)):
            return True
    return False


@dataclass(frozen=True)
class ModalOperator:
    kind: str  # "box" or "dia"
    index: str | None
    axioms: frozenset[ModalAxiom]

    @property
    def is_box(self) -> bool:
        return self.kind == "box"


@dataclass(frozen=True)
class Foreign:
    name: str


def connective_kind(c: A.NCConnective, logic: NormalizedModalLogic) -> ModalOperator | Foreign:
    fam = logic.family
    if c.name in ("$box", fam.box):
        kind = "box"
    elif c.name in ("$dia", fam.dia):
        kind = "dia"
    else:
        return Foreign(c.name)
    if c.params:
        raise LogicSpecError(f"parameters on modal connective {c.name} are not supported")
    return ModalOperator(kind, c.index, logic.axioms_for(c.index))


def enumerate_relations(n: int) -> Iterable[frozenset[tuple[int, int]]]:
    """All binary relations on ``range(n)``."""
    pairs = list(itertools.product(range(n), repeat=2))
    for bits in range(1 << len(pairs)):
        yield frozenset(p for i, p in enumerate(pairs) if bits >> i & 1)
