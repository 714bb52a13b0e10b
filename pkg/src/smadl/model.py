"""Core domain types for SMADL networks.

Pure data: source spans, diagnostics, the abstract syntax of a network
description, and the four-class taxonomy lattice. Everything here is an
immutable value; construction order is preserved in tuple fields so the
formatter can reproduce source order.
"""

from dataclasses import dataclass, field
from enum import Enum


@dataclass(frozen=True)
class SourceSpan:
    """Half-open text region, 1-based lines and columns, end exclusive."""

    start_line: int
    start_col: int
    end_line: int
    end_col: int

    def __str__(self) -> str:
        return f"{self.start_line}:{self.start_col}"


# Placeholder for values built in memory rather than parsed from text.
EMPTY_SPAN = SourceSpan(1, 1, 1, 1)


class Severity(Enum):
    ERROR = "error"
    WARNING = "warning"
    NOTE = "note"

    def __str__(self) -> str:
        return self.value


# The closed registry of diagnostic codes. Anything emitted by the lexer,
# parser, analyzer, or scenario loader must come from this set.
DIAGNOSTIC_CODES = frozenset(
    {
        "LEX_UNKNOWN_CHAR",
        "LEX_UNTERMINATED_STRING",
        "PARSE_UNEXPECTED_TOKEN",
        "PARSE_UNEXPECTED_EOF",
        "PARSE_DUPLICATE_SECTION",
        "SEM_DUPLICATE_MACHINE",
        "SEM_UNKNOWN_MACHINE",
        "SEM_SELF_RELATIONSHIP",
        "SEM_DUPLICATE_STATE",
        "SEM_DUPLICATE_PORT",
        "SEM_DUPLICATE_REQUEST",
        "SEM_DUPLICATE_RESPONSE",
        "SEM_BAD_CONSTRAINT",
        "SEM_UNCONSUMED_INTERFACE",
        "SEM_DEPENDENCY_CYCLE",
        "SCN_BAD_LINE",
        "SCN_UNKNOWN_MACHINE",
        "SCN_UNKNOWN_REQUEST",
        "SCN_UNKNOWN_STATE",
        "SCN_NO_RELATIONSHIP",
    }
)


@dataclass(frozen=True)
class Diagnostic:
    """A finding attached to a source region."""

    severity: Severity
    code: str
    message: str
    span: SourceSpan

    def __post_init__(self) -> None:
        if self.code not in DIAGNOSTIC_CODES:
            raise ValueError(f"unknown diagnostic code: {self.code}")

    @property
    def is_error(self) -> bool:
        return self.severity is Severity.ERROR


def has_errors(diagnostics) -> bool:
    return any(d.is_error for d in diagnostics)


# ---------------------------------------------------------------------------
# Abstract syntax
# ---------------------------------------------------------------------------
#
# Spans never participate in equality: two values are structurally equal when
# they describe the same network, regardless of where they were parsed from.


@dataclass(frozen=True)
class SemanticType:
    """A named data type, optionally an array of it (``int[]``)."""

    base: str
    is_array: bool = False

    def __str__(self) -> str:
        return self.base + "[]" if self.is_array else self.base


class Direction(Enum):
    INPUT = "Input"
    OUTPUT = "Output"


@dataclass(frozen=True)
class PortSpec:
    name: str
    data_type: SemanticType
    direction: Direction
    span: SourceSpan = field(default=EMPTY_SPAN, compare=False)


class PropertyForm(Enum):
    ASSIGNMENT_STRING = "assignmentString"
    ASSIGNMENT_NUMBER = "assignmentNumber"
    TYPED_DECLARATION = "typedDeclaration"
    COMPARISON = "comparison"


COMPARISON_OPERATORS = ("<", "<=", ">", ">=", "==", "!=")


@dataclass(frozen=True)
class PropertyEntry:
    """One property: an assignment, a typed declaration, or a comparison.

    ``value`` holds a str for string assignments, an int/float for number
    assignments and comparisons, and a SemanticType for typed declarations.
    A comparison additionally needs an operator and a numeric value; that
    invariant is representable here and enforced by the analyzer.
    """

    key: str
    form: PropertyForm
    value: str | int | float | SemanticType
    comparison_operator: str | None = None
    span: SourceSpan = field(default=EMPTY_SPAN, compare=False)

    @property
    def is_valid_comparison(self) -> bool:
        return (
            self.form is PropertyForm.COMPARISON
            and self.comparison_operator in COMPARISON_OPERATORS
            and isinstance(self.value, (int, float))
            and not isinstance(self.value, bool)
        )


@dataclass(frozen=True)
class ConstraintSpec:
    name: str
    properties: tuple[PropertyEntry, ...] = ()
    span: SourceSpan = field(default=EMPTY_SPAN, compare=False)


@dataclass(frozen=True)
class RequestSpec:
    """Signature of one remotely callable service."""

    name: str
    parameters: tuple[PortSpec, ...] = ()
    responses: tuple[tuple[str, SemanticType], ...] = ()
    properties: tuple[PropertyEntry, ...] = ()
    span: SourceSpan = field(default=EMPTY_SPAN, compare=False)


@dataclass(frozen=True)
class WrapperInterfaceSpec:
    name: str
    requests: tuple[RequestSpec, ...] = ()
    span: SourceSpan = field(default=EMPTY_SPAN, compare=False)


@dataclass(frozen=True)
class ProcessingUnitSpec:
    name: str
    inputs: tuple[PortSpec, ...] = ()
    outputs: tuple[PortSpec, ...] = ()
    states: tuple[str, ...] = ()
    span: SourceSpan = field(default=EMPTY_SPAN, compare=False)


@dataclass(frozen=True)
class RelationshipSpec:
    """Directed consumes edge: ``(from to to)`` means `from` calls `to`."""

    from_machine: str
    to_machine: str
    connection_settings: tuple[PropertyEntry, ...] = ()
    span: SourceSpan = field(default=EMPTY_SPAN, compare=False)


@dataclass(frozen=True)
class MachineSpec:
    name: str
    processing_unit: ProcessingUnitSpec | None = None
    constraints: tuple[ConstraintSpec, ...] = ()
    wrapper_interface: WrapperInterfaceSpec | None = None
    span: SourceSpan = field(default=EMPTY_SPAN, compare=False)

    @property
    def states(self) -> tuple[str, ...]:
        return self.processing_unit.states if self.processing_unit else ()

    @property
    def requests(self) -> tuple[RequestSpec, ...]:
        return self.wrapper_interface.requests if self.wrapper_interface else ()


@dataclass(frozen=True)
class NetworkSpec:
    name: str
    machines: tuple[MachineSpec, ...] = ()
    relationships: tuple[RelationshipSpec, ...] = ()
    span: SourceSpan = field(default=EMPTY_SPAN, compare=False)


# ---------------------------------------------------------------------------
# Taxonomy lattice
# ---------------------------------------------------------------------------


class TaxonomyClass(Enum):
    """Interaction classes, ordered as a diamond: Isolated at the bottom,
    Prosumer at the top, Consumer and Provider incomparable in between."""

    ISOLATED = "Isolated"
    CONSUMER = "Consumer"
    PROVIDER = "Provider"
    PROSUMER = "Prosumer"

    def __str__(self) -> str:
        return self.value


# Each class encoded as (consumes, provides) capability bits; the diamond
# order is then plain bitwise inclusion.
_CONSUMES = 1
_PROVIDES = 2

_BITS = {
    TaxonomyClass.ISOLATED: 0,
    TaxonomyClass.CONSUMER: _CONSUMES,
    TaxonomyClass.PROVIDER: _PROVIDES,
    TaxonomyClass.PROSUMER: _CONSUMES | _PROVIDES,
}

_FROM_BITS = {bits: cls for cls, bits in _BITS.items()}


def class_from_capabilities(consumes: bool, provides: bool) -> TaxonomyClass:
    return _FROM_BITS[(_CONSUMES if consumes else 0) | (_PROVIDES if provides else 0)]


def class_leq(a: TaxonomyClass, b: TaxonomyClass) -> bool:
    """Partial order: a <= b iff every capability of a is one of b."""
    return _BITS[a] & _BITS[b] == _BITS[a]


def class_join(a: TaxonomyClass, b: TaxonomyClass) -> TaxonomyClass:
    """Least upper bound in the diamond."""
    return _FROM_BITS[_BITS[a] | _BITS[b]]


def class_meet(a: TaxonomyClass, b: TaxonomyClass) -> TaxonomyClass:
    """Greatest lower bound in the diamond."""
    return _FROM_BITS[_BITS[a] & _BITS[b]]
