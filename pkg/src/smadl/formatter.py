"""Canonical pretty-printer for network descriptions.

The output is deterministic: 4-space indentation, one declaration per
line, ``;`` after every member declaration, braces on the opening line.
Parsing the output yields a network structurally equal to the input, and
formatting is idempotent. Machine members are emitted in canonical order
(processing unit, constraints, wrapper interface); relationship blocks
are gathered at network level.

String values must not contain newlines and numeric values must be plain
numerals (no exponent notation): nothing else survives the round trip
through the lexer.
"""

import re

from .lexer import KEYWORDS
from .model import (
    MachineSpec,
    NetworkSpec,
    PortSpec,
    PropertyEntry,
    PropertyForm,
    RelationshipSpec,
    RequestSpec,
    SemanticType,
)

_INDENT = "    "
_IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")


def _quote(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def _state_name(name: str) -> str:
    if _IDENT_RE.match(name) and name not in KEYWORDS and name != "to":
        return name
    return _quote(name)


def _number(value: int | float) -> str:
    return repr(value) if isinstance(value, float) else str(value)


def _type(data_type: SemanticType) -> str:
    return data_type.base + ("[]" if data_type.is_array else "")


def format_property(prop: PropertyEntry) -> str:
    if prop.form is PropertyForm.ASSIGNMENT_STRING:
        return f"{prop.key} = {_quote(prop.value)}"
    if prop.form is PropertyForm.ASSIGNMENT_NUMBER:
        return f"{prop.key} = {_number(prop.value)}"
    if prop.form is PropertyForm.TYPED_DECLARATION:
        return f"{prop.key}: {_type(prop.value)}"
    return f"{prop.key} {prop.comparison_operator} {_number(prop.value)}"


def _port(port: PortSpec) -> str:
    return f"{port.direction.value} {port.name}: {_type(port.data_type)};"


class _Writer:
    def __init__(self) -> None:
        self.lines: list[str] = []

    def line(self, depth: int, text: str) -> None:
        self.lines.append(_INDENT * depth + text)

    def text(self) -> str:
        return "\n".join(self.lines) + "\n"


def _write_request(w: _Writer, depth: int, request: RequestSpec) -> None:
    w.line(depth, f"Request {request.name} = {{")
    if request.parameters:
        params = "; ".join(f"{p.name}: {_type(p.data_type)}" for p in request.parameters)
        w.line(depth + 1, f"Parameters {{{params}}};")
    for name, rtype in request.responses:
        w.line(depth + 1, f"Response {name}: {_type(rtype)};")
    for prop in request.properties:
        w.line(depth + 1, f"Property {format_property(prop)};")
    w.line(depth, "};")


def _write_machine(w: _Writer, depth: int, machine: MachineSpec) -> None:
    w.line(depth, f"SocialMachine {machine.name} = {{")
    inner = depth + 1
    unit = machine.processing_unit
    if unit is not None:
        w.line(inner, f"ProcessingUnit {unit.name} = {{")
        for port in unit.inputs:
            w.line(inner + 1, _port(port))
        for port in unit.outputs:
            w.line(inner + 1, _port(port))
        if unit.states:
            w.line(inner + 1, "States {" + "; ".join(_state_name(s) for s in unit.states) + "};")
        w.line(inner, "};")
    for constraint in machine.constraints:
        w.line(inner, f"Constraint {constraint.name} = {{")
        for prop in constraint.properties:
            w.line(inner + 1, f"Property {format_property(prop)};")
        w.line(inner, "};")
    if machine.wrapper_interface is not None:
        w.line(inner, f"WrapperInterface {machine.wrapper_interface.name} = {{")
        for request in machine.wrapper_interface.requests:
            _write_request(w, inner + 1, request)
        w.line(inner, "};")
    w.line(depth, "}")


def _write_relationship(w: _Writer, depth: int, rel: RelationshipSpec) -> None:
    w.line(depth, f"({rel.from_machine} to {rel.to_machine}) = {{")
    if rel.connection_settings:
        w.line(depth + 1, "ConnectionSettings {")
        for prop in rel.connection_settings:
            w.line(depth + 2, f"{format_property(prop)};")
        w.line(depth + 1, "};")
    w.line(depth, "};")


def format_network(network: NetworkSpec) -> str:
    """Render a network as canonical SMADL text."""
    w = _Writer()
    w.line(0, f"SocialMachineNetwork {network.name} = {{")
    for machine in network.machines:
        _write_machine(w, 1, machine)
    if network.relationships:
        w.line(1, "Relationships {")
        for rel in network.relationships:
            _write_relationship(w, 2, rel)
        w.line(1, "}")
    w.line(0, "}")
    return w.text()
