"""Recursive-descent parser for SMADL documents.

Grammar (permissive about separators, since real-world sources are
inconsistent about ``;`` placement):

    network        := "SocialMachineNetwork" IDENT "=" "{" (machine | relationships)* "}"
    machine        := "SocialMachine" IDENT "=" "{" (processingUnit | constraint
                                                     | wrapperInterface | relationships)* "}"
    processingUnit := "ProcessingUnit" IDENT "=" "{" (port | statesBlock)* "}"
    port           := ("Input" | "Output") IDENT ":" type
    statesBlock    := "States" "{" stateName ((";" | ",") stateName)* "}"
    stateName      := IDENT | STRING
    constraint     := "Constraint" IDENT "=" "{" property* "}"
    property       := "Property" IDENT ("=" (STRING | NUMBER) | RELOP NUMBER | ":" type)
    wrapperInterface := "WrapperInterface" IDENT "=" "{" request* "}"
    request        := "Request" IDENT "=" "{" ("Parameters" "{" paramList "}"
                                               | response | property)* "}"
    response       := "Response" IDENT ":" type
    relationships  := "Relationships" "{" relationship* "}"
    relationship   := "(" IDENT "to" IDENT ")" "=" "{" connectionSettings? "}"
    connectionSettings := "ConnectionSettings" "{" setting* "}"
    setting        := "Property"? IDENT ("=" (STRING | NUMBER) | RELOP NUMBER | ":" type)
    type           := IDENT ("[" "]")?

Semicolons are accepted (and ignored) after any declaration or block.
Relationship blocks may sit at network level or inside a machine; either
way the edges land in ``NetworkSpec.relationships`` in source order.

On a syntax error the parser reports a diagnostic and resynchronizes at
the next ``SocialMachine`` or ``Relationships`` keyword, so one pass
surfaces one error per malformed machine. A document with any
error-severity diagnostic yields ``network=None``: partial parses are
never presented as success.
"""

from dataclasses import dataclass

from .lexer import Token, TokenKind, tokenize
from .model import (
    COMPARISON_OPERATORS,
    ConstraintSpec,
    Diagnostic,
    Direction,
    MachineSpec,
    NetworkSpec,
    PortSpec,
    ProcessingUnitSpec,
    PropertyEntry,
    PropertyForm,
    RelationshipSpec,
    RequestSpec,
    SemanticType,
    Severity,
    SourceSpan,
    WrapperInterfaceSpec,
    has_errors,
)


@dataclass(frozen=True)
class ParseResult:
    network: NetworkSpec | None
    diagnostics: list[Diagnostic]

    @property
    def ok(self) -> bool:
        return self.network is not None


class _ParseError(Exception):
    def __init__(self, diagnostic: Diagnostic):
        super().__init__(diagnostic.message)
        self.diagnostic = diagnostic


def _end_span(source: str) -> SourceSpan:
    lines = source.split("\n")
    line, col = len(lines), len(lines[-1]) + 1
    return SourceSpan(line, col, line, col)


def _join(start: SourceSpan, end: SourceSpan) -> SourceSpan:
    return SourceSpan(start.start_line, start.start_col, end.end_line, end.end_col)


class _Parser:
    def __init__(self, tokens: list[Token], diagnostics: list[Diagnostic], eof_span: SourceSpan):
        self.tokens = tokens
        self.pos = 0
        self.diagnostics = diagnostics
        self.eof_span = eof_span

    # -- token access -------------------------------------------------------

    @property
    def eof(self) -> bool:
        return self.pos >= len(self.tokens)

    def peek(self) -> Token | None:
        return self.tokens[self.pos] if not self.eof else None

    def at_punct(self, lexeme: str) -> bool:
        tok = self.peek()
        return tok is not None and tok.is_punct(lexeme)

    def at_keyword(self, word: str) -> bool:
        tok = self.peek()
        return tok is not None and tok.is_keyword(word)

    def advance(self) -> Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def here(self) -> SourceSpan:
        tok = self.peek()
        return tok.span if tok else self.eof_span

    # -- diagnostics --------------------------------------------------------

    def fail_eof(self, expected: str) -> _ParseError:
        return _ParseError(
            Diagnostic(
                Severity.ERROR,
                "PARSE_UNEXPECTED_EOF",
                f"unexpected end of input, expected {expected}",
                self.eof_span,
            )
        )

    def fail_here(self, expected: str) -> _ParseError:
        tok = self.peek()
        if tok is None:
            return self.fail_eof(expected)
        return _ParseError(
            Diagnostic(
                Severity.ERROR,
                "PARSE_UNEXPECTED_TOKEN",
                f"unexpected {tok.kind.value} {tok.lexeme!r}, expected {expected}",
                tok.span,
            )
        )

    def report(self, diagnostic: Diagnostic) -> None:
        # Collapse immediately repeated EOF reports from nested recoveries.
        if (
            diagnostic.code == "PARSE_UNEXPECTED_EOF"
            and self.diagnostics
            and self.diagnostics[-1].code == "PARSE_UNEXPECTED_EOF"
        ):
            return
        self.diagnostics.append(diagnostic)

    # -- primitive expectations ---------------------------------------------

    def expect_punct(self, lexeme: str) -> Token:
        if self.at_punct(lexeme):
            return self.advance()
        raise self.fail_here(f"'{lexeme}'")

    def expect_keyword(self, word: str) -> Token:
        if self.at_keyword(word):
            return self.advance()
        raise self.fail_here(f"'{word}'")

    def expect_ident(self, what: str = "an identifier") -> Token:
        tok = self.peek()
        if tok is not None and tok.kind is TokenKind.IDENT:
            return self.advance()
        raise self.fail_here(what)

    def skip_semicolons(self) -> None:
        while self.at_punct(";"):
            self.advance()

    # -- grammar ------------------------------------------------------------

    def parse_network(self) -> NetworkSpec:
        start = self.expect_keyword("SocialMachineNetwork")
        name = self.expect_ident("a network name")
        self.expect_punct("=")
        self.expect_punct("{")

        machines: list[MachineSpec] = []
        relationships: list[RelationshipSpec] = []
        while True:
            self.skip_semicolons()
            if self.at_punct("}"):
                break
            if self.eof:
                self.report(self.fail_eof("'}' closing the network").diagnostic)
                break
            try:
                if self.at_keyword("SocialMachine"):
                    machine, rels = self.parse_machine()
                    machines.append(machine)
                    relationships.extend(rels)
                elif self.at_keyword("Relationships"):
                    relationships.extend(self.parse_relationships())
                else:
                    raise self.fail_here("'SocialMachine', 'Relationships', or '}'")
            except _ParseError as err:
                self.report(err.diagnostic)
                self.synchronize()

        end = self.advance() if self.at_punct("}") else None
        self.skip_semicolons()
        if not self.eof:
            self.report(self.fail_here("end of input").diagnostic)
        return NetworkSpec(
            name=name.lexeme,
            machines=tuple(machines),
            relationships=tuple(relationships),
            span=_join(start.span, end.span if end else self.eof_span),
        )

    def synchronize(self) -> None:
        """Skip ahead to the next machine or relationships block at this level."""
        depth = 0
        while not self.eof:
            tok = self.peek()
            if depth == 0 and (tok.is_keyword("SocialMachine") or tok.is_keyword("Relationships")):
                return
            if tok.is_punct("{"):
                depth += 1
            elif tok.is_punct("}"):
                if depth == 0:
                    return
                depth -= 1
            self.advance()

    def parse_machine(self) -> tuple[MachineSpec, list[RelationshipSpec]]:
        start = self.expect_keyword("SocialMachine")
        name = self.expect_ident("a machine name")
        self.expect_punct("=")
        self.expect_punct("{")

        processing_unit: ProcessingUnitSpec | None = None
        constraints: list[ConstraintSpec] = []
        wrapper: WrapperInterfaceSpec | None = None
        relationships: list[RelationshipSpec] = []

        while True:
            self.skip_semicolons()
            if self.at_punct("}"):
                break
            if self.eof:
                raise self.fail_eof(f"'}}' closing machine '{name.lexeme}'")
            if self.at_keyword("ProcessingUnit"):
                unit = self.parse_processing_unit()
                if processing_unit is None:
                    processing_unit = unit
                else:
                    self.report(
                        Diagnostic(
                            Severity.ERROR,
                            "PARSE_DUPLICATE_SECTION",
                            f"machine '{name.lexeme}' already has a processing unit",
                            unit.span,
                        )
                    )
            elif self.at_keyword("Constraint"):
                constraints.append(self.parse_constraint())
            elif self.at_keyword("WrapperInterface"):
                iface = self.parse_wrapper_interface()
                if wrapper is None:
                    wrapper = iface
                else:
                    self.report(
                        Diagnostic(
                            Severity.ERROR,
                            "PARSE_DUPLICATE_SECTION",
                            f"machine '{name.lexeme}' already has a wrapper interface",
                            iface.span,
                        )
                    )
            elif self.at_keyword("Relationships"):
                relationships.extend(self.parse_relationships())
            else:
                raise self.fail_here(
                    "'ProcessingUnit', 'Constraint', 'WrapperInterface', 'Relationships', or '}'"
                )

        end = self.expect_punct("}")
        self.skip_semicolons()
        machine = MachineSpec(
            name=name.lexeme,
            processing_unit=processing_unit,
            constraints=tuple(constraints),
            wrapper_interface=wrapper,
            span=_join(start.span, end.span),
        )
        return machine, relationships

    def parse_processing_unit(self) -> ProcessingUnitSpec:
        start = self.expect_keyword("ProcessingUnit")
        name = self.expect_ident("a processing unit name")
        self.expect_punct("=")
        self.expect_punct("{")

        inputs: list[PortSpec] = []
        outputs: list[PortSpec] = []
        states: list[str] = []
        while True:
            self.skip_semicolons()
            if self.at_punct("}"):
                break
            if self.eof:
                raise self.fail_eof(f"'}}' closing processing unit '{name.lexeme}'")
            if self.at_keyword("Input"):
                inputs.append(self.parse_port(Direction.INPUT))
            elif self.at_keyword("Output"):
                outputs.append(self.parse_port(Direction.OUTPUT))
            elif self.at_keyword("States"):
                states.extend(self.parse_states_block())
            else:
                raise self.fail_here("'Input', 'Output', 'States', or '}'")

        end = self.expect_punct("}")
        self.skip_semicolons()
        return ProcessingUnitSpec(
            name=name.lexeme,
            inputs=tuple(inputs),
            outputs=tuple(outputs),
            states=tuple(states),
            span=_join(start.span, end.span),
        )

    def parse_port(self, direction: Direction) -> PortSpec:
        start = self.advance()  # Input | Output keyword
        name = self.expect_ident("a port name")
        self.expect_punct(":")
        data_type, type_end = self.parse_type()
        self.skip_semicolons()
        return PortSpec(
            name=name.lexeme,
            data_type=data_type,
            direction=direction,
            span=_join(start.span, type_end),
        )

    def parse_states_block(self) -> list[str]:
        self.expect_keyword("States")
        self.expect_punct("{")
        states: list[str] = []
        while True:
            while self.at_punct(";") or self.at_punct(","):
                self.advance()
            if self.at_punct("}"):
                break
            tok = self.peek()
            if tok is None:
                raise self.fail_eof("'}' closing the states block")
            if tok.kind in (TokenKind.IDENT, TokenKind.STRING):
                self.advance()
                states.append(str(tok.value))
            else:
                raise self.fail_here("a state name or '}'")
        self.expect_punct("}")
        self.skip_semicolons()
        return states

    def parse_constraint(self) -> ConstraintSpec:
        start = self.expect_keyword("Constraint")
        name = self.expect_ident("a constraint name")
        self.expect_punct("=")
        self.expect_punct("{")
        properties: list[PropertyEntry] = []
        while True:
            self.skip_semicolons()
            if self.at_punct("}"):
                break
            if self.eof:
                raise self.fail_eof(f"'}}' closing constraint '{name.lexeme}'")
            if self.at_keyword("Property"):
                self.advance()
                properties.append(self.parse_property_body())
            else:
                raise self.fail_here("'Property' or '}'")
        end = self.expect_punct("}")
        self.skip_semicolons()
        return ConstraintSpec(
            name=name.lexeme, properties=tuple(properties), span=_join(start.span, end.span)
        )

    def parse_property_body(self) -> PropertyEntry:
        key = self.expect_ident("a property name")
        tok = self.peek()
        if tok is None:
            raise self.fail_eof("'=', ':', or a comparison operator")

        if tok.is_punct("="):
            self.advance()
            value = self.peek()
            if value is not None and value.kind is TokenKind.STRING:
                self.advance()
                form, val = PropertyForm.ASSIGNMENT_STRING, str(value.value)
            elif value is not None and value.kind is TokenKind.NUMBER:
                self.advance()
                form, val = PropertyForm.ASSIGNMENT_NUMBER, value.value
            else:
                raise self.fail_here("a string or number literal")
            self.skip_semicolons()
            return PropertyEntry(key.lexeme, form, val, span=_join(key.span, value.span))

        if tok.is_punct(":"):
            self.advance()
            data_type, type_end = self.parse_type()
            self.skip_semicolons()
            return PropertyEntry(
                key.lexeme,
                PropertyForm.TYPED_DECLARATION,
                data_type,
                span=_join(key.span, type_end),
            )

        if tok.kind is TokenKind.PUNCT and tok.lexeme in COMPARISON_OPERATORS:
            op = self.advance()
            value = self.peek()
            if value is None or value.kind is not TokenKind.NUMBER:
                raise self.fail_here("a number literal")
            self.advance()
            self.skip_semicolons()
            return PropertyEntry(
                key.lexeme,
                PropertyForm.COMPARISON,
                value.value,
                comparison_operator=op.lexeme,
                span=_join(key.span, value.span),
            )

        raise self.fail_here("'=', ':', or a comparison operator")

    def parse_wrapper_interface(self) -> WrapperInterfaceSpec:
        start = self.expect_keyword("WrapperInterface")
        name = self.expect_ident("an interface name")
        self.expect_punct("=")
        self.expect_punct("{")
        requests: list[RequestSpec] = []
        while True:
            self.skip_semicolons()
            if self.at_punct("}"):
                break
            if self.eof:
                raise self.fail_eof(f"'}}' closing interface '{name.lexeme}'")
            if self.at_keyword("Request"):
                requests.append(self.parse_request())
            else:
                raise self.fail_here("'Request' or '}'")
        end = self.expect_punct("}")
        self.skip_semicolons()
        return WrapperInterfaceSpec(
            name=name.lexeme, requests=tuple(requests), span=_join(start.span, end.span)
        )

    def parse_request(self) -> RequestSpec:
        start = self.expect_keyword("Request")
        name = self.expect_ident("a request name")
        self.expect_punct("=")
        self.expect_punct("{")

        parameters: list[PortSpec] = []
        responses: list[tuple[str, SemanticType]] = []
        properties: list[PropertyEntry] = []
        while True:
            self.skip_semicolons()
            if self.at_punct("}"):
                break
            if self.eof:
                raise self.fail_eof(f"'}}' closing request '{name.lexeme}'")
            if self.at_keyword("Parameters"):
                parameters.extend(self.parse_parameters())
            elif self.at_keyword("Response"):
                self.advance()
                rname = self.expect_ident("a response name")
                self.expect_punct(":")
                rtype, _ = self.parse_type()
                self.skip_semicolons()
                responses.append((rname.lexeme, rtype))
            elif self.at_keyword("Property"):
                self.advance()
                properties.append(self.parse_property_body())
            else:
                raise self.fail_here("'Parameters', 'Response', 'Property', or '}'")

        end = self.expect_punct("}")
        self.skip_semicolons()
        return RequestSpec(
            name=name.lexeme,
            parameters=tuple(parameters),
            responses=tuple(responses),
            properties=tuple(properties),
            span=_join(start.span, end.span),
        )

    def parse_parameters(self) -> list[PortSpec]:
        self.expect_keyword("Parameters")
        self.expect_punct("{")
        params: list[PortSpec] = []
        while True:
            while self.at_punct(";") or self.at_punct(","):
                self.advance()
            if self.at_punct("}"):
                break
            if self.eof:
                raise self.fail_eof("'}' closing the parameter list")
            name = self.expect_ident("a parameter name")
            self.expect_punct(":")
            data_type, type_end = self.parse_type()
            params.append(
                PortSpec(
                    name=name.lexeme,
                    data_type=data_type,
                    direction=Direction.INPUT,
                    span=_join(name.span, type_end),
                )
            )
        self.expect_punct("}")
        self.skip_semicolons()
        return params

    def parse_relationships(self) -> list[RelationshipSpec]:
        self.expect_keyword("Relationships")
        self.expect_punct("{")
        relationships: list[RelationshipSpec] = []
        while True:
            self.skip_semicolons()
            if self.at_punct("}"):
                break
            if self.eof:
                raise self.fail_eof("'}' closing the relationships block")
            if self.at_punct("("):
                relationships.append(self.parse_relationship())
            else:
                raise self.fail_here("'(' starting a relationship or '}'")
        self.expect_punct("}")
        self.skip_semicolons()
        return relationships

    def parse_relationship(self) -> RelationshipSpec:
        start = self.expect_punct("(")
        source = self.expect_ident("the consuming machine name")
        # 'to' is a contextual keyword: only meaningful in this position.
        connective = self.expect_ident("'to'")
        if connective.lexeme != "to":
            raise _ParseError(
                Diagnostic(
                    Severity.ERROR,
                    "PARSE_UNEXPECTED_TOKEN",
                    f"expected 'to' between machine names, found {connective.lexeme!r}",
                    connective.span,
                )
            )
        target = self.expect_ident("the providing machine name")
        self.expect_punct(")")
        self.expect_punct("=")
        self.expect_punct("{")
        settings: list[PropertyEntry] = []
        self.skip_semicolons()
        if self.at_keyword("ConnectionSettings"):
            self.advance()
            self.expect_punct("{")
            while True:
                self.skip_semicolons()
                if self.at_punct("}"):
                    break
                if self.eof:
                    raise self.fail_eof("'}' closing the connection settings")
                if self.at_keyword("Property"):
                    self.advance()
                settings.append(self.parse_property_body())
            self.expect_punct("}")
            self.skip_semicolons()
        end = self.expect_punct("}")
        self.skip_semicolons()
        return RelationshipSpec(
            from_machine=source.lexeme,
            to_machine=target.lexeme,
            connection_settings=tuple(settings),
            span=_join(start.span, end.span),
        )

    def parse_type(self) -> tuple[SemanticType, SourceSpan]:
        base = self.expect_ident("a type name")
        end = base.span
        is_array = False
        if self.at_punct("["):
            self.advance()
            end = self.expect_punct("]").span
            is_array = True
        return SemanticType(base.lexeme, is_array), end


def parse(source: str) -> ParseResult:
    """Parse SMADL text into a network, collecting all diagnostics."""
    tokens, diagnostics = tokenize(source)
    parser = _Parser(tokens, list(diagnostics), _end_span(source))
    try:
        network = parser.parse_network()
    except _ParseError as err:
        parser.report(err.diagnostic)
        network = None
    if has_errors(parser.diagnostics):
        network = None
    return ParseResult(network=network, diagnostics=parser.diagnostics)
