from smadl.model import Direction, PropertyForm, SemanticType, Severity
from smadl.parser import parse


def span_in_bounds(span, source: str) -> bool:
    lines = source.split("\n")
    if not (1 <= span.start_line <= span.end_line <= len(lines)):
        return False
    if (span.start_line, span.start_col) > (span.end_line, span.end_col):
        return False
    return (
        1 <= span.start_col <= len(lines[span.start_line - 1]) + 1
        and 1 <= span.end_col <= len(lines[span.end_line - 1]) + 1
    )


def machine(network, name):
    return next(m for m in network.machines if m.name == name)


def test_futweet_fixture(futweet_network):
    net = futweet_network
    assert net.name == "futweet_net"
    assert [m.name for m in net.machines] == [
        "twitter",
        "facebook",
        "amazon",
        "orkut",
        "gmail",
        "msn",
        "futweet_core",
    ]

    core = machine(net, "futweet_core")
    assert core.processing_unit.states == ("processing", "idle", "overload")

    limits = [p for c in core.constraints for p in c.properties]
    assert any(
        p.key == "request_per_hour"
        and p.form is PropertyForm.COMPARISON
        and p.comparison_operator == "<"
        and p.value == 5000
        for p in limits
    )

    requests = {r.name: r for r in core.wrapper_interface.requests}
    do_guess = requests["doGuess"]
    assert [(p.name, str(p.data_type)) for p in do_guess.parameters] == [("guesses", "int[]")]
    assert ("httpMethod", "POST") in [
        (p.key, p.value) for p in do_guess.properties if p.form is PropertyForm.ASSIGNMENT_STRING
    ]
    get_futweets = requests["getFutweets"]
    assert [(p.name, str(p.data_type)) for p in get_futweets.parameters] == [("filter", "string")]
    assert ("httpMethod", "GET") in [
        (p.key, p.value)
        for p in get_futweets.properties
        if p.form is PropertyForm.ASSIGNMENT_STRING
    ]

    edges = [(r.from_machine, r.to_machine) for r in net.relationships]
    assert ("futweet_core", "twitter") in edges
    assert ("futweet_core", "facebook") in edges


def test_minimal_document():
    result = parse("SocialMachineNetwork n = { }")
    assert result.diagnostics == []
    assert result.network.name == "n"
    assert result.network.machines == ()
    assert result.network.relationships == ()


def test_truncated_document():
    result = parse("SocialMachineNetwork n = { SocialMachine a = {")
    assert result.network is None
    assert any(d.code == "PARSE_UNEXPECTED_EOF" for d in result.diagnostics)


def test_empty_source_is_an_error():
    result = parse("")
    assert result.network is None
    assert any(d.code == "PARSE_UNEXPECTED_EOF" for d in result.diagnostics)


def test_duplicate_processing_unit():
    result = parse(
        "SocialMachineNetwork n = {\n"
        "  SocialMachine a = {\n"
        "    ProcessingUnit p1 = { };\n"
        "    ProcessingUnit p2 = { };\n"
        "  }\n"
        "}"
    )
    assert result.network is None
    assert [d.code for d in result.diagnostics] == ["PARSE_DUPLICATE_SECTION"]


def test_duplicate_wrapper_interface():
    result = parse(
        "SocialMachineNetwork n = {\n"
        "  SocialMachine a = { WrapperInterface w1 = { } WrapperInterface w2 = { } }\n"
        "}"
    )
    assert result.network is None
    assert [d.code for d in result.diagnostics] == ["PARSE_DUPLICATE_SECTION"]


def test_error_recovery_reports_each_bad_machine():
    source = (
        "SocialMachineNetwork n = {\n"
        "  SocialMachine broken1 = { ProcessingUnit }\n"
        "  SocialMachine ok1 = { }\n"
        "  SocialMachine broken2 = { Constraint c = { Property x ! } }\n"
        "  SocialMachine ok2 = { }\n"
        "}"
    )
    result = parse(source)
    assert result.network is None
    errors = [d for d in result.diagnostics if d.severity is Severity.ERROR]
    assert len(errors) >= 2
    for d in result.diagnostics:
        assert span_in_bounds(d.span, source)


def test_no_partial_network_on_error():
    # One good machine plus one bad one must not parse "successfully".
    result = parse("SocialMachineNetwork n = { SocialMachine good = { } SocialMachine bad = ; }")
    assert result.network is None
    assert any(d.severity is Severity.ERROR for d in result.diagnostics)


def test_machine_level_relationships_collect_at_network():
    result = parse(
        "SocialMachineNetwork n = {\n"
        "  SocialMachine a = {\n"
        "    Relationships { (a to b) = { } }\n"
        "  }\n"
        "  SocialMachine b = { }\n"
        "  Relationships { (b to a) = { } }\n"
        "}"
    )
    assert result.diagnostics == []
    edges = [(r.from_machine, r.to_machine) for r in result.network.relationships]
    assert edges == [("a", "b"), ("b", "a")]


def test_quoted_state_names():
    result = parse(
        "SocialMachineNetwork n = {\n"
        "  SocialMachine a = {\n"
        '    ProcessingUnit p = { States {"fully operational"; "over capacity"; idle} }\n'
        "  }\n"
        "}"
    )
    assert result.diagnostics == []
    unit = result.network.machines[0].processing_unit
    assert unit.states == ("fully operational", "over capacity", "idle")


def test_connection_settings_forms():
    result = parse(
        "SocialMachineNetwork n = {\n"
        "  SocialMachine a = { } SocialMachine b = { }\n"
        "  Relationships {\n"
        '    (a to b) = { ConnectionSettings { name="X"; apikey:string; retries = 3 } }\n'
        "  }\n"
        "}"
    )
    assert result.diagnostics == []
    settings = result.network.relationships[0].connection_settings
    assert [(p.key, p.form) for p in settings] == [
        ("name", PropertyForm.ASSIGNMENT_STRING),
        ("apikey", PropertyForm.TYPED_DECLARATION),
        ("retries", PropertyForm.ASSIGNMENT_NUMBER),
    ]
    assert settings[1].value == SemanticType("string", False)


def test_semicolons_are_optional_everywhere():
    with_semis = parse(
        "SocialMachineNetwork n = {\n"
        "  SocialMachine a = {\n"
        "    ProcessingUnit p = { Input x: int; Output y: int; States {s1; s2}; };\n"
        "    Constraint c = { Property k = 1; };\n"
        "    WrapperInterface w = { Request r = { Parameters {q: int;}; Response out: json; }; };\n"
        "  };\n"
        "}\n"
    )
    without = parse(
        "SocialMachineNetwork n = {\n"
        "  SocialMachine a = {\n"
        "    ProcessingUnit p = { Input x: int Output y: int States {s1; s2} }\n"
        "    Constraint c = { Property k = 1 }\n"
        "    WrapperInterface w = { Request r = { Parameters {q: int} Response out: json } }\n"
        "  }\n"
        "}\n"
    )
    assert with_semis.diagnostics == [] and without.diagnostics == []
    assert with_semis.network == without.network


def test_parameter_directions_are_input():
    result = parse(
        "SocialMachineNetwork n = { SocialMachine a = {\n"
        "  WrapperInterface w = { Request r = { Parameters {p: string[], q: bool} } } } }"
    )
    assert result.diagnostics == []
    params = result.network.machines[0].wrapper_interface.requests[0].parameters
    assert all(p.direction is Direction.INPUT for p in params)
    assert str(params[0].data_type) == "string[]"


def test_relationship_requires_to_keyword():
    result = parse(
        "SocialMachineNetwork n = { SocialMachine a = { } SocialMachine b = { }\n"
        "  Relationships { (a with b) = { } } }"
    )
    assert result.network is None
    assert any(d.code == "PARSE_UNEXPECTED_TOKEN" for d in result.diagnostics)


def test_trailing_garbage_is_an_error():
    result = parse("SocialMachineNetwork n = { } stray")
    assert result.network is None
    assert any(d.code == "PARSE_UNEXPECTED_TOKEN" for d in result.diagnostics)


def test_lexical_errors_surface_in_parse_result():
    result = parse('SocialMachineNetwork n = { SocialMachine a = { Constraint c = { Property x = "y } } }')
    assert result.network is None
    assert any(d.code == "LEX_UNTERMINATED_STRING" for d in result.diagnostics)


def test_network_absent_implies_error_diagnostic():
    for source in ["", "SocialMachineNetwork", "SocialMachineNetwork n = {", "junk"]:
        result = parse(source)
        if result.network is None:
            assert any(d.severity is Severity.ERROR for d in result.diagnostics)
