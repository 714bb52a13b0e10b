import string

from hypothesis import given, settings
from hypothesis import strategies as st

from smadl.formatter import format_network
from smadl.lexer import KEYWORDS
from smadl.model import (
    ConstraintSpec,
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
    WrapperInterfaceSpec,
)
from smadl.parser import parse

# -- generation strategies -----------------------------------------------------

_IDENT_START = string.ascii_letters + "_"
_IDENT_CONT = _IDENT_START + string.digits

idents = st.builds(
    lambda head, tail: head + tail,
    st.sampled_from(_IDENT_START),
    st.text(alphabet=_IDENT_CONT, max_size=8),
).filter(lambda name: name not in KEYWORDS and name != "to")

# Printable ASCII exercises quote/backslash escaping; newlines are not
# representable in string literals.
safe_strings = st.text(
    alphabet=st.characters(min_codepoint=32, max_codepoint=126), max_size=12
)

numbers = st.one_of(
    st.integers(min_value=0, max_value=10**6),
    st.integers(min_value=0, max_value=10**6).map(lambda n: n / 100),
)

semantic_types = st.builds(SemanticType, idents, st.booleans())

properties = st.one_of(
    st.builds(
        lambda k, v: PropertyEntry(k, PropertyForm.ASSIGNMENT_STRING, v), idents, safe_strings
    ),
    st.builds(lambda k, v: PropertyEntry(k, PropertyForm.ASSIGNMENT_NUMBER, v), idents, numbers),
    st.builds(
        lambda k, t: PropertyEntry(k, PropertyForm.TYPED_DECLARATION, t), idents, semantic_types
    ),
    st.builds(
        lambda k, op, v: PropertyEntry(k, PropertyForm.COMPARISON, v, comparison_operator=op),
        idents,
        st.sampled_from(["<", "<=", ">", ">=", "==", "!="]),
        numbers,
    ),
)

ports = st.builds(
    lambda n, t, d: PortSpec(n, t, d),
    idents,
    semantic_types,
    st.sampled_from([Direction.INPUT, Direction.OUTPUT]),
)

state_names = st.one_of(idents, safe_strings.filter(lambda s: s != ""))

processing_units = st.builds(
    lambda n, ins, outs, states: ProcessingUnitSpec(
        n,
        tuple(PortSpec(p.name, p.data_type, Direction.INPUT) for p in ins),
        tuple(PortSpec(p.name, p.data_type, Direction.OUTPUT) for p in outs),
        tuple(states),
    ),
    idents,
    st.lists(ports, max_size=3),
    st.lists(ports, max_size=3),
    st.lists(state_names, max_size=4),
)

requests = st.builds(
    lambda n, params, resps, props: RequestSpec(
        n,
        tuple(PortSpec(p.name, p.data_type, Direction.INPUT) for p in params),
        tuple(resps),
        tuple(props),
    ),
    idents,
    st.lists(ports, max_size=3),
    st.lists(st.tuples(idents, semantic_types), max_size=2),
    st.lists(properties, max_size=3),
)

machines = st.builds(
    lambda n, unit, constraints, iface: MachineSpec(
        n, unit, tuple(constraints), iface
    ),
    idents,
    st.none() | processing_units,
    st.lists(
        st.builds(lambda n, props: ConstraintSpec(n, tuple(props)), idents,
                  st.lists(properties, max_size=3)),
        max_size=2,
    ),
    st.none()
    | st.builds(lambda n, reqs: WrapperInterfaceSpec(n, tuple(reqs)), idents,
                st.lists(requests, max_size=2)),
)

relationships = st.builds(
    lambda a, b, props: RelationshipSpec(a, b, tuple(props)),
    idents,
    idents,
    st.lists(properties, max_size=3),
)

networks = st.builds(
    lambda n, ms, rels: NetworkSpec(n, tuple(ms), tuple(rels)),
    idents,
    st.lists(machines, max_size=4),
    st.lists(relationships, max_size=3),
)


# -- pinned forms ---------------------------------------------------------------


def test_minimal_document_form():
    network = parse("SocialMachineNetwork n = { }").network
    assert format_network(network) == "SocialMachineNetwork n = {\n}\n"


def test_relationship_head_form(futweet_network):
    assert "(futweet_core to twitter) = {" in format_network(futweet_network)


def test_canonical_property_forms():
    source = (
        "SocialMachineNetwork n = { SocialMachine a = { Constraint c = {\n"
        'Property s="x" Property num = 3 Property t:json Property rate < 10\n'
        "} } }"
    )
    text = format_network(parse(source).network)
    assert 'Property s = "x";' in text
    assert "Property num = 3;" in text
    assert "Property t: json;" in text
    assert "Property rate < 10;" in text


def test_quoted_states_survive():
    source = (
        "SocialMachineNetwork n = { SocialMachine a = {\n"
        'ProcessingUnit p = { States {"over capacity"; idle} } } }'
    )
    text = format_network(parse(source).network)
    assert 'States {"over capacity"; idle};' in text


def test_fixture_format_is_idempotent(futweet_source):
    first = format_network(parse(futweet_source).network)
    second = format_network(parse(first).network)
    assert first == second


def test_fixture_round_trip(futweet_source):
    network = parse(futweet_source).network
    reparsed = parse(format_network(network))
    assert reparsed.diagnostics == []
    assert reparsed.network == network


# -- properties -------------------------------------------------------------------


@settings(max_examples=150)
@given(networks)
def test_round_trip_any_network(network):
    text = format_network(network)
    result = parse(text)
    assert result.network is not None, [d.message for d in result.diagnostics]
    assert result.network == network


@settings(max_examples=75)
@given(networks)
def test_format_is_idempotent(network):
    text = format_network(network)
    assert format_network(parse(text).network) == text


@settings(max_examples=50)
@given(networks, networks)
def test_structurally_equal_networks_format_identically(a, b):
    assert (format_network(a) == format_network(b)) == (a == b)
