from smadl.lexer import Token, TokenKind, tokenize


def kinds(tokens: list[Token]):
    return [(t.kind, t.lexeme) for t in tokens]


def test_constraint_line():
    tokens, diagnostics = tokenize("Property request_per_hour < 5000;")
    assert diagnostics == []
    assert kinds(tokens) == [
        (TokenKind.KEYWORD, "Property"),
        (TokenKind.IDENT, "request_per_hour"),
        (TokenKind.PUNCT, "<"),
        (TokenKind.NUMBER, "5000"),
        (TokenKind.PUNCT, ";"),
    ]
    assert tokens[3].value == 5000


def test_empty_input():
    assert tokenize("") == ([], [])


def test_unterminated_string():
    _, diagnostics = tokenize('name="Futweet')
    assert [d.code for d in diagnostics] == ["LEX_UNTERMINATED_STRING"]


def test_string_stops_at_newline():
    tokens, diagnostics = tokenize('x = "oops\ny = 1')
    assert [d.code for d in diagnostics] == ["LEX_UNTERMINATED_STRING"]
    assert any(t.lexeme == "y" for t in tokens)


def test_string_escapes():
    tokens, diagnostics = tokenize(r'"a \"quoted\" \\ end"')
    assert diagnostics == []
    assert tokens[0].value == 'a "quoted" \\ end'


def test_unknown_character_is_skipped():
    tokens, diagnostics = tokenize("a @ b")
    assert [d.code for d in diagnostics] == ["LEX_UNKNOWN_CHAR"]
    assert [t.lexeme for t in tokens] == ["a", "b"]


def test_line_comments():
    tokens, diagnostics = tokenize("a // comment with { } \" \nb")
    assert diagnostics == []
    assert [t.lexeme for t in tokens] == ["a", "b"]


def test_two_char_operators():
    tokens, _ = tokenize("<= >= == != < >")
    assert [t.lexeme for t in tokens] == ["<=", ">=", "==", "!=", "<", ">"]


def test_array_type_with_space():
    tokens, _ = tokenize("guesses:int []")
    assert [t.lexeme for t in tokens] == ["guesses", ":", "int", "[", "]"]


def test_float_literal():
    tokens, _ = tokenize("Property load < 99.5")
    assert tokens[-1].value == 99.5


def test_spans_are_ordered_and_disjoint():
    source = 'SocialMachine a = {\n    Property x = "y";\n}'
    tokens, _ = tokenize(source)
    positions = [(t.span.start_line, t.span.start_col, t.span.end_line, t.span.end_col)
                 for t in tokens]
    for (l1, c1, l2, c2), (n1, m1, _, _) in zip(positions, positions[1:]):
        assert (l1, c1) <= (l2, c2)
        assert (l2, c2) <= (n1, m1)


def test_keywords_are_classified():
    tokens, _ = tokenize("SocialMachineNetwork WrapperInterface something to")
    assert [t.kind for t in tokens] == [
        TokenKind.KEYWORD,
        TokenKind.KEYWORD,
        TokenKind.IDENT,
        TokenKind.IDENT,  # 'to' is contextual, not reserved
    ]
